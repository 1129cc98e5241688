#ifndef BIPRO_SCORER_H_
#define BIPRO_SCORER_H_

#include <optional>

#include "bipro/model_backend.h"
#include "bipro/poem.h"
#include "bipro/prompt_templates.h"

namespace bipro {

/// Which stage of the pipeline is asking for a score; the stage decides
/// which partner sentence backs the match component.
enum class Phase { kGeneration, kRevise, kRewrite };

const char* phase_name(Phase phase);

struct ScoreWeights {
  double alpha_title = 0.5;

  double alpha_match() const { return 1.0 - alpha_title; }
  /// Throws ConfigError when alpha_title is outside [0, 1].
  void validate() const;
};

/// The partner ("match") sentence scored together with the title, 0-based:
/// the previous sentence while generating, the following one while revising,
/// and the couplet partner while rewriting (next for 1st/3rd/5th/7th
/// sentences, previous for the others). nullopt when no partner exists.
std::optional<int> match_sentence(int sentence_index, Phase phase, int sentence_count);

/// The selection criterion s(.): a weighted sum of the mean log-probability
/// of the masked title and of the masked match sentence, both conditioned on
/// the rest of the poem. Higher is better; when no match sentence exists the
/// title component stands alone. `scored_sentence` is 0-based.
double bipro_score(const ModelBackend& model, const std::string& title, const Poem& poem,
                   int scored_sentence, Phase phase, const ScoreWeights& weights,
                   const PromptTemplates& templates);

/// exp(-mean(series)); strictly decreasing in the mean log-probability, so
/// ranking by score descending equals ranking by perplexity ascending.
/// Throws InputError on an empty series.
double perplexity(const LogProbSeries& series);

}  // namespace bipro

#endif  // BIPRO_SCORER_H_
