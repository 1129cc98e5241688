#include "bipro/scorer.h"

#include <cmath>

#include "bipro/errors.h"

namespace bipro {

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::kGeneration:
      return "generation";
    case Phase::kRevise:
      return "revise";
    case Phase::kRewrite:
      return "rewrite";
  }
  return "?";
}

void ScoreWeights::validate() const {
  if (!(alpha_title >= 0.0 && alpha_title <= 1.0)) {
    throw ConfigError("alpha_title must be in [0, 1]");
  }
}

std::optional<int> match_sentence(int sentence_index, Phase phase, int sentence_count) {
  if (sentence_index < 0 || sentence_index >= sentence_count) {
    throw InputError("sentence index out of range");
  }
  switch (phase) {
    case Phase::kGeneration:
      if (sentence_index == 0) return std::nullopt;
      return sentence_index - 1;
    case Phase::kRevise:
      if (sentence_index + 1 >= sentence_count) return std::nullopt;
      return sentence_index + 1;
    case Phase::kRewrite:
      // 0-based even <=> 1-based odd: partner is the next sentence.
      if (sentence_index % 2 == 0) {
        if (sentence_index + 1 >= sentence_count) return std::nullopt;
        return sentence_index + 1;
      }
      return sentence_index - 1;
  }
  return std::nullopt;
}

double bipro_score(const ModelBackend& model, const std::string& title, const Poem& poem,
                   int scored_sentence, Phase phase, const ScoreWeights& weights,
                   const PromptTemplates& templates) {
  weights.validate();
  if (scored_sentence < 0 || scored_sentence >= static_cast<int>(poem.sentences.size())) {
    throw InputError("scored sentence index out of range");
  }

  RenderedPrompt title_prompt = make_bipro_prompt(title, poem, MaskTarget::title(), templates);
  double title_mean = mean_logprob(model.score_target(title_prompt.context, title_prompt.target));

  std::optional<int> match =
      match_sentence(scored_sentence, phase, static_cast<int>(poem.sentences.size()));
  if (!match || poem.sentences[static_cast<std::size_t>(*match)].empty()) {
    return title_mean;
  }

  RenderedPrompt match_prompt =
      make_bipro_prompt(title, poem, MaskTarget::sentence(*match), templates);
  double match_mean = mean_logprob(model.score_target(match_prompt.context, match_prompt.target));
  return weights.alpha_title * title_mean + weights.alpha_match() * match_mean;
}

double perplexity(const LogProbSeries& series) {
  return std::exp(-mean_logprob(series));
}

}  // namespace bipro
