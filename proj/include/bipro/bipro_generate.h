#ifndef BIPRO_BIPRO_GENERATE_H_
#define BIPRO_BIPRO_GENERATE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bipro/beam_engine.h"
#include "bipro/model_backend.h"
#include "bipro/poem.h"
#include "bipro/prompt_templates.h"
#include "bipro/scorer.h"
#include "bipro/verifier.h"

namespace bipro {

struct GenerationConfig {
  PoemFormat format;
  int max_rewrite_rounds = 20;  // the paper's default round limit
  BeamConfig beam;
  ScoreWeights weights;
  PromptTemplates templates;
  std::uint64_t seed = 0;

  /// Direct-generation baseline: take the first completed beam, skip the
  /// scorer and the revise/rewrite loop.
  bool direct = false;

  void validate() const;
};

struct TraceEvent {
  enum class Kind { kGenerated, kRevised, kRewritten, kRejected };

  Kind kind = Kind::kGenerated;
  int sentence_index = 0;  // 0-based in memory, serialized 1-based
  std::string old_text;
  std::string new_text;
  std::optional<double> old_score;
  double new_score = 0.0;
  int round = 0;  // 0 = initial generation + revise, 1.. = rewrite rounds

  nlohmann::ordered_json to_json() const;
  static TraceEvent from_json(const nlohmann::json& j);
};

const char* trace_kind_name(TraceEvent::Kind kind);

struct GenerationTrace {
  std::vector<TraceEvent> events;

  void write_jsonl(std::ostream& out) const;
  static GenerationTrace read_jsonl(std::istream& in);

  /// Applies the accepted events in order and returns the reconstructed
  /// poem. Rejected events change nothing.
  Poem replay(const std::string& title, PoemFormat format) const;
};

struct GenerationResult {
  Poem poem;
  GenerationTrace trace;
};

/// Beam search could not complete a sentence during the initial generation
/// pass; carries whatever was generated up to that point.
class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, GenerationTrace partial,
                  std::vector<Violation> violations)
      : Error(what), partial_trace_(std::move(partial)), violations_(std::move(violations)) {}
  const GenerationTrace& partial_trace() const { return partial_trace_; }
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  GenerationTrace partial_trace_;
  std::vector<Violation> violations_;
};

/// The full pipeline: generate each sentence with constrained beam search,
/// immediately revise the previous sentence after each new one, then run
/// rewrite rounds over the whole poem until a round changes nothing or the
/// round limit is reached. Replacements are accepted only on strictly higher
/// score, so the score sequence of accepted events increases monotonically
/// and the loop terminates.
GenerationResult generate_poem(const ModelBackend& model, const std::string& title,
                               const PingshuiVerifier& verifier, const GenerationConfig& config);

enum class CostMode { kSingleSentence, kWithRevise, kFull };

CostMode cost_mode_from_name(const std::string& name);

struct CostParams {
  std::int64_t n = 8;  // sentences
  std::int64_t s = 7;  // tokens spent generating one sentence
  std::int64_t m = 10; // rewrite rounds
  std::int64_t t = 5;  // target (title) length
  std::int64_t k = 6;  // beam size

  void validate() const;
};

/// Token spend of the pipeline: k(t+s) for one sentence, 2nk(t+s) for a full
/// poem including revise, nk(m+2)(t+s) for the full revise-rewrite process.
std::int64_t estimate_token_cost(const CostParams& params, CostMode mode);

}  // namespace bipro

#endif  // BIPRO_BIPRO_GENERATE_H_
