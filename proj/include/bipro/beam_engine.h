#ifndef BIPRO_BEAM_ENGINE_H_
#define BIPRO_BEAM_ENGINE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bipro/model_backend.h"
#include "bipro/poem.h"
#include "bipro/verifier.h"

namespace bipro {

struct BeamConfig {
  int beam_size = 6;

  /// Per-step cap on replacement attempts; -1 resolves to 4 * beam_size.
  /// Pass a large value to make the search effectively exhaustive.
  std::int64_t max_replacements_per_step = -1;

  std::uint64_t seed = 0;
};

/// Scores a complete candidate sentence (token sequence); higher is better.
/// An empty function selects the first completed beam instead (the direct
/// generation baseline).
using SentenceScorer = std::function<double(std::span<const std::string>)>;

struct SentenceResult {
  std::string sentence;
  std::vector<std::string> tokens;
  double score = 0.0;  // scorer value of the winner; 0 in direct mode
  std::int64_t candidates_considered = 0;
  std::int64_t replacements = 0;
};

/// One line of the optional step trace.
struct StepEvent {
  int step = 0;
  int beam = 0;
  std::string token;
  std::string status;  // active | dead | replaced
  std::optional<int> rule;

  nlohmann::ordered_json to_json() const;
};

using StepTrace = std::function<void(const StepEvent&)>;

/// All beams died and the replacement budget ran out; carries the most
/// recent rule violations seen on the failing step.
class ExhaustionError : public Error {
 public:
  ExhaustionError(const std::string& what, std::vector<Violation> violations)
      : Error(what), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Generates one sentence under the Pingshui constraints: k beams each grow
/// one sampled token per step; beams whose prefix becomes infeasible (or
/// that duplicate a sibling) are replaced by re-sampling a different
/// continuation from the best surviving beam's pre-step state, falling back
/// to worse donors when the best one has no alternatives left. Completed
/// beams are scored and the best one returned (ties -> lower beam index).
///
/// `sentence_index` is the 0-based slot being generated; any current content
/// of that slot in `poem_so_far` is ignored. The context's mask must sit at
/// that slot. Throws ExhaustionError when no beam can be completed.
SentenceResult generate_constrained_sentence(const ModelBackend& model,
                                             const BlockContext& context, int sentence_index,
                                             const Poem& poem_so_far,
                                             const PingshuiVerifier& verifier,
                                             const SentenceScorer& scorer,
                                             const BeamConfig& config,
                                             const StepTrace& trace = {});

}  // namespace bipro

#endif  // BIPRO_BEAM_ENGINE_H_
