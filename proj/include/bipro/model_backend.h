#ifndef BIPRO_MODEL_BACKEND_H_
#define BIPRO_MODEL_BACKEND_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bipro/vocabulary.h"

namespace bipro {

/// The fixed text around a masked block: `prefix` comes before the mask,
/// `suffix` after it. The block position is implicitly prefix.size(), so the
/// invariant "mask sits at block_position" holds by construction, and neither
/// side can contain a mask sentinel because the mask is never materialized as
/// a token.
struct BlockContext {
  std::vector<std::string> prefix;
  std::vector<std::string> suffix;

  std::size_t block_position() const { return prefix.size(); }

  /// Character-level tokenization of two UTF-8 strings.
  static BlockContext from_strings(std::string_view prefix_text,
                                   std::string_view suffix_text);

  bool operator==(const BlockContext&) const = default;
};

struct SamplingParams {
  double temperature = 1.0;
  std::optional<int> top_k;  // nullopt = unlimited
  std::uint64_t seed = 0;
  int max_block_tokens = 1;  // the `s` of the token-cost formulas

  /// Throws ConfigError when temperature <= 0, top_k < 1 or
  /// max_block_tokens < 1.
  void validate() const;
};

/// Per-token natural-log probabilities of a target span; entries are <= 0
/// for any probabilistic backend.
using LogProbSeries = std::vector<double>;

/// Probability of each vocabulary id at one step. Non-negative and summing
/// to 1 (within 1e-9) by contract.
struct TokenDistribution {
  std::vector<double> probs;
};

struct FillResult {
  std::vector<std::string> tokens;
  LogProbSeries logprobs;  // raw model log-probability of each sampled token
};

/// Uniform interface to a block generative model: something that can fill a
/// masked span conditioned on both sides, expose per-step distributions, and
/// score a given target span. Implementations must be safe for concurrent
/// read-only use.
class ModelBackend {
 public:
  virtual ~ModelBackend() = default;

  virtual const Vocabulary& vocabulary() const = 0;

  /// Distribution of the next block token after `generated` tokens have
  /// already been placed in the mask slot.
  virtual TokenDistribution next_token_distribution(
      const BlockContext& ctx, std::span<const std::string> generated) const = 0;

  /// Auto-regressive sampling of the masked block.
  virtual FillResult fill_block(const BlockContext& ctx,
                                const SamplingParams& params) const = 0;

  /// logprobs[i] = log p(target[i] | ctx, target[0..i)).
  virtual LogProbSeries score_target(const BlockContext& ctx,
                                     std::span<const std::string> target) const = 0;
};

double sum_logprob(const LogProbSeries& series);

/// Throws InputError on an empty series.
double mean_logprob(const LogProbSeries& series);

/// Deterministic sampling helpers shared by backends and the beam engine.
namespace sampling {

/// Applies temperature and top-k truncation to a raw distribution. Ties at
/// the top-k boundary keep the lower id.
TokenDistribution adjust(const TokenDistribution& raw, double temperature,
                         std::optional<int> top_k);

/// Inverse-CDF pick in id order: the first id whose cumulative probability
/// exceeds u.
int pick(const TokenDistribution& dist, double u);

}  // namespace sampling

}  // namespace bipro

#endif  // BIPRO_MODEL_BACKEND_H_
