#ifndef BIPRO_MOCK_BACKEND_H_
#define BIPRO_MOCK_BACKEND_H_

#include <cstdint>

#include "bipro/model_backend.h"

namespace bipro {

/// Deterministic in-process model for tests and offline runs. Stateless
/// after construction, so concurrent calls are safe.
///
/// Two modes:
///
/// * Uniform: every step yields 1/|V| for every token (an "untrained" model).
///
/// * Bigram: step weights follow a published closed form so tests can
///   recompute them independently:
///
///     ctx_fp = fnv1a64 over (each prefix token's bytes + 0x1F), 0x1E,
///              (each suffix token's bytes + 0x1F)
///     prev   = last token of prefix ++ generated, or "" at the block start
///     h      = fnv1a64 chain of (seed as 8 LE bytes, ctx_fp as 8 LE bytes,
///              prev bytes, 0x1F, candidate bytes)
///     w(candidate) = 1 + (h mod 13)
///     p(candidate | ctx, generated) = w / sum_v w(v)
///
///   Folding the context fingerprint into the weight makes the distribution
///   depend on both sides of the mask, the way a block model's does; a
///   weight keyed on the previous token alone would leave the suffix unable
///   to influence any score.
class MockBackend : public ModelBackend {
 public:
  static MockBackend uniform(Vocabulary vocab);
  static MockBackend bigram(Vocabulary vocab, std::uint64_t seed);

  const Vocabulary& vocabulary() const override { return vocab_; }

  TokenDistribution next_token_distribution(
      const BlockContext& ctx, std::span<const std::string> generated) const override;

  /// Samples exactly max_block_tokens tokens (character vocabularies have no
  /// end-of-block token). Sampling uses temperature/top_k; the reported
  /// logprobs are always the raw model probabilities, so replaying the
  /// choices through next_token_distribution reproduces them exactly.
  FillResult fill_block(const BlockContext& ctx,
                        const SamplingParams& params) const override;

  LogProbSeries score_target(const BlockContext& ctx,
                             std::span<const std::string> target) const override;

 private:
  enum class Mode { kUniform, kBigram };

  MockBackend(Vocabulary vocab, Mode mode, std::uint64_t seed)
      : vocab_(std::move(vocab)), mode_(mode), seed_(seed) {}

  void require_context_known(const BlockContext& ctx,
                             std::span<const std::string> generated) const;

  Vocabulary vocab_;
  Mode mode_;
  std::uint64_t seed_;
};

}  // namespace bipro

#endif  // BIPRO_MOCK_BACKEND_H_
