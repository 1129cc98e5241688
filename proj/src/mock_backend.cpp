#include "bipro/mock_backend.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bipro/errors.h"
#include "bipro/hashing.h"

namespace bipro {
namespace {

using hashing::fnv1a;
using hashing::fnv1a_byte;
using hashing::fnv1a_u64;
using hashing::kFnvOffset;

std::uint64_t context_fingerprint(const BlockContext& ctx) {
  std::uint64_t h = kFnvOffset;
  for (const auto& t : ctx.prefix) {
    h = fnv1a(t, h);
    h = fnv1a_byte(0x1F, h);
  }
  h = fnv1a_byte(0x1E, h);
  for (const auto& t : ctx.suffix) {
    h = fnv1a(t, h);
    h = fnv1a_byte(0x1F, h);
  }
  return h;
}

std::uint64_t bigram_hash(std::uint64_t seed, std::uint64_t ctx_fp,
                          const std::string& prev, const std::string& cand) {
  std::uint64_t h = fnv1a_u64(seed);
  h = fnv1a_u64(ctx_fp, h);
  h = fnv1a(prev, h);
  h = fnv1a_byte(0x1F, h);
  h = fnv1a(cand, h);
  return h;
}

}  // namespace

MockBackend MockBackend::uniform(Vocabulary vocab) {
  return MockBackend(std::move(vocab), Mode::kUniform, 0);
}

MockBackend MockBackend::bigram(Vocabulary vocab, std::uint64_t seed) {
  return MockBackend(std::move(vocab), Mode::kBigram, seed);
}

void MockBackend::require_context_known(const BlockContext& ctx,
                                        std::span<const std::string> generated) const {
  auto check = [&](const std::string& t) {
    if (!vocab_.contains(t)) throw ContextError("unknown token in context: \"" + t + "\"");
  };
  for (const auto& t : ctx.prefix) check(t);
  for (const auto& t : ctx.suffix) check(t);
  for (const auto& t : generated) check(t);
}

TokenDistribution MockBackend::next_token_distribution(
    const BlockContext& ctx, std::span<const std::string> generated) const {
  require_context_known(ctx, generated);
  const std::size_t n = vocab_.size();
  TokenDistribution dist;
  dist.probs.resize(n);
  if (mode_ == Mode::kUniform) {
    std::fill(dist.probs.begin(), dist.probs.end(), 1.0 / static_cast<double>(n));
    return dist;
  }
  const std::uint64_t ctx_fp = context_fingerprint(ctx);
  const std::string* prev = nullptr;
  if (!generated.empty()) {
    prev = &generated.back();
  } else if (!ctx.prefix.empty()) {
    prev = &ctx.prefix.back();
  }
  static const std::string kEmpty;
  const std::string& prev_token = prev ? *prev : kEmpty;

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t h = bigram_hash(seed_, ctx_fp, prev_token, vocab_.token(static_cast<int>(i)));
    double w = 1.0 + static_cast<double>(h % 13);
    dist.probs[i] = w;
    total += w;
  }
  for (auto& p : dist.probs) p /= total;
  return dist;
}

FillResult MockBackend::fill_block(const BlockContext& ctx,
                                   const SamplingParams& params) const {
  params.validate();
  FillResult result;
  result.tokens.reserve(static_cast<std::size_t>(params.max_block_tokens));
  for (int step = 0; step < params.max_block_tokens; ++step) {
    TokenDistribution raw = next_token_distribution(ctx, result.tokens);
    TokenDistribution adjusted = sampling::adjust(raw, params.temperature, params.top_k);
    std::uint64_t h = fnv1a_u64(params.seed);
    h = fnv1a_u64(static_cast<std::uint64_t>(step), h);
    double u = hashing::to_unit_interval(hashing::splitmix64(h));
    int id = sampling::pick(adjusted, u);
    result.tokens.push_back(vocab_.token(id));
    result.logprobs.push_back(std::log(raw.probs[static_cast<std::size_t>(id)]));
  }
  return result;
}

LogProbSeries MockBackend::score_target(const BlockContext& ctx,
                                        std::span<const std::string> target) const {
  if (target.empty()) throw InputError("score_target: target must be non-empty");
  for (const auto& t : target) {
    if (!vocab_.contains(t)) throw VocabularyError("token not in vocabulary: \"" + t + "\"");
  }
  LogProbSeries series;
  series.reserve(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    TokenDistribution dist = next_token_distribution(ctx, target.subspan(0, i));
    int id = vocab_.id_of(target[i]);
    series.push_back(std::log(dist.probs[static_cast<std::size_t>(id)]));
  }
  return series;
}

}  // namespace bipro
