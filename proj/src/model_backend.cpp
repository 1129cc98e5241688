#include "bipro/model_backend.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bipro/errors.h"
#include "bipro/utf8.h"

namespace bipro {

BlockContext BlockContext::from_strings(std::string_view prefix_text,
                                        std::string_view suffix_text) {
  BlockContext ctx;
  ctx.prefix = utf8::split(prefix_text);
  ctx.suffix = utf8::split(suffix_text);
  return ctx;
}

void SamplingParams::validate() const {
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (top_k && *top_k < 1) throw ConfigError("top_k must be >= 1");
  if (max_block_tokens < 1) throw ConfigError("max_block_tokens must be >= 1");
}

double sum_logprob(const LogProbSeries& series) {
  return std::accumulate(series.begin(), series.end(), 0.0);
}

double mean_logprob(const LogProbSeries& series) {
  if (series.empty()) throw InputError("log-probability series is empty");
  return sum_logprob(series) / static_cast<double>(series.size());
}

namespace sampling {

TokenDistribution adjust(const TokenDistribution& raw, double temperature,
                         std::optional<int> top_k) {
  TokenDistribution out = raw;
  if (temperature != 1.0) {
    double total = 0.0;
    for (auto& p : out.probs) {
      p = p > 0.0 ? std::exp(std::log(p) / temperature) : 0.0;
      total += p;
    }
    for (auto& p : out.probs) p /= total;
  }
  if (top_k && static_cast<std::size_t>(*top_k) < out.probs.size()) {
    std::vector<int> ids(out.probs.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    std::stable_sort(ids.begin(), ids.end(),
                     [&](int a, int b) { return out.probs[a] > out.probs[b]; });
    std::vector<bool> keep(out.probs.size(), false);
    for (int i = 0; i < *top_k; ++i) keep[static_cast<std::size_t>(ids[i])] = true;
    double total = 0.0;
    for (std::size_t i = 0; i < out.probs.size(); ++i) {
      if (!keep[i]) out.probs[i] = 0.0;
      total += out.probs[i];
    }
    for (auto& p : out.probs) p /= total;
  }
  return out;
}

int pick(const TokenDistribution& dist, double u) {
  double cum = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    if (dist.probs[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cum += dist.probs[i];
    if (u < cum) return static_cast<int>(i);
  }
  // Rounding left u just past the accumulated mass; take the last live id.
  if (last_positive < 0) throw Error("cannot sample from an all-zero distribution");
  return last_positive;
}

}  // namespace sampling

}  // namespace bipro
