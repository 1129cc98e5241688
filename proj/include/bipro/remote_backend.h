#ifndef BIPRO_REMOTE_BACKEND_H_
#define BIPRO_REMOTE_BACKEND_H_

#include <chrono>
#include <memory>
#include <string>

#include "bipro/model_backend.h"

namespace bipro {

struct RemoteConfig {
  /// Base URL such as "http://127.0.0.1:8080"; when empty, the
  /// BIPRO_MODEL_URL environment variable is used.
  std::string base_url;

  /// Upper bound on in-flight requests.
  int max_connections = 4;

  /// Bounded retries apply to fill_block only; scoring never retries so its
  /// results stay bit-reproducible.
  int fill_retries = 2;
  std::chrono::milliseconds retry_backoff{100};
};

/// HTTP client speaking the block-model wire protocol:
///
///   POST /v1/score    {"prefix","suffix","target"} -> {"logprobs":[...]}
///   POST /v1/generate {"prefix","suffix","max_tokens","temperature",
///                      "top_k","seed"}             -> {"tokens","logprobs"}
///
/// Strings on the wire are plain UTF-8; tokens are characters. The local
/// vocabulary backs next_token_distribution (one /v1/score call per
/// candidate token) and is also used for out-of-vocabulary checks the server
/// cannot see.
class RemoteBackend : public ModelBackend {
 public:
  RemoteBackend(Vocabulary vocab, RemoteConfig config);
  ~RemoteBackend() override;

  const Vocabulary& vocabulary() const override { return vocab_; }

  TokenDistribution next_token_distribution(
      const BlockContext& ctx, std::span<const std::string> generated) const override;

  FillResult fill_block(const BlockContext& ctx,
                        const SamplingParams& params) const override;

  LogProbSeries score_target(const BlockContext& ctx,
                             std::span<const std::string> target) const override;

  const std::string& base_url() const;

 private:
  struct Impl;

  Vocabulary vocab_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bipro

#endif  // BIPRO_REMOTE_BACKEND_H_
