#include "bipro/remote_backend.h"

#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bipro/errors.h"
#include "bipro/utf8.h"

namespace bipro {
namespace {

// Counting semaphore bounding concurrent requests.
class ConnectionGate {
 public:
  explicit ConnectionGate(int permits) : permits_(permits) {}

  void acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return permits_ > 0; });
    --permits_;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++permits_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int permits_;
};

struct GatePass {
  explicit GatePass(ConnectionGate& gate) : gate_(gate) { gate_.acquire(); }
  ~GatePass() { gate_.release(); }
  ConnectionGate& gate_;
};

std::string resolve_base_url(const std::string& configured) {
  if (!configured.empty()) return configured;
  const char* env = std::getenv("BIPRO_MODEL_URL");
  if (env && *env) return env;
  throw ConfigError("no model URL: set RemoteConfig.base_url or BIPRO_MODEL_URL");
}

}  // namespace

struct RemoteBackend::Impl {
  RemoteConfig config;
  std::string url;
  mutable ConnectionGate gate;

  Impl(RemoteConfig cfg, std::string resolved)
      : config(std::move(cfg)), url(std::move(resolved)), gate(config.max_connections) {}

  nlohmann::json post(const std::string& path, const nlohmann::json& body) const {
    GatePass pass(gate);
    httplib::Client client(url);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(120, 0);
    httplib::Result res = client.Post(path, body.dump(), "application/json");
    if (!res) {
      throw TransportError("model backend unreachable at " + url + path + ": " +
                           httplib::to_string(res.error()));
    }
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw TransportError("model backend returned invalid JSON: " + std::string(e.what()));
    }
    if (res->status != 200) {
      std::string kind = parsed.value("kind", "");
      std::string message = parsed.value("error", "HTTP " + std::to_string(res->status));
      if (kind == "vocabulary") throw VocabularyError(message);
      if (kind == "context") throw ContextError(message);
      throw TransportError("model backend error: " + message);
    }
    return parsed;
  }
};

RemoteBackend::RemoteBackend(Vocabulary vocab, RemoteConfig config)
    : vocab_(std::move(vocab)),
      impl_(std::make_unique<Impl>(config, resolve_base_url(config.base_url))) {}

RemoteBackend::~RemoteBackend() = default;

const std::string& RemoteBackend::base_url() const { return impl_->url; }

LogProbSeries RemoteBackend::score_target(const BlockContext& ctx,
                                          std::span<const std::string> target) const {
  if (target.empty()) throw InputError("score_target: target must be non-empty");
  for (const auto& t : target) {
    if (!vocab_.contains(t)) throw VocabularyError("token not in vocabulary: \"" + t + "\"");
  }
  nlohmann::json body;
  body["prefix"] = utf8::join(ctx.prefix);
  body["suffix"] = utf8::join(ctx.suffix);
  body["target"] = utf8::join(target);
  nlohmann::json res = impl_->post("/v1/score", body);
  if (!res.contains("logprobs") || !res["logprobs"].is_array()) {
    throw TransportError("/v1/score response is missing logprobs");
  }
  LogProbSeries series = res["logprobs"].get<LogProbSeries>();
  if (series.size() != target.size()) {
    throw TransportError("/v1/score returned " + std::to_string(series.size()) +
                         " logprobs for a target of " + std::to_string(target.size()));
  }
  return series;
}

TokenDistribution RemoteBackend::next_token_distribution(
    const BlockContext& ctx, std::span<const std::string> generated) const {
  BlockContext extended = ctx;
  extended.prefix.insert(extended.prefix.end(), generated.begin(), generated.end());
  TokenDistribution dist;
  dist.probs.resize(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    std::vector<std::string> one = {vocab_.token(static_cast<int>(i))};
    LogProbSeries series = score_target(extended, one);
    dist.probs[i] = std::exp(series.front());
  }
  return dist;
}

FillResult RemoteBackend::fill_block(const BlockContext& ctx,
                                     const SamplingParams& params) const {
  params.validate();
  nlohmann::json body;
  body["prefix"] = utf8::join(ctx.prefix);
  body["suffix"] = utf8::join(ctx.suffix);
  body["max_tokens"] = params.max_block_tokens;
  body["temperature"] = params.temperature;
  body["top_k"] = params.top_k ? nlohmann::json(*params.top_k) : nlohmann::json(nullptr);
  body["seed"] = params.seed;

  int attempts = impl_->config.fill_retries + 1;
  std::chrono::milliseconds backoff = impl_->config.retry_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      nlohmann::json res = impl_->post("/v1/generate", body);
      FillResult out;
      out.tokens = utf8::split(res.at("tokens").get<std::string>());
      out.logprobs = res.at("logprobs").get<LogProbSeries>();
      if (out.tokens.size() != out.logprobs.size()) {
        throw TransportError("/v1/generate token and logprob counts disagree");
      }
      return out;
    } catch (const TransportError&) {
      if (attempt >= attempts) throw;
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
}

}  // namespace bipro
