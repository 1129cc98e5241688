#include "bipro/model_server.h"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bipro/errors.h"
#include "bipro/utf8.h"

namespace bipro {
namespace {

void write_error(httplib::Response& res, int status, const std::string& kind,
                 const std::string& message) {
  nlohmann::json j;
  j["kind"] = kind;
  j["error"] = message;
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

// Maps library exceptions onto the wire's {kind, error} envelope.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const VocabularyError& e) {
    write_error(res, 400, "vocabulary", e.what());
  } catch (const ContextError& e) {
    write_error(res, 400, "context", e.what());
  } catch (const ParseError& e) {
    write_error(res, 400, "bad_request", e.what());
  } catch (const Error& e) {
    write_error(res, 400, "bad_request", e.what());
  } catch (const std::exception& e) {
    write_error(res, 500, "internal", e.what());
  }
}

}  // namespace

struct ModelServer::Impl {
  const ModelBackend& backend;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit Impl(const ModelBackend& b) : backend(b) {
    server.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        nlohmann::json body = nlohmann::json::parse(req.body);
        BlockContext ctx = BlockContext::from_strings(body.at("prefix").get<std::string>(),
                                                      body.at("suffix").get<std::string>());
        std::vector<std::string> target = utf8::split(body.at("target").get<std::string>());
        LogProbSeries series = backend.score_target(ctx, target);
        nlohmann::json out;
        out["logprobs"] = series;
        res.set_content(out.dump(), "application/json");
      });
    });
    server.Post("/v1/generate", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        nlohmann::json body = nlohmann::json::parse(req.body);
        BlockContext ctx = BlockContext::from_strings(body.at("prefix").get<std::string>(),
                                                      body.at("suffix").get<std::string>());
        SamplingParams params;
        params.max_block_tokens = body.at("max_tokens").get<int>();
        params.temperature = body.value("temperature", 1.0);
        if (body.contains("top_k") && !body["top_k"].is_null()) {
          params.top_k = body["top_k"].get<int>();
        }
        params.seed = body.value("seed", std::uint64_t{0});
        FillResult fill = backend.fill_block(ctx, params);
        nlohmann::json out;
        out["tokens"] = utf8::join(fill.tokens);
        out["logprobs"] = fill.logprobs;
        res.set_content(out.dump(), "application/json");
      });
    });
  }
};

ModelServer::ModelServer(const ModelBackend& backend) : impl_(std::make_unique<Impl>(backend)) {}

ModelServer::~ModelServer() { stop(); }

int ModelServer::start() {
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  if (impl_->port <= 0) throw TransportError("could not bind a local port");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void ModelServer::stop() {
  if (impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

std::string ModelServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

}  // namespace bipro
