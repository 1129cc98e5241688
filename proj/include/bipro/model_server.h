#ifndef BIPRO_MODEL_SERVER_H_
#define BIPRO_MODEL_SERVER_H_

#include <memory>
#include <string>

#include "bipro/model_backend.h"

namespace bipro {

/// Serves any ModelBackend over the wire protocol RemoteBackend speaks
/// (POST /v1/score, POST /v1/generate). Runs on a background thread; used by
/// the conformance tests and available for wiring a real model process in
/// front of this framework.
class ModelServer {
 public:
  explicit ModelServer(const ModelBackend& backend);
  ~ModelServer();

  ModelServer(const ModelServer&) = delete;
  ModelServer& operator=(const ModelServer&) = delete;

  /// Binds 127.0.0.1 on a free port and starts serving; returns the port.
  int start();
  void stop();

  std::string base_url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bipro

#endif  // BIPRO_MODEL_SERVER_H_
