#pragma once

#include <memory>
#include <string>

#include "fedqa/error.hpp"
#include "fedqa/gateway.hpp"

namespace fedqa::api {

/// HTTP status for an error code (400/404/413/502/503, 500 otherwise).
int http_status_for(ErrorCode code) noexcept;

/// JSON API over a Gateway:
///   POST /search {query}
///   POST /chat {session_id, question}
///   GET  /sessions/{id}/history
///   GET  /health
/// Error bodies are {"code": "...", "message": "..."}. When the gateway
/// config names a static_dir it is served under "/".
class ApiServer {
 public:
  explicit ApiServer(gateway::Gateway& gateway);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop(). Requires bind().
  void serve();
  /// bind() + serve() on a background thread; returns the bound port.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fedqa::api
