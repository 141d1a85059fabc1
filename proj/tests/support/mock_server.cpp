#include "mock_server.hpp"

#include <httplib.h>

#include <mutex>
#include <stdexcept>
#include <thread>

namespace fedqa::testing {

struct MockServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  MockHandler handler;
  mutable std::mutex mutex;
  std::size_t hits = 0;
  MockRequest last;
};

MockServer::MockServer(MockHandler handler) : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  auto serve = [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
    MockRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.params[k] = v;
    for (const auto& [k, v] : req.headers) r.headers[k] = v;
    r.body = req.body;
    {
      std::lock_guard lock(impl->mutex);
      ++impl->hits;
      impl->last = r;
    }
    const auto out = impl->handler(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  impl_->server.Get(".*", serve);
  impl_->server.Post(".*", serve);
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  if (impl_->port <= 0) throw std::runtime_error("mock server could not bind");
  impl_->thread = std::thread([impl = impl_.get()] { impl->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockServer::~MockServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int MockServer::port() const noexcept { return impl_->port; }

std::string MockServer::url(const std::string& path) const {
  return "http://127.0.0.1:" + std::to_string(impl_->port) + path;
}

std::size_t MockServer::hits() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->hits;
}

MockRequest MockServer::last_request() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->last;
}

HttpResult http_get(int port, const std::string& path) {
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(30, 0);
  auto res = client.Get(path);
  if (!res) return {0, httplib::to_string(res.error())};
  return {res->status, res->body};
}

HttpResult http_post(int port, const std::string& path, const std::string& json_body) {
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(30, 0);
  auto res = client.Post(path, json_body, "application/json");
  if (!res) return {0, httplib::to_string(res.error())};
  return {res->status, res->body};
}

}  // namespace fedqa::testing
