#include "http.hpp"

#include <httplib.h>

#include <charconv>

#include "fedqa/error.hpp"

namespace fedqa::http {
namespace {

void configure(httplib::Client& client, std::chrono::duration<double> timeout) {
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  const auto secs = static_cast<time_t>(micros.count() / 1'000'000);
  const auto usecs = static_cast<time_t>(micros.count() % 1'000'000);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_follow_location(true);
}

httplib::Headers to_headers(const Headers& headers) {
  httplib::Headers out;
  for (const auto& [key, value] : headers) out.emplace(key, value);
  return out;
}

Response unwrap(const httplib::Result& result, const Url& url) {
  if (!result) {
    throw Error(ErrorCode::kProviderFailure,
                "request to " + url.origin() + url.path + " failed: " + httplib::to_string(result.error()));
  }
  return Response{result->status, result->body};
}

}  // namespace

std::string Url::origin() const {
  return scheme + "://" + host + ":" + std::to_string(port);
}

Url parse_url(std::string_view url) {
  Url out;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidConfig, "URL lacks a scheme: " + std::string(url));
  }
  out.scheme = std::string(url.substr(0, scheme_end));
  if (out.scheme != "http" && out.scheme != "https") {
    throw Error(ErrorCode::kInvalidConfig, "unsupported URL scheme: " + out.scheme);
  }
  std::string_view rest = url.substr(scheme_end + 3);
  const auto path_start = rest.find('/');
  std::string_view authority = rest.substr(0, path_start);
  out.path = path_start == std::string_view::npos ? "/" : std::string(rest.substr(path_start));
  out.port = out.scheme == "https" ? 443 : 80;
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    const auto port_text = authority.substr(colon + 1);
    int port = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port <= 0 || port > 65535) {
      throw Error(ErrorCode::kInvalidConfig, "bad port in URL: " + std::string(url));
    }
    out.port = port;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw Error(ErrorCode::kInvalidConfig, "URL lacks a host: " + std::string(url));
  out.host = std::string(authority);
  return out;
}

Response get(const Url& url, const Headers& query_params, const Headers& headers,
             std::chrono::duration<double> timeout) {
  httplib::Client client(url.origin());
  configure(client, timeout);
  httplib::Params params;
  for (const auto& [key, value] : query_params) params.emplace(key, value);
  return unwrap(client.Get(url.path, params, to_headers(headers)), url);
}

Response post_json(const Url& url, const std::string& body, const Headers& headers,
                   std::chrono::duration<double> timeout) {
  httplib::Client client(url.origin());
  configure(client, timeout);
  return unwrap(client.Post(url.path, to_headers(headers), body, "application/json"), url);
}

}  // namespace fedqa::http
