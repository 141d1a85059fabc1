#pragma once

// Thin blocking HTTP client over cpp-httplib. Internal to the core library.

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fedqa::http {

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;  // always starts with '/'

  std::string origin() const;
};

/// Parses "scheme://host[:port][/path]". Throws Error(kInvalidConfig).
Url parse_url(std::string_view url);

struct Response {
  int status = 0;
  std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// Transport failures throw Error(kProviderFailure) carrying the transport
/// error text; HTTP error statuses are returned, not thrown.
Response get(const Url& url, const Headers& query_params, const Headers& headers,
             std::chrono::duration<double> timeout);

Response post_json(const Url& url, const std::string& body, const Headers& headers,
                   std::chrono::duration<double> timeout);

}  // namespace fedqa::http
