#include "fedqa/api_server.hpp"

#include <spdlog/spdlog.h>

#include <httplib.h>
#include <json.hpp>
#include <thread>

#include "fedqa/error.hpp"
#include "record_json.hpp"

namespace fedqa::api {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int http_status_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kEmptyQuery:
    case ErrorCode::kEmptyQuestion:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
      return 400;
    case ErrorCode::kSessionNotFound:
      return 404;
    case ErrorCode::kPromptTooLarge:
      return 413;
    case ErrorCode::kProviderFailure:
      return 502;
    case ErrorCode::kNoSourcesEnabled:
      return 503;
    default:
      return 500;
  }
}

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  ordered_json body;
  body["code"] = code;
  body["message"] = message;
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const Error& e) {
  send_error(res, http_status_for(e.code()), code_name(e.code()), e.what());
}

json parse_body(const httplib::Request& req) {
  try {
    auto j = json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::kParseError, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("request body is not JSON: ") + e.what());
  }
}

std::string string_field(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  if (!j.at(key).is_string()) throw Error(ErrorCode::kParseError, std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

ordered_json search_json(const gateway::SearchResult& r) {
  ordered_json j;
  j["session_id"] = r.session_id;
  j["query"] = r.query;
  ordered_json groups = ordered_json::object();
  for (const auto& g : r.groups) {
    ordered_json list = ordered_json::array();
    for (const auto& rec : g.records) {
      auto item = detail::record_to_json(rec.record);
      item["score"] = rec.score;
      list.push_back(std::move(item));
    }
    groups[std::string(taxonomy::to_string(g.facet))] = std::move(list);
  }
  j["groups"] = std::move(groups);
  ordered_json sources = ordered_json::array();
  for (const auto& s : r.sources) {
    ordered_json src;
    src["id"] = s.id;
    src["status"] = federation::to_string(s.status);
    src["message"] = s.message;
    src["records"] = s.records;
    src["latency_seconds"] = s.latency_seconds;
    sources.push_back(std::move(src));
  }
  j["sources"] = std::move(sources);
  j["latency_seconds"] = r.latency_seconds;
  j["total_records"] = r.total_records;
  j["unique_records"] = r.unique_records;
  j["mapping_failures"] = r.mapping_failures;
  return j;
}

}  // namespace

struct ApiServer::Impl {
  gateway::Gateway& gateway;
  httplib::Server server;
  std::thread worker;

  explicit Impl(gateway::Gateway& g) : gateway(g) { install(); }

  template <typename Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      spdlog::error("unhandled error: {}", e.what());
      send_error(res, 500, "internal", e.what());
    }
  }

  void install() {
    server.Post("/search", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        const auto result = gateway.search(string_field(body, "query"));
        res.set_content(search_json(result).dump(), kJson);
      });
    });

    server.Post("/chat", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        const auto session_id = string_field(body, "session_id");
        const auto result = gateway.chat(session_id, string_field(body, "question"));
        ordered_json j;
        j["answer"] = result.answer;
        ordered_json supporting = ordered_json::array();
        for (const auto& d : result.supporting) {
          supporting.push_back({{"doc_id", d.doc_id}, {"title", d.title}, {"sources", d.sources}});
        }
        j["supporting"] = std::move(supporting);
        j["history_len"] = result.history_len;
        res.set_content(j.dump(), kJson);
      });
    });

    server.Get(R"(/sessions/([^/]+)/history)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        ordered_json turns = ordered_json::array();
        for (const auto& t : gateway.history(req.matches[1].str())) {
          ordered_json turn;
          turn["question"] = t.question;
          turn["answer"] = t.answer;
          turn["ts"] = std::chrono::duration<double>(t.asked_at.time_since_epoch()).count();
          turns.push_back(std::move(turn));
        }
        res.set_content(turns.dump(), kJson);
      });
    });

    server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        const auto h = gateway.health();
        ordered_json j;
        j["status"] = h.status;
        j["sources"] = h.sources;
        res.set_content(j.dump(), kJson);
      });
    });

    if (const auto& dir = gateway.config().static_dir; dir && std::filesystem::is_directory(*dir)) {
      server.set_mount_point("/", dir->string());
    }
  }
};

ApiServer::ApiServer(gateway::Gateway& gateway) : impl_(std::make_unique<Impl>(gateway)) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void ApiServer::serve() { impl_->server.listen_after_bind(); }

int ApiServer::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  impl_->worker = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace fedqa::api
