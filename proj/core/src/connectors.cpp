#include "fedqa/connectors.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <json.hpp>
#include <map>

#include "fedqa/error.hpp"
#include "fedqa/json_io.hpp"
#include "fedqa/text.hpp"
#include "http.hpp"

namespace fedqa::federation {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string scalar_text(const ordered_json& value) {
  return value.is_string() ? value.get<std::string>() : value.dump();
}

std::vector<std::string> string_list(const ordered_json& array) {
  std::vector<std::string> out;
  out.reserve(array.size());
  for (const auto& element : array) out.push_back(scalar_text(element));
  return out;
}

bool field_matches(const FieldValue& value, std::string_view query) {
  if (const auto* s = std::get_if<std::string>(&value)) return text::contains_icase(*s, query);
  const auto& list = std::get<std::vector<std::string>>(value);
  return std::any_of(list.begin(), list.end(), [&](const std::string& s) { return text::contains_icase(s, query); });
}

ordered_json parse_body(std::string_view body, std::string_view adapter) {
  try {
    return ordered_json::parse(body);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string(adapter) + " payload is not valid JSON: " + e.what());
  }
}

const ordered_json* path(const ordered_json& root, std::initializer_list<const char*> keys) {
  const ordered_json* node = &root;
  for (const char* key : keys) {
    if (!node->is_object()) return nullptr;
    const auto it = node->find(key);
    if (it == node->end() || it->is_null()) return nullptr;
    node = &*it;
  }
  return node;
}

void put_scalar(NativeFields& fields, std::string name, const ordered_json* value) {
  if (value != nullptr && !value->is_null()) fields.emplace_back(std::move(name), scalar_text(*value));
}

SourceRecord make_record(const std::string& source_id, NativeFields fields) {
  return SourceRecord{source_id, std::move(fields), std::chrono::system_clock::now()};
}

}  // namespace

NativeFields parse_native_object(std::string_view json_object) {
  const auto root = parse_body(json_object, "fixture");
  if (!root.is_object()) throw Error(ErrorCode::kParseError, "fixture record must be a JSON object");
  NativeFields fields;
  for (const auto& [key, value] : root.items()) {
    if (value.is_null()) continue;
    if (value.is_array()) {
      fields.emplace_back(key, string_list(value));
    } else {
      fields.emplace_back(key, scalar_text(value));
    }
  }
  return fields;
}

// ---------------------------------------------------------------- fixture

FixtureConnector::FixtureConnector(std::string source_id, std::filesystem::path directory, Seconds delay)
    : source_id_(std::move(source_id)), directory_(std::move(directory)), delay_(delay) {}

std::vector<SourceRecord> FixtureConnector::load_all() const {
  std::error_code ec;
  if (!std::filesystem::is_directory(directory_, ec)) {
    throw Error(ErrorCode::kIoError, "fixture directory not found: " + directory_.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SourceRecord> records;
  records.reserve(files.size());
  for (const auto& file : files) {
    try {
      records.push_back(make_record(source_id_, parse_native_object(io::read_file(file))));
    } catch (const Error& e) {
      throw Error(e.code(), file.filename().string() + ": " + e.what());
    }
  }
  return records;
}

std::vector<SourceRecord> FixtureConnector::fetch(const std::string& query, std::stop_token stop) {
  if (delay_.count() > 0) {
    std::mutex mutex;
    std::condition_variable_any cv;
    std::unique_lock lock(mutex);
    cv.wait_for(lock, stop, delay_, [] { return false; });
    if (stop.stop_requested()) throw Error(ErrorCode::kProviderFailure, "fetch cancelled");
  }
  auto records = load_all();
  std::erase_if(records, [&](const SourceRecord& record) {
    return std::none_of(record.native_fields.begin(), record.native_fields.end(),
                        [&](const auto& field) { return field_matches(field.second, query); });
  });
  return records;
}

// ---------------------------------------------------------------- remote

RemoteAdapter::RemoteAdapter(SourceDescriptor descriptor) : descriptor_(std::move(descriptor)) {
  http::parse_url(descriptor_.endpoint);  // fail at registration, not at first search
}

std::vector<SourceRecord> RemoteAdapter::fetch(const std::string& query, std::stop_token) {
  http::Headers headers{{"Accept", "application/json"}};
  if (!descriptor_.token_env.empty()) {
    if (const char* token = std::getenv(descriptor_.token_env.c_str()); token != nullptr && *token != '\0') {
      headers.emplace_back("Authorization", std::string("Bearer ") + token);
    }
  }
  const auto url = http::parse_url(descriptor_.endpoint);
  const auto response = http::get(url, request_params(query), headers, descriptor_.timeout);
  if (response.status != 200) {
    throw Error(ErrorCode::kProviderFailure,
                "HTTP " + std::to_string(response.status) + " from " + descriptor_.id);
  }
  return parse_payload(response.body);
}

std::vector<std::pair<std::string, std::string>> DblpAdapter::request_params(const std::string& query) const {
  return {{"q", query}, {"format", "json"}, {"h", std::to_string(descriptor().max_results)}};
}

std::vector<SourceRecord> DblpAdapter::parse_payload(std::string_view body) const {
  const auto root = parse_body(body, "dblp");
  std::vector<SourceRecord> records;
  const auto* hits = path(root, {"result", "hits", "hit"});
  if (hits == nullptr) return records;
  if (!hits->is_array()) throw Error(ErrorCode::kParseError, "dblp hits must be an array");
  for (const auto& hit : *hits) {
    const auto* info = path(hit, {"info"});
    if (info == nullptr) continue;
    NativeFields fields;
    put_scalar(fields, "title", path(*info, {"title"}));
    if (const auto* author = path(*info, {"authors", "author"})) {
      std::vector<std::string> names;
      auto add = [&](const ordered_json& a) {
        names.push_back(a.is_object() && a.contains("text") ? scalar_text(a.at("text")) : scalar_text(a));
      };
      if (author->is_array()) {
        for (const auto& a : *author) add(a);
      } else {
        add(*author);
      }
      fields.emplace_back("authors", std::move(names));
    }
    for (const char* key : {"venue", "year", "type", "doi", "ee", "url", "key", "volume", "number", "pages", "access"}) {
      const auto* value = path(*info, {key});
      if (value != nullptr && value->is_array()) {
        fields.emplace_back(key, string_list(*value));
      } else {
        put_scalar(fields, key, value);
      }
    }
    records.push_back(make_record(descriptor().id, std::move(fields)));
  }
  return records;
}

std::vector<std::pair<std::string, std::string>> OpenAlexAdapter::request_params(const std::string& query) const {
  return {{"search", query}, {"per-page", std::to_string(descriptor().max_results)}};
}

std::vector<SourceRecord> OpenAlexAdapter::parse_payload(std::string_view body) const {
  const auto root = parse_body(body, "openalex");
  std::vector<SourceRecord> records;
  const auto* results = path(root, {"results"});
  if (results == nullptr) return records;
  if (!results->is_array()) throw Error(ErrorCode::kParseError, "openalex results must be an array");
  for (const auto& work : *results) {
    NativeFields fields;
    put_scalar(fields, "id", path(work, {"id"}));
    put_scalar(fields, "doi", path(work, {"doi"}));
    const auto* title = path(work, {"title"});
    put_scalar(fields, "title", title != nullptr ? title : path(work, {"display_name"}));
    put_scalar(fields, "publication_date", path(work, {"publication_date"}));
    put_scalar(fields, "publication_year", path(work, {"publication_year"}));
    put_scalar(fields, "type", path(work, {"type"}));
    if (const auto* authorships = path(work, {"authorships"}); authorships != nullptr && authorships->is_array()) {
      std::vector<std::string> names;
      for (const auto& a : *authorships) {
        if (const auto* name = path(a, {"author", "display_name"})) names.push_back(scalar_text(*name));
      }
      fields.emplace_back("authors", std::move(names));
    }
    if (const auto* index = path(work, {"abstract_inverted_index"}); index != nullptr && index->is_object()) {
      std::map<long long, std::string> positions;
      for (const auto& [word, where] : index->items()) {
        if (!where.is_array()) continue;
        for (const auto& p : where) {
          if (p.is_number_integer()) positions[p.get<long long>()] = word;
        }
      }
      std::string abstract;
      for (const auto& [pos, word] : positions) {
        if (!abstract.empty()) abstract.push_back(' ');
        abstract += word;
      }
      if (!abstract.empty()) fields.emplace_back("abstract", std::move(abstract));
    }
    put_scalar(fields, "venue", path(work, {"primary_location", "source", "display_name"}));
    put_scalar(fields, "landing_page_url", path(work, {"primary_location", "landing_page_url"}));
    put_scalar(fields, "cited_by_count", path(work, {"cited_by_count"}));
    records.push_back(make_record(descriptor().id, std::move(fields)));
  }
  return records;
}

std::vector<std::pair<std::string, std::string>> ZenodoAdapter::request_params(const std::string& query) const {
  return {{"q", query}, {"size", std::to_string(descriptor().max_results)}};
}

std::vector<SourceRecord> ZenodoAdapter::parse_payload(std::string_view body) const {
  const auto root = parse_body(body, "zenodo");
  std::vector<SourceRecord> records;
  const auto* hits = path(root, {"hits", "hits"});
  if (hits == nullptr) return records;
  if (!hits->is_array()) throw Error(ErrorCode::kParseError, "zenodo hits must be an array");
  for (const auto& hit : *hits) {
    NativeFields fields;
    put_scalar(fields, "id", path(hit, {"id"}));
    const auto* doi = path(hit, {"doi"});
    put_scalar(fields, "doi", doi != nullptr ? doi : path(hit, {"metadata", "doi"}));
    put_scalar(fields, "title", path(hit, {"metadata", "title"}));
    put_scalar(fields, "description", path(hit, {"metadata", "description"}));
    if (const auto* creators = path(hit, {"metadata", "creators"}); creators != nullptr && creators->is_array()) {
      std::vector<std::string> names;
      for (const auto& c : *creators) {
        if (const auto* name = path(c, {"name"})) names.push_back(scalar_text(*name));
      }
      fields.emplace_back("creators", std::move(names));
    }
    put_scalar(fields, "publication_date", path(hit, {"metadata", "publication_date"}));
    put_scalar(fields, "resource_type", path(hit, {"metadata", "resource_type", "type"}));
    if (const auto* keywords = path(hit, {"metadata", "keywords"}); keywords != nullptr && keywords->is_array()) {
      fields.emplace_back("keywords", string_list(*keywords));
    }
    const auto* html = path(hit, {"links", "self_html"});
    put_scalar(fields, "url", html != nullptr ? html : path(hit, {"links", "html"}));
    records.push_back(make_record(descriptor().id, std::move(fields)));
  }
  return records;
}

std::shared_ptr<Connector> make_connector(const SourceDescriptor& descriptor) {
  std::string adapter = descriptor.adapter;
  if (adapter.empty()) adapter = descriptor.kind == SourceKind::kFixture ? "fixture" : "";
  if (adapter == "fixture") {
    return std::make_shared<FixtureConnector>(descriptor.id, descriptor.endpoint, descriptor.fixture_delay);
  }
  if (adapter == "dblp") return std::make_shared<DblpAdapter>(descriptor);
  if (adapter == "openalex") return std::make_shared<OpenAlexAdapter>(descriptor);
  if (adapter == "zenodo") return std::make_shared<ZenodoAdapter>(descriptor);
  throw Error(ErrorCode::kInvalidDescriptor, "source '" + descriptor.id + "' has unknown adapter '" + adapter + "'");
}

std::vector<std::string> adapter_field_names(std::string_view adapter) {
  if (adapter == "dblp") {
    return {"title", "authors", "venue", "year", "type", "doi", "ee", "url", "key", "volume", "number", "pages", "access"};
  }
  if (adapter == "openalex") {
    return {"id", "doi", "title", "publication_date", "publication_year", "type", "authors", "abstract",
            "venue", "landing_page_url", "cited_by_count"};
  }
  if (adapter == "zenodo") {
    return {"id", "doi", "title", "description", "creators", "publication_date", "resource_type", "keywords", "url"};
  }
  return {};
}

}  // namespace fedqa::federation
