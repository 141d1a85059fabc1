#include "record_json.hpp"

#include "fedqa/error.hpp"

namespace fedqa::detail {

ordered_json record_to_json(const taxonomy::ScholarlyRecord& r) {
  ordered_json j;
  j["facet"] = taxonomy::to_string(r.facet);
  j["title"] = r.title;
  j["authors"] = r.authors;
  j["date_published"] = r.date_published ? ordered_json(r.date_published->year_only
                                                            ? r.date_published->iso().substr(0, 4)
                                                            : r.date_published->iso())
                                         : ordered_json(nullptr);
  j["doi"] = r.doi ? ordered_json(*r.doi) : ordered_json(nullptr);
  j["url"] = r.url ? ordered_json(*r.url) : ordered_json(nullptr);
  j["abstract"] = r.abstract ? ordered_json(*r.abstract) : ordered_json(nullptr);
  j["sources"] = r.source_ids;
  j["type_label"] = r.type_label ? ordered_json(*r.type_label) : ordered_json(nullptr);
  ordered_json extras = ordered_json::object();
  for (const auto& [k, v] : r.extras) {
    if (const auto* s = std::get_if<std::string>(&v)) {
      extras[k] = *s;
    } else {
      extras[k] = std::get<std::vector<std::string>>(v);
    }
  }
  j["extras"] = std::move(extras);
  return j;
}

taxonomy::ScholarlyRecord record_from_json(const nlohmann::json& j) {
  try {
    taxonomy::ScholarlyRecord r;
    const auto facet = taxonomy::facet_from_string(j.at("facet").get<std::string>());
    if (!facet) throw Error(ErrorCode::kParseError, "unknown facet in stored record");
    r.facet = *facet;
    r.title = j.at("title").get<std::string>();
    r.authors = j.value("authors", std::vector<std::string>{});
    auto opt = [&](const char* key) -> std::optional<std::string> {
      if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
      return j.at(key).get<std::string>();
    };
    if (auto d = opt("date_published")) r.date_published = taxonomy::parse_date(*d);
    r.doi = opt("doi");
    r.url = opt("url");
    r.abstract = opt("abstract");
    r.type_label = opt("type_label");
    for (const auto& s : j.value("sources", std::vector<std::string>{})) r.source_ids.insert(s);
    if (j.contains("extras")) {
      for (const auto& [k, v] : j.at("extras").items()) {
        if (v.is_array()) {
          r.extras[k] = v.get<std::vector<std::string>>();
        } else {
          r.extras[k] = v.get<std::string>();
        }
      }
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad stored record: ") + e.what());
  }
}

}  // namespace fedqa::detail
