#include "fedqa/taxonomy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <json.hpp>

#include "fedqa/error.hpp"
#include "fedqa/json_io.hpp"
#include "fedqa/text.hpp"

namespace fedqa::taxonomy {

using federation::FieldValue;
using json = nlohmann::json;

std::string_view to_string(Facet facet) noexcept {
  switch (facet) {
    case Facet::kArticle: return "Article";
    case Facet::kDataset: return "Dataset";
    case Facet::kProject: return "Project";
    case Facet::kSoftwareApplication: return "SoftwareApplication";
    case Facet::kLearningResource: return "LearningResource";
    case Facet::kMediaObject: return "MediaObject";
    case Facet::kCreativeWork: return "CreativeWork";
    case Facet::kPerson: return "Person";
    case Facet::kOrganization: return "Organization";
  }
  return "CreativeWork";
}

std::optional<Facet> facet_from_string(std::string_view name) {
  const std::string lowered = text::to_lower(text::trim(name));
  for (Facet f : kAllFacets) {
    if (text::to_lower(to_string(f)) == lowered) return f;
  }
  return std::nullopt;
}

bool is_creative_work(Facet facet) noexcept {
  return facet != Facet::kPerson && facet != Facet::kOrganization;
}

std::string PublicationDate::iso() const { return fmt::format("{:04d}-{:02d}-{:02d}", year, month, day); }

namespace {

bool read_digits(std::string_view s, std::size_t pos, std::size_t count, int& out) {
  if (pos + count > s.size()) return false;
  int value = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

}  // namespace

std::optional<PublicationDate> parse_date(std::string_view raw) {
  const auto s = text::trim(raw);
  PublicationDate date;
  if (!read_digits(s, 0, 4, date.year)) return std::nullopt;
  if (s.size() == 4) {
    date.year_only = true;
    return date;
  }
  auto is_sep = [](char c) { return c == '-' || c == '/'; };
  if (!is_sep(s[4]) || !read_digits(s, 5, 2, date.month) || date.month < 1 || date.month > 12) return std::nullopt;
  if (s.size() == 7) return date;
  if (!is_sep(s[7]) || !read_digits(s, 8, 2, date.day) || date.day < 1 || date.day > 31) return std::nullopt;
  if (s.size() == 10 || s[10] == 'T' || s[10] == ' ') return date;
  return std::nullopt;
}

std::optional<std::string> normalize_doi(std::string_view raw) {
  std::string doi = text::to_lower(text::trim(raw));
  static constexpr std::string_view kPrefixes[] = {
      "https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/",
      "doi.org/",         "dx.doi.org/",     "doi:",
  };
  for (bool stripped = true; stripped;) {
    stripped = false;
    for (auto prefix : kPrefixes) {
      if (doi.starts_with(prefix)) {
        doi = std::string(text::trim(std::string_view(doi).substr(prefix.size())));
        stripped = true;
      }
    }
  }
  if (!doi.starts_with("10.")) return std::nullopt;
  return doi;
}

std::optional<CanonicalField> canonical_field_from_string(std::string_view name) {
  static const std::map<std::string, CanonicalField, std::less<>> kNames = {
      {"title", CanonicalField::kTitle},   {"name", CanonicalField::kName},
      {"abstract", CanonicalField::kAbstract}, {"authors", CanonicalField::kAuthors},
      {"author", CanonicalField::kAuthors}, {"date_published", CanonicalField::kDatePublished},
      {"datePublished", CanonicalField::kDatePublished}, {"doi", CanonicalField::kDoi},
      {"url", CanonicalField::kUrl},       {"type", CanonicalField::kType},
      {"extras", CanonicalField::kExtras},
  };
  const auto it = kNames.find(name);
  if (it == kNames.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------- field maps

FieldMap FieldMap::identity() {
  FieldMap map;
  map.source = "identity";
  for (const char* name : {"title", "name", "abstract", "authors", "date_published", "doi", "url", "type"}) {
    map.fields.emplace(name, *canonical_field_from_string(name));
  }
  return map;
}

FieldMap FieldMap::from_json_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("field map is not valid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("fields") || !root.at("fields").is_object()) {
    throw Error(ErrorCode::kInvalidConfig, "field map needs a 'fields' object");
  }
  FieldMap map;
  map.version = root.value("version", 1);
  map.source = root.value("source", "");
  for (const auto& [native, canonical] : root.at("fields").items()) {
    const auto field = canonical.is_string() ? canonical_field_from_string(canonical.get<std::string>()) : std::nullopt;
    if (!field) throw Error(ErrorCode::kInvalidConfig, "field map: bad canonical name for '" + native + "'");
    map.fields.emplace(native, *field);
  }
  if (root.contains("types")) {
    for (const auto& [label, facet_name] : root.at("types").items()) {
      const auto facet = facet_name.is_string() ? facet_from_string(facet_name.get<std::string>()) : std::nullopt;
      if (!facet) throw Error(ErrorCode::kInvalidConfig, "field map: bad facet for label '" + label + "'");
      map.types.emplace(text::to_lower(label), *facet);
    }
  }
  if (root.contains("default_facet")) {
    map.default_facet = facet_from_string(root.at("default_facet").get<std::string>());
    if (!map.default_facet) throw Error(ErrorCode::kInvalidConfig, "field map: bad default_facet");
  }
  return map;
}

FieldMap FieldMap::from_file(const std::filesystem::path& path) { return from_json_text(io::read_file(path)); }

FieldMap FieldMap::builtin(std::string_view adapter) {
  for (const auto& [name, content] : detail::embedded_field_maps()) {
    if (name == adapter) return from_json_text(content);
  }
  return identity();
}

Facet facet_for_label(std::string_view label, const FieldMap& map) {
  const std::string key = text::collapse_whitespace(text::to_lower(label));
  if (const auto it = map.types.find(key); it != map.types.end()) return it->second;

  static const std::map<std::string, Facet, std::less<>> kCommon = {
      {"article", Facet::kArticle},
      {"journal article", Facet::kArticle},
      {"journal-article", Facet::kArticle},
      {"scholarlyarticle", Facet::kArticle},
      {"proceedings-article", Facet::kArticle},
      {"conference paper", Facet::kArticle},
      {"paper", Facet::kArticle},
      {"preprint", Facet::kArticle},
      {"publication", Facet::kArticle},
      {"dataset", Facet::kDataset},
      {"data set", Facet::kDataset},
      {"corpus", Facet::kDataset},
      {"data", Facet::kDataset},
      {"project", Facet::kProject},
      {"research project", Facet::kProject},
      {"grant", Facet::kProject},
      {"software", Facet::kSoftwareApplication},
      {"software application", Facet::kSoftwareApplication},
      {"code", Facet::kSoftwareApplication},
      {"tool", Facet::kSoftwareApplication},
      {"learning resource", Facet::kLearningResource},
      {"lesson", Facet::kLearningResource},
      {"course", Facet::kLearningResource},
      {"tutorial", Facet::kLearningResource},
      {"media", Facet::kMediaObject},
      {"media object", Facet::kMediaObject},
      {"video", Facet::kMediaObject},
      {"image", Facet::kMediaObject},
      {"audio", Facet::kMediaObject},
      {"presentation", Facet::kMediaObject},
      {"poster", Facet::kMediaObject},
      {"person", Facet::kPerson},
      {"author", Facet::kPerson},
      {"researcher", Facet::kPerson},
      {"organization", Facet::kOrganization},
      {"organisation", Facet::kOrganization},
      {"institution", Facet::kOrganization},
  };
  if (const auto it = kCommon.find(key); it != kCommon.end()) return it->second;
  return facet_from_string(key).value_or(Facet::kCreativeWork);
}

// ---------------------------------------------------------------- mapping

namespace {

void put_extra(ScholarlyRecord& record, const std::string& key, const FieldValue& value) {
  std::string slot = key;
  for (int n = 2; record.extras.contains(slot); ++n) slot = key + "#" + std::to_string(n);
  record.extras.emplace(std::move(slot), value);
}

const std::string* as_string(const FieldValue& value) { return std::get_if<std::string>(&value); }

}  // namespace

ScholarlyRecord map_record(const federation::SourceRecord& raw, const FieldMap& map) {
  ScholarlyRecord record;
  record.source_ids.insert(raw.source_id);
  bool have_title = false;

  for (const auto& [key, value] : raw.native_fields) {
    const auto it = map.fields.find(key);
    const CanonicalField target = it == map.fields.end() ? CanonicalField::kExtras : it->second;
    const std::string* s = as_string(value);
    bool consumed = false;

    switch (target) {
      case CanonicalField::kTitle:
      case CanonicalField::kName:
        if (!have_title && s != nullptr && !text::trim(*s).empty()) {
          record.title = *s;
          have_title = true;
          consumed = true;
        }
        break;
      case CanonicalField::kAbstract:
        if (!record.abstract && s != nullptr && !text::trim(*s).empty()) {
          record.abstract = *s;
          consumed = true;
        }
        break;
      case CanonicalField::kAuthors:
        if (record.authors.empty()) {
          if (s != nullptr && !text::trim(*s).empty()) {
            record.authors.push_back(*s);
            consumed = true;
          } else if (const auto* list = std::get_if<std::vector<std::string>>(&value);
                     list != nullptr && !list->empty() &&
                     std::none_of(list->begin(), list->end(), [](const auto& n) { return text::trim(n).empty(); })) {
            record.authors = *list;
            consumed = true;
          }
        }
        break;
      case CanonicalField::kDatePublished:
        if (!record.date_published && s != nullptr) {
          if (auto date = parse_date(*s)) {
            record.date_published = *date;
            consumed = true;
          }
        }
        break;
      case CanonicalField::kDoi:
        if (!record.doi && s != nullptr) {
          if (auto doi = normalize_doi(*s)) {
            record.doi = std::move(*doi);
            consumed = true;
          }
        }
        break;
      case CanonicalField::kUrl:
        if (!record.url && s != nullptr && !text::trim(*s).empty()) {
          record.url = *s;
          consumed = true;
        }
        break;
      case CanonicalField::kType:
        if (!record.type_label && s != nullptr && !text::trim(*s).empty()) {
          record.type_label = *s;
          consumed = true;
        }
        break;
      case CanonicalField::kExtras:
        break;
    }
    if (!consumed) put_extra(record, key, value);
  }

  if (record.type_label) {
    record.facet = facet_for_label(*record.type_label, map);
  } else {
    record.facet = map.default_facet.value_or(Facet::kCreativeWork);
  }
  if (!have_title) {
    throw Error(ErrorCode::kMappingFailure,
                fmt::format("record from '{}' has no usable {} field", raw.source_id,
                            is_creative_work(record.facet) ? "title" : "name"));
  }
  return record;
}

std::map<Facet, std::vector<ScholarlyRecord>> group_by_facet(const std::vector<ScholarlyRecord>& records) {
  std::map<Facet, std::vector<ScholarlyRecord>> groups;
  for (const auto& record : records) groups[record.facet].push_back(record);
  return groups;
}

}  // namespace fedqa::taxonomy
