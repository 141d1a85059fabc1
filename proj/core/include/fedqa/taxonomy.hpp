#pragma once

// Normalization of heterogeneous source records onto a schema.org-derived
// faceted taxonomy.

#include <array>
#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "fedqa/federation.hpp"

namespace fedqa::taxonomy {

enum class Facet {
  kArticle,
  kDataset,
  kProject,
  kSoftwareApplication,
  kLearningResource,
  kMediaObject,
  kCreativeWork,
  kPerson,
  kOrganization,
};

inline constexpr std::array<Facet, 9> kAllFacets = {
    Facet::kArticle,          Facet::kDataset,     Facet::kProject,
    Facet::kSoftwareApplication, Facet::kLearningResource, Facet::kMediaObject,
    Facet::kCreativeWork,     Facet::kPerson,      Facet::kOrganization,
};

/// schema.org class name, e.g. "SoftwareApplication".
std::string_view to_string(Facet facet) noexcept;
/// Inverse of to_string, case-insensitive.
std::optional<Facet> facet_from_string(std::string_view name);
bool is_creative_work(Facet facet) noexcept;

struct PublicationDate {
  int year = 0;
  int month = 1;
  int day = 1;
  bool year_only = false;

  /// "YYYY-MM-DD" (year-only dates render as YYYY-01-01).
  std::string iso() const;

  auto operator<=>(const PublicationDate& other) const {
    return std::tie(year, month, day) <=> std::tie(other.year, other.month, other.day);
  }
  bool operator==(const PublicationDate& other) const = default;
};

/// Accepts "YYYY", "YYYY-MM", "YYYY-MM-DD" and ISO timestamps with a date
/// prefix. Year-only input sets year_only.
std::optional<PublicationDate> parse_date(std::string_view raw);

/// Lowercases, strips resolver prefixes ("https://doi.org/", "doi:" and
/// friends) and whitespace; empty when the remainder does not start "10.".
std::optional<std::string> normalize_doi(std::string_view raw);

using ExtraValue = federation::FieldValue;

struct ScholarlyRecord {
  Facet facet = Facet::kCreativeWork;
  /// Title of a creative work, or the name of a Person / Organization.
  std::string title;
  std::optional<std::string> abstract;
  std::vector<std::string> authors;
  std::optional<PublicationDate> date_published;
  std::optional<std::string> doi;  // normalized
  std::optional<std::string> url;
  std::set<std::string> source_ids;
  std::map<std::string, ExtraValue> extras;
  /// Native type label the facet was derived from, when one was present.
  std::optional<std::string> type_label;

  bool operator==(const ScholarlyRecord& other) const = default;
};

enum class CanonicalField { kTitle, kName, kAbstract, kAuthors, kDatePublished, kDoi, kUrl, kType, kExtras };

std::optional<CanonicalField> canonical_field_from_string(std::string_view name);

struct FieldMap {
  int version = 1;
  std::string source;
  std::map<std::string, CanonicalField, std::less<>> fields;  // native name -> canonical
  std::map<std::string, Facet, std::less<>> types;            // lowercase native label -> facet
  std::optional<Facet> default_facet;                         // when no type label is present

  /// Canonical names map to themselves; facet labels use the built-in table.
  static FieldMap identity();
  /// Embedded asset for a reference adapter ("fixture", "dblp", "openalex",
  /// "zenodo"); identity() for anything else.
  static FieldMap builtin(std::string_view adapter);
  static FieldMap from_json_text(std::string_view json);
  static FieldMap from_file(const std::filesystem::path& path);

  bool covers(std::string_view native_name) const { return fields.contains(native_name); }
};

/// Facet for a native type label: the map's own table, then the built-in
/// label table, then exact facet names; CreativeWork otherwise.
Facet facet_for_label(std::string_view label, const FieldMap& map);

/// Throws Error(kMappingFailure) when no native field yields a non-empty
/// title/name.
ScholarlyRecord map_record(const federation::SourceRecord& raw, const FieldMap& map);

/// Partition by facet, preserving input order within each group.
std::map<Facet, std::vector<ScholarlyRecord>> group_by_facet(const std::vector<ScholarlyRecord>& records);

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_field_maps();
}

}  // namespace fedqa::taxonomy
