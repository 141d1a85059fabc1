#include "fedqa/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "fedqa/error.hpp"
#include "fedqa/text.hpp"

namespace fedqa::dedup {

using taxonomy::Facet;

void SimilarityWeights::validate() const {
  for (double w : {title, authors, abstract, date}) {
    if (!(w >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "similarity weights must be nonnegative");
  }
  if (std::abs(title + authors + abstract + date - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidConfig, "similarity weights must sum to 1");
  }
  if (!(merge_threshold > 0.0 && merge_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "merge threshold must lie in (0, 1]");
  }
}

std::string normalized_title(std::string_view title) { return text::join(text::tokenize(title), " "); }

std::string author_key(std::string_view name) {
  std::string reordered(name);
  // "Last, First" -> "First Last"
  if (const auto comma = reordered.find(','); comma != std::string::npos) {
    reordered = reordered.substr(comma + 1) + " " + reordered.substr(0, comma);
  }
  const auto tokens = text::tokenize(reordered);
  if (tokens.empty()) return {};
  if (tokens.size() == 1) return tokens.front();
  const std::string initial(text::utf8_prefix(tokens.front(), 1));
  return initial + " " + tokens.back();
}

namespace {

template <typename T>
double jaccard(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t shared = 0;
  for (const auto& x : a) shared += b.count(x);
  const std::size_t total = a.size() + b.size() - shared;
  return total == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(total);
}

std::set<std::u32string> trigrams(std::string_view title) {
  const auto cps = text::to_code_points(normalized_title(title));
  std::set<std::u32string> grams;
  if (cps.empty()) return grams;
  if (cps.size() < 3) {
    grams.insert(cps);
    return grams;
  }
  for (std::size_t i = 0; i + 3 <= cps.size(); ++i) grams.insert(cps.substr(i, 3));
  return grams;
}

std::set<std::string> author_keys(const std::vector<std::string>& authors) {
  std::set<std::string> keys;
  for (const auto& a : authors) {
    if (auto key = author_key(a); !key.empty()) keys.insert(std::move(key));
  }
  return keys;
}

std::set<std::string> token_set(std::string_view s) {
  auto tokens = text::tokenize(s);
  return {std::make_move_iterator(tokens.begin()), std::make_move_iterator(tokens.end())};
}

double title_similarity(const ScholarlyRecord& a, const ScholarlyRecord& b) {
  const auto ga = trigrams(a.title);
  const auto gb = trigrams(b.title);
  if (ga.empty() || gb.empty()) {
    return (ga.empty() && gb.empty() && text::trim(a.title) == text::trim(b.title)) ? 1.0 : 0.0;
  }
  return jaccard(ga, gb);
}

}  // namespace

double pair_similarity(const ScholarlyRecord& a, const ScholarlyRecord& b, const SimilarityWeights& weights) {
  if (a.facet != b.facet) return 0.0;
  if (a.doi && b.doi && *a.doi == *b.doi) return 1.0;

  double weighted = weights.title * title_similarity(a, b);
  double total_weight = weights.title;

  const auto keys_a = author_keys(a.authors);
  const auto keys_b = author_keys(b.authors);
  if (!keys_a.empty() && !keys_b.empty()) {
    weighted += weights.authors * jaccard(keys_a, keys_b);
    total_weight += weights.authors;
  }
  if (a.abstract && b.abstract) {
    weighted += weights.abstract * jaccard(token_set(*a.abstract), token_set(*b.abstract));
    total_weight += weights.abstract;
  }
  if (a.date_published && b.date_published) {
    weighted += weights.date * (a.date_published->year == b.date_published->year ? 1.0 : 0.0);
    total_weight += weights.date;
  }

  double score = total_weight > 0.0 ? weighted / total_weight : 0.0;
  score = std::clamp(score, 0.0, 1.0);
  if (a.doi && b.doi) score = std::min(score, 0.5);
  return score;
}

std::vector<IndexPair> candidate_pairs(const std::vector<ScholarlyRecord>& records) {
  std::map<std::pair<Facet, std::string>, std::vector<std::size_t>> title_blocks;
  std::map<std::string, std::vector<std::size_t>> doi_blocks;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto norm = normalized_title(records[i].title);
    title_blocks[{records[i].facet, std::string(text::utf8_prefix(norm, 4))}].push_back(i);
    if (records[i].doi) doi_blocks[*records[i].doi].push_back(i);
  }
  std::set<IndexPair> pairs;
  auto emit = [&](const std::vector<std::size_t>& block) {
    for (std::size_t x = 0; x < block.size(); ++x) {
      for (std::size_t y = x + 1; y < block.size(); ++y) pairs.emplace(block[x], block[y]);
    }
  };
  for (const auto& [key, block] : title_blocks) emit(block);
  for (const auto& [key, block] : doi_blocks) emit(block);
  return {pairs.begin(), pairs.end()};
}

std::vector<ScoredPair> score_pairs(const std::vector<ScholarlyRecord>& records, const std::vector<IndexPair>& pairs,
                                    const SimilarityWeights& weights) {
  std::vector<ScoredPair> scored;
  scored.reserve(pairs.size());
  for (const auto& [i, j] : pairs) scored.push_back({i, j, pair_similarity(records.at(i), records.at(j), weights)});
  return scored;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller root wins so roots are stable under pair order.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string extras_signature(const ScholarlyRecord& r) {
  std::string out;
  for (const auto& [key, value] : r.extras) {
    out += key;
    out.push_back('\x1f');
    if (const auto* s = std::get_if<std::string>(&value)) {
      out += *s;
    } else {
      for (const auto& item : std::get<std::vector<std::string>>(value)) {
        out += item;
        out.push_back('\x1e');
      }
    }
    out.push_back('\x1d');
  }
  return out;
}

// Total order on records so merge results do not depend on input order:
// first source id, then title, then every remaining field.
auto canonical_key(const ScholarlyRecord& r) {
  const std::string first_source = r.source_ids.empty() ? std::string() : *r.source_ids.begin();
  const auto date = r.date_published.value_or(taxonomy::PublicationDate{});
  return std::make_tuple(first_source, r.title, r.source_ids, r.abstract, r.authors, r.doi, r.url, r.type_label,
                         r.date_published.has_value(), date.year, date.month, date.day, date.year_only,
                         extras_signature(r));
}

bool canonical_less(const ScholarlyRecord& a, const ScholarlyRecord& b) { return canonical_key(a) < canonical_key(b); }

}  // namespace

ScholarlyRecord merge_cluster(std::vector<ScholarlyRecord> members) {
  if (members.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot merge an empty cluster");
  const Facet facet = members.front().facet;
  for (const auto& m : members) {
    if (m.facet != facet) throw Error(ErrorCode::kMixedFacetCluster, "cluster mixes facets");
  }
  std::sort(members.begin(), members.end(), canonical_less);

  ScholarlyRecord merged = members.front();
  std::set<std::string> seen_authors = author_keys(merged.authors);
  for (std::size_t i = 1; i < members.size(); ++i) {
    const auto& m = members[i];
    if (text::utf8_length(m.title) > text::utf8_length(merged.title)) merged.title = m.title;
    if (m.abstract && (!merged.abstract || text::utf8_length(*m.abstract) > text::utf8_length(*merged.abstract))) {
      merged.abstract = m.abstract;
    }
    for (const auto& name : m.authors) {
      const auto key = author_key(name);
      if (seen_authors.insert(key).second) merged.authors.push_back(name);
    }
    if (m.doi && (!merged.doi || *m.doi < *merged.doi)) merged.doi = m.doi;
    if (m.date_published && (!merged.date_published || *m.date_published < *merged.date_published)) {
      merged.date_published = m.date_published;
    }
    if (!merged.url) merged.url = m.url;
    if (!merged.type_label) merged.type_label = m.type_label;
    merged.source_ids.insert(m.source_ids.begin(), m.source_ids.end());
    for (const auto& [key, value] : m.extras) merged.extras.emplace(key, value);
  }
  return merged;
}

std::vector<DuplicateCluster> cluster(const std::vector<ScholarlyRecord>& records, const std::vector<ScoredPair>& pairs,
                                      double threshold) {
  DisjointSets sets(records.size());
  for (const auto& p : pairs) {
    if (p.score >= threshold) sets.unite(p.first, p.second);
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) groups[sets.find(i)].push_back(i);

  std::vector<DuplicateCluster> clusters;
  clusters.reserve(groups.size());
  for (auto& [root, members] : groups) {
    std::vector<ScholarlyRecord> member_records;
    member_records.reserve(members.size());
    for (std::size_t idx : members) member_records.push_back(records[idx]);
    clusters.push_back({std::move(members), merge_cluster(std::move(member_records))});
  }
  return clusters;
}

std::vector<ScholarlyRecord> DedupResult::records() const {
  std::vector<ScholarlyRecord> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back(c.representative);
  return out;
}

DedupResult deduplicate(const std::vector<ScholarlyRecord>& records, const SimilarityWeights& weights) {
  weights.validate();
  const auto pairs = score_pairs(records, candidate_pairs(records), weights);
  return DedupResult{cluster(records, pairs, weights.merge_threshold)};
}

}  // namespace fedqa::dedup
