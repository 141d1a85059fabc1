#pragma once

// Deterministic entity resolution: attribute-wise similarity, blocking,
// union-find clustering over a similarity threshold and field merge.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedqa/taxonomy.hpp"

namespace fedqa::dedup {

using taxonomy::ScholarlyRecord;

struct SimilarityWeights {
  double title = 0.45;
  double authors = 0.25;
  double abstract = 0.20;
  double date = 0.10;
  double merge_threshold = 0.85;

  /// Throws Error(kInvalidConfig): weights must be nonnegative and sum to 1
  /// within 1e-9, threshold must lie in (0, 1].
  void validate() const;
};

/// Lowercased tokens joined by single spaces.
std::string normalized_title(std::string_view title);

/// Name key used for author comparison: "Smith, Alice", "Alice Smith" and
/// "A. Smith" all map to "a smith".
std::string author_key(std::string_view name);

/// Symmetric score in [0, 1]. Equal normalized DOIs short-circuit to 1;
/// unequal DOIs cap the score at 0.5. Components missing on either side
/// (authors, abstract, date) drop out and their weight is redistributed
/// proportionally over the remaining ones. Cross-facet pairs score 0.
double pair_similarity(const ScholarlyRecord& a, const ScholarlyRecord& b, const SimilarityWeights& weights = {});

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Pairs (i < j, ascending) that share a block: (facet, first four characters
/// of the normalized title) or normalized DOI.
std::vector<IndexPair> candidate_pairs(const std::vector<ScholarlyRecord>& records);

struct ScoredPair {
  std::size_t first = 0;
  std::size_t second = 0;
  double score = 0.0;
};

std::vector<ScoredPair> score_pairs(const std::vector<ScholarlyRecord>& records, const std::vector<IndexPair>& pairs,
                                    const SimilarityWeights& weights = {});

struct DuplicateCluster {
  std::vector<std::size_t> members;  // ascending input indices
  ScholarlyRecord representative;
};

/// Transitive closure over pairs scoring >= threshold. Clusters are ordered
/// by their smallest member; unmatched records form singletons.
std::vector<DuplicateCluster> cluster(const std::vector<ScholarlyRecord>& records, const std::vector<ScoredPair>& pairs,
                                      double threshold);

/// Merges members after canonicalizing their order. Throws
/// Error(kMixedFacetCluster) or Error(kInvalidArgument) for an empty list.
ScholarlyRecord merge_cluster(std::vector<ScholarlyRecord> members);

struct DedupResult {
  std::vector<DuplicateCluster> clusters;

  std::vector<ScholarlyRecord> records() const;
};

DedupResult deduplicate(const std::vector<ScholarlyRecord>& records, const SimilarityWeights& weights = {});

}  // namespace fedqa::dedup
