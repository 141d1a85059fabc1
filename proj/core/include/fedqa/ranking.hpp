#pragma once

// BM25+ relevance ranking (Lv & Zhai lower-bounded term frequency).

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fedqa/taxonomy.hpp"

namespace fedqa::ranking {

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
  double delta = 1.0;

  void validate() const;  // k1 >= 0, 0 <= b <= 1, delta >= 0
};

using TokenList = std::vector<std::string>;

struct CorpusStats {
  std::size_t n = 0;
  std::unordered_map<std::string, std::size_t> df;
  std::vector<std::size_t> doc_lengths;
  double avgdl = 0.0;
  std::vector<std::unordered_map<std::string, std::size_t>> term_freqs;

  std::size_t document_frequency(const std::string& term) const;
  std::size_t term_frequency(const std::string& term, std::size_t doc) const;
};

/// Throws Error(kEmptyCorpus) when `docs` is empty.
CorpusStats build_stats(const std::vector<TokenList>& docs);

/// ln((N - df + 0.5) / (df + 0.5) + 1); always positive.
double bm25plus_idf(std::size_t n, std::size_t df) noexcept;

/// idf * (tf (k1 + 1) / (tf + k1 (1 - b + b dl / avgdl)) + delta) for tf > 0,
/// zero otherwise. avgdl == 0 is treated as dl / avgdl == 1.
double bm25plus_term_weight(double tf, double dl, double avgdl, double idf, const Bm25Params& params) noexcept;

/// Sum of term weights over the query tokens as given (repeats count).
double bm25plus_score(const TokenList& query_tokens, std::size_t doc, const CorpusStats& stats,
                      const Bm25Params& params = {});

struct RankedRecord {
  taxonomy::ScholarlyRecord record;
  double score = 0.0;
};

/// Scores each record's flattened text and sorts by score descending, then
/// title ascending, then source ids.
std::vector<RankedRecord> rank(std::string_view query, std::vector<taxonomy::ScholarlyRecord> records,
                               const Bm25Params& params = {});

}  // namespace fedqa::ranking
