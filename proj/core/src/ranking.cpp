#include "fedqa/ranking.hpp"

#include <algorithm>
#include <cmath>

#include "fedqa/error.hpp"
#include "fedqa/retriever.hpp"
#include "fedqa/text.hpp"

namespace fedqa::ranking {

void Bm25Params::validate() const {
  if (!(k1 >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "bm25 k1 must be >= 0");
  if (!(b >= 0.0 && b <= 1.0)) throw Error(ErrorCode::kInvalidConfig, "bm25 b must lie in [0, 1]");
  if (!(delta >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "bm25 delta must be >= 0");
}

std::size_t CorpusStats::document_frequency(const std::string& term) const {
  const auto it = df.find(term);
  return it == df.end() ? 0 : it->second;
}

std::size_t CorpusStats::term_frequency(const std::string& term, std::size_t doc) const {
  const auto& freqs = term_freqs.at(doc);
  const auto it = freqs.find(term);
  return it == freqs.end() ? 0 : it->second;
}

CorpusStats build_stats(const std::vector<TokenList>& docs) {
  if (docs.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot build corpus statistics over zero documents");
  CorpusStats stats;
  stats.n = docs.size();
  stats.doc_lengths.reserve(docs.size());
  stats.term_freqs.reserve(docs.size());
  std::size_t total = 0;
  for (const auto& doc : docs) {
    std::unordered_map<std::string, std::size_t> freqs;
    for (const auto& token : doc) ++freqs[token];
    for (const auto& [term, count] : freqs) ++stats.df[term];
    stats.doc_lengths.push_back(doc.size());
    stats.term_freqs.push_back(std::move(freqs));
    total += doc.size();
  }
  stats.avgdl = static_cast<double>(total) / static_cast<double>(stats.n);
  return stats;
}

double bm25plus_idf(std::size_t n, std::size_t df) noexcept {
  const double nd = static_cast<double>(n);
  const double dfd = static_cast<double>(df);
  return std::log((nd - dfd + 0.5) / (dfd + 0.5) + 1.0);
}

double bm25plus_term_weight(double tf, double dl, double avgdl, double idf, const Bm25Params& params) noexcept {
  if (tf <= 0.0) return 0.0;
  const double length_ratio = avgdl > 0.0 ? dl / avgdl : 1.0;
  const double norm = tf + params.k1 * (1.0 - params.b + params.b * length_ratio);
  // norm == 0 only when tf == 0, which returned above.
  return idf * (tf * (params.k1 + 1.0) / norm + params.delta);
}

double bm25plus_score(const TokenList& query_tokens, std::size_t doc, const CorpusStats& stats,
                      const Bm25Params& params) {
  const double dl = static_cast<double>(stats.doc_lengths.at(doc));
  double score = 0.0;
  for (const auto& term : query_tokens) {
    const auto tf = stats.term_frequency(term, doc);
    if (tf == 0) continue;
    score += bm25plus_term_weight(static_cast<double>(tf), dl, stats.avgdl,
                                  bm25plus_idf(stats.n, stats.document_frequency(term)), params);
  }
  return score;
}

std::vector<RankedRecord> rank(std::string_view query, std::vector<taxonomy::ScholarlyRecord> records,
                               const Bm25Params& params) {
  std::vector<RankedRecord> ranked;
  if (records.empty()) return ranked;
  params.validate();

  std::vector<TokenList> docs;
  docs.reserve(records.size());
  for (const auto& r : records) docs.push_back(text::tokenize(retriever::flatten_record(r)));
  const auto stats = build_stats(docs);
  const auto query_tokens = text::tokenize(query);

  ranked.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    ranked.push_back({std::move(records[i]), bm25plus_score(query_tokens, i, stats, params)});
  }
  auto sources = [](const RankedRecord& r) { return text::join({r.record.source_ids.begin(), r.record.source_ids.end()}, ","); };
  std::stable_sort(ranked.begin(), ranked.end(), [&](const RankedRecord& a, const RankedRecord& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.record.title != b.record.title) return a.record.title < b.record.title;
    return sources(a) < sources(b);
  });
  return ranked;
}

}  // namespace fedqa::ranking
