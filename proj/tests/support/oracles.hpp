#pragma once

// Brute-force reference implementations written straight from the formulas,
// sharing no code with the library.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace fedqa::testing {

using Tokens = std::vector<std::string>;

/// BM25+ score of every document for a query, recomputing df and avgdl by
/// scanning the corpus for each term.
std::vector<double> bm25plus_oracle(const std::vector<Tokens>& corpus, const Tokens& query, double k1 = 1.5,
                                    double b = 0.75, double delta = 1.0);

struct OraclePrf {
  double p = 0.0;
  double r = 0.0;
  double f = 0.0;
};

OraclePrf rouge1_oracle(const Tokens& cand, const Tokens& ref);
/// LCS by plain recursion with memo over (i, j).
OraclePrf rougeL_oracle(const Tokens& cand, const Tokens& ref);
double bleu1_oracle(const Tokens& cand, const Tokens& ref);

/// Weighted reciprocal-rank fusion; rankings are lists of doc ids, best first.
std::map<std::size_t, double> rrf_oracle(const std::vector<std::pair<double, std::vector<std::size_t>>>& rankings,
                                         double constant = 60.0);

}  // namespace fedqa::testing
