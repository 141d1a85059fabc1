#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace fedqa::testing {

std::vector<double> bm25plus_oracle(const std::vector<Tokens>& corpus, const Tokens& query, double k1, double b,
                                    double delta) {
  const double n = static_cast<double>(corpus.size());
  double total_len = 0.0;
  for (const auto& d : corpus) total_len += static_cast<double>(d.size());
  const double avgdl = corpus.empty() ? 0.0 : total_len / n;

  std::vector<double> scores;
  for (const auto& doc : corpus) {
    double score = 0.0;
    for (const auto& term : query) {
      double tf = 0.0;
      for (const auto& t : doc) tf += (t == term) ? 1.0 : 0.0;
      if (tf == 0.0) continue;
      double df = 0.0;
      for (const auto& other : corpus) {
        if (std::find(other.begin(), other.end(), term) != other.end()) df += 1.0;
      }
      const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
      const double ratio = avgdl > 0.0 ? static_cast<double>(doc.size()) / avgdl : 1.0;
      score += idf * ((tf * (k1 + 1.0)) / (tf + k1 * (1.0 - b + b * ratio)) + delta);
    }
    scores.push_back(score);
  }
  return scores;
}

namespace {

double clipped_overlap(const Tokens& cand, const Tokens& ref) {
  // consume matching reference tokens one at a time
  std::vector<bool> used(ref.size(), false);
  double hits = 0.0;
  for (const auto& c : cand) {
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (!used[j] && ref[j] == c) {
        used[j] = true;
        hits += 1.0;
        break;
      }
    }
  }
  return hits;
}

OraclePrf prf(double hits, std::size_t cand, std::size_t ref) {
  OraclePrf out;
  if (cand == 0 || ref == 0) return out;
  out.p = hits / static_cast<double>(cand);
  out.r = hits / static_cast<double>(ref);
  out.f = (out.p + out.r) > 0.0 ? 2.0 * out.p * out.r / (out.p + out.r) : 0.0;
  return out;
}

}  // namespace

OraclePrf rouge1_oracle(const Tokens& cand, const Tokens& ref) {
  return prf(clipped_overlap(cand, ref), cand.size(), ref.size());
}

OraclePrf rougeL_oracle(const Tokens& cand, const Tokens& ref) {
  std::vector<std::vector<int>> memo(cand.size() + 1, std::vector<int>(ref.size() + 1, -1));
  std::function<int(std::size_t, std::size_t)> lcs = [&](std::size_t i, std::size_t j) -> int {
    if (i == cand.size() || j == ref.size()) return 0;
    int& m = memo[i][j];
    if (m >= 0) return m;
    if (cand[i] == ref[j]) {
      m = 1 + lcs(i + 1, j + 1);
    } else {
      m = std::max(lcs(i + 1, j), lcs(i, j + 1));
    }
    return m;
  };
  return prf(static_cast<double>(lcs(0, 0)), cand.size(), ref.size());
}

double bleu1_oracle(const Tokens& cand, const Tokens& ref) {
  if (cand.empty()) return 0.0;
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double p = clipped_overlap(cand, ref) / c;
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * p;
}

std::map<std::size_t, double> rrf_oracle(const std::vector<std::pair<double, std::vector<std::size_t>>>& rankings,
                                         double constant) {
  std::map<std::size_t, double> fused;
  for (const auto& [weight, ids] : rankings) {
    for (std::size_t pos = 0; pos < ids.size(); ++pos) {
      fused[ids[pos]] += weight / (constant + static_cast<double>(pos + 1));
    }
  }
  return fused;
}

}  // namespace fedqa::testing
