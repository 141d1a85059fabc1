#include "fedqa/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "fedqa/text.hpp"

namespace fedqa::metrics {

namespace {

Prf make_prf(double overlap, std::size_t cand, std::size_t ref) {
  if (cand == 0 || ref == 0) return {};
  Prf out;
  out.precision = overlap / static_cast<double>(cand);
  out.recall = overlap / static_cast<double>(ref);
  const double sum = out.precision + out.recall;
  out.f1 = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
  return out;
}

std::size_t clipped_overlap(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  std::map<std::string_view, std::size_t> ref_counts;
  for (const auto& t : ref) ++ref_counts[t];
  std::size_t overlap = 0;
  for (const auto& t : cand) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  return overlap;
}

}  // namespace

Prf rouge1_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  return make_prf(static_cast<double>(clipped_overlap(candidate, reference)), candidate.size(), reference.size());
}

Prf rouge1(std::string_view candidate, std::string_view reference) {
  return rouge1_tokens(text::tokenize(candidate), text::tokenize(reference));
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

Prf rougeL_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  return make_prf(static_cast<double>(lcs_length(candidate, reference)), candidate.size(), reference.size());
}

Prf rougeL(std::string_view candidate, std::string_view reference) {
  return rougeL_tokens(text::tokenize(candidate), text::tokenize(reference));
}

double bleu1_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  const std::size_t c = candidate.size();
  const std::size_t r = reference.size();
  if (c == 0) return 0.0;
  const double p = static_cast<double>(clipped_overlap(candidate, reference)) / static_cast<double>(c);
  const double bp = c > r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * p;
}

double bleu1(std::string_view candidate, std::string_view reference) {
  return bleu1_tokens(text::tokenize(candidate), text::tokenize(reference));
}

std::string normalize_answer(std::string_view s) {
  std::string lowered = text::to_lower(s);
  std::string stripped;
  stripped.reserve(lowered.size());
  for (unsigned char c : lowered) {
    if (c < 0x80 && std::ispunct(c)) continue;
    stripped.push_back(static_cast<char>(c));
  }
  std::istringstream in(stripped);
  std::vector<std::string> words;
  for (std::string w; in >> w;) {
    if (w == "a" || w == "an" || w == "the") continue;
    words.push_back(std::move(w));
  }
  return text::join(words, " ");
}

int exact_match(std::string_view candidate, std::string_view reference) {
  return normalize_answer(candidate) == normalize_answer(reference) ? 1 : 0;
}

double semantic_score(std::string_view candidate, std::string_view reference,
                      const embedding::EmbeddingProvider& provider) {
  const auto vecs = provider.embed({std::string(candidate), std::string(reference)});
  return std::clamp(embedding::cosine(vecs.at(0), vecs.at(1)), -1.0, 1.0);
}

}  // namespace fedqa::metrics
