#pragma once

// Answer-quality metrics. Token-based metrics use text::tokenize().

#include <string>
#include <string_view>
#include <vector>

#include "fedqa/embedding.hpp"

namespace fedqa::metrics {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Clipped unigram overlap. Empty candidate or reference gives zeros.
Prf rouge1(std::string_view candidate, std::string_view reference);
Prf rouge1_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

/// Longest common subsequence over tokens.
Prf rougeL(std::string_view candidate, std::string_view reference);
Prf rougeL_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Clipped unigram precision times the brevity penalty; empty candidate is 0.
double bleu1(std::string_view candidate, std::string_view reference);
double bleu1_tokens(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

/// Lowercase, drop punctuation, drop the articles a/an/the, collapse spaces.
std::string normalize_answer(std::string_view s);
/// 1 when normalized strings are equal, else 0.
int exact_match(std::string_view candidate, std::string_view reference);

/// Cosine of the two full-string embeddings; zero vectors give 0.
double semantic_score(std::string_view candidate, std::string_view reference,
                      const embedding::EmbeddingProvider& provider);

}  // namespace fedqa::metrics
