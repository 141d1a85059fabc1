#pragma once

// Per-search knowledge base and the TF-IDF / KNN / SVM ensemble retriever.

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fedqa/embedding.hpp"
#include "fedqa/taxonomy.hpp"

namespace fedqa::retriever {

using embedding::EmbeddingProvider;
using embedding::Vector;

/// "<field>: <value>" lines in fixed order: type, title, authors, date, doi,
/// abstract, then extras by key. List values are joined with ", ".
std::string flatten_record(const taxonomy::ScholarlyRecord& record);

struct Document {
  std::size_t doc_id = 0;
  std::string text;
  std::size_t record_ref = 0;
};

struct Posting {
  std::size_t doc = 0;
  double weight = 0.0;  // raw tf * idf
};

/// tf = raw count, idf = ln(N / (1 + df)) + 1.
struct TfidfIndex {
  std::unordered_map<std::string, std::vector<Posting>> postings;
  std::unordered_map<std::string, double> idf;
  std::vector<double> doc_norms;

  static TfidfIndex build(const std::vector<std::string>& texts);
  /// Cosine of the query's tf-idf vector against every document.
  std::vector<double> cosine_scores(std::string_view query) const;
};

/// Immutable once built; share it between readers by const reference or
/// shared_ptr<const KnowledgeBase>.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  /// Documents follow the given (ranked) record order. Provider errors
  /// propagate as Error(kProviderFailure).
  static KnowledgeBase build(const std::vector<taxonomy::ScholarlyRecord>& records, const EmbeddingProvider& provider);
  /// Documents from raw texts; record_ref equals doc_id.
  static KnowledgeBase from_texts(std::vector<std::string> texts, const EmbeddingProvider& provider);

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const std::vector<Vector>& embeddings() const noexcept { return embeddings_; }
  const TfidfIndex& tfidf() const noexcept { return tfidf_; }
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }
  std::size_t dimension() const noexcept { return dimension_; }

 private:
  std::vector<Document> documents_;
  std::vector<Vector> embeddings_;
  TfidfIndex tfidf_;
  std::size_t dimension_ = 0;
};

struct ScoredDoc {
  std::size_t doc_id = 0;
  double score = 0.0;

  bool operator==(const ScoredDoc&) const = default;
};

using Ranking = std::vector<ScoredDoc>;

/// Top-k by score descending, doc_id ascending on ties; k > N yields N.
Ranking top_k(const std::vector<double>& scores, std::size_t k);

Ranking tfidf_retrieve(std::string_view query, const KnowledgeBase& kb, std::size_t k);
Ranking knn_retrieve(std::string_view query, const KnowledgeBase& kb, std::size_t k, const EmbeddingProvider& provider);

struct SvmOptions {
  double lambda = 0.01;
  double learning_rate = 0.1;
  int iterations = 200;
};

struct LinearModel {
  Vector weights;
  double bias = 0.0;

  double decision(const Vector& x) const noexcept;
};

/// Squared-hinge linear SVM with the query as the single positive example and
/// every document as a negative one; full-batch gradient descent from zero,
/// examples visited query first then by doc_id.
LinearModel train_query_svm(const Vector& query, const std::vector<Vector>& documents, const SvmOptions& options = {});

Ranking svm_retrieve(std::string_view query, const KnowledgeBase& kb, std::size_t k, const EmbeddingProvider& provider,
                     const SvmOptions& options = {});

enum class FusionMethod {
  kReciprocalRank,  // sum of weight / (rrf_constant + rank)
  kWeightedScore,   // sum of weight * min-max normalized score
};

struct EnsembleConfig {
  double tfidf_weight = 0.3;
  double knn_weight = 0.3;
  double svm_weight = 0.4;
  std::size_t top_k = 5;
  double rrf_constant = 60.0;
  FusionMethod fusion = FusionMethod::kReciprocalRank;
  SvmOptions svm;

  void validate() const;
};

struct WeightedRanking {
  double weight = 0.0;
  Ranking ranking;  // best first
};

/// Fuses component rankings. Per-document contributions are summed in a
/// canonical order, so the result does not depend on component order.
Ranking fuse(const std::vector<WeightedRanking>& components, FusionMethod method, double rrf_constant,
             std::size_t k);

/// Each component contributes its top 2 * top_k list before fusion.
Ranking ensemble_retrieve(std::string_view query, const KnowledgeBase& kb, const EnsembleConfig& config,
                          const EmbeddingProvider& provider);

}  // namespace fedqa::retriever
