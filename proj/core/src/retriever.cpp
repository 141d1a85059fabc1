#include "fedqa/retriever.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fedqa/error.hpp"
#include "fedqa/text.hpp"

namespace fedqa::retriever {

std::string flatten_record(const taxonomy::ScholarlyRecord& record) {
  std::vector<std::string> lines;
  lines.push_back("type: " + std::string(taxonomy::to_string(record.facet)));
  lines.push_back(std::string(taxonomy::is_creative_work(record.facet) ? "title: " : "name: ") + record.title);
  if (!record.authors.empty()) lines.push_back("authors: " + text::join(record.authors, ", "));
  if (record.date_published) {
    const auto& d = *record.date_published;
    lines.push_back("date: " + (d.year_only ? d.iso().substr(0, 4) : d.iso()));
  }
  if (record.doi) lines.push_back("doi: " + *record.doi);
  if (record.abstract) lines.push_back("abstract: " + *record.abstract);
  for (const auto& [key, value] : record.extras) {
    if (const auto* s = std::get_if<std::string>(&value)) {
      lines.push_back(key + ": " + *s);
    } else {
      lines.push_back(key + ": " + text::join(std::get<std::vector<std::string>>(value), ", "));
    }
  }
  return text::join(lines, "\n");
}

// ---------------------------------------------------------------- tf-idf

TfidfIndex TfidfIndex::build(const std::vector<std::string>& texts) {
  TfidfIndex index;
  const std::size_t n = texts.size();
  std::vector<std::map<std::string, std::size_t>> counts(n);
  std::unordered_map<std::string, std::size_t> df;
  for (std::size_t d = 0; d < n; ++d) {
    for (auto& token : text::tokenize(texts[d])) ++counts[d][std::move(token)];
    for (const auto& [term, tf] : counts[d]) ++df[term];
  }
  for (const auto& [term, freq] : df) {
    index.idf[term] = std::log(static_cast<double>(n) / (1.0 + static_cast<double>(freq))) + 1.0;
  }
  index.doc_norms.assign(n, 0.0);
  for (std::size_t d = 0; d < n; ++d) {
    double sq = 0.0;
    for (const auto& [term, tf] : counts[d]) {
      const double w = static_cast<double>(tf) * index.idf[term];
      index.postings[term].push_back({d, w});
      sq += w * w;
    }
    index.doc_norms[d] = std::sqrt(sq);
  }
  return index;
}

std::vector<double> TfidfIndex::cosine_scores(std::string_view query) const {
  std::vector<double> scores(doc_norms.size(), 0.0);
  std::map<std::string, std::size_t> qcounts;
  for (auto& token : text::tokenize(query)) ++qcounts[std::move(token)];
  double qsq = 0.0;
  for (const auto& [term, tf] : qcounts) {
    const auto it = idf.find(term);
    if (it == idf.end()) continue;
    const double qw = static_cast<double>(tf) * it->second;
    qsq += qw * qw;
    for (const auto& p : postings.at(term)) scores[p.doc] += qw * p.weight;
  }
  const double qnorm = std::sqrt(qsq);
  for (std::size_t d = 0; d < scores.size(); ++d) {
    scores[d] = (qnorm > 0.0 && doc_norms[d] > 0.0) ? scores[d] / (qnorm * doc_norms[d]) : 0.0;
  }
  return scores;
}

// ---------------------------------------------------------------- knowledge base

KnowledgeBase KnowledgeBase::from_texts(std::vector<std::string> texts, const EmbeddingProvider& provider) {
  KnowledgeBase kb;
  kb.dimension_ = provider.dimension();
  if (texts.empty()) return kb;
  kb.embeddings_ = provider.embed(texts);
  if (kb.embeddings_.size() != texts.size()) {
    throw Error(ErrorCode::kProviderFailure, "embedding provider returned the wrong number of vectors");
  }
  kb.tfidf_ = TfidfIndex::build(texts);
  kb.documents_.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) kb.documents_.push_back({i, std::move(texts[i]), i});
  return kb;
}

KnowledgeBase KnowledgeBase::build(const std::vector<taxonomy::ScholarlyRecord>& records,
                                   const EmbeddingProvider& provider) {
  std::vector<std::string> texts;
  texts.reserve(records.size());
  for (const auto& r : records) texts.push_back(flatten_record(r));
  return from_texts(std::move(texts), provider);
}

// ---------------------------------------------------------------- retrievers

Ranking top_k(const std::vector<double>& scores, std::size_t k) {
  Ranking all;
  all.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) all.push_back({i, scores[i]});
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(),
                    [](const ScoredDoc& a, const ScoredDoc& b) {
                      return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
                    });
  all.resize(keep);
  return all;
}

namespace {

void require_k(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
}

Vector embed_query(std::string_view query, const KnowledgeBase& kb, const EmbeddingProvider& provider) {
  if (provider.dimension() != kb.dimension()) {
    throw Error(ErrorCode::kInvalidArgument, "query provider dimension differs from the knowledge base");
  }
  return provider.embed_one(std::string(query));
}

}  // namespace

Ranking tfidf_retrieve(std::string_view query, const KnowledgeBase& kb, std::size_t k) {
  require_k(k);
  if (kb.empty()) return {};
  return top_k(kb.tfidf().cosine_scores(query), k);
}

Ranking knn_retrieve(std::string_view query, const KnowledgeBase& kb, std::size_t k,
                     const EmbeddingProvider& provider) {
  require_k(k);
  if (kb.empty()) return {};
  const Vector q = embed_query(query, kb, provider);
  std::vector<double> scores;
  scores.reserve(kb.size());
  for (const auto& e : kb.embeddings()) scores.push_back(embedding::cosine(q, e));
  return top_k(scores, k);
}

double LinearModel::decision(const Vector& x) const noexcept { return embedding::dot(weights, x) + bias; }

LinearModel train_query_svm(const Vector& query, const std::vector<Vector>& documents, const SvmOptions& options) {
  const std::size_t dim = query.size();
  LinearModel model{Vector(dim, 0.0), 0.0};
  const double n = static_cast<double>(documents.size() + 1);
  Vector grad(dim);

  for (int iter = 0; iter < options.iterations; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    auto accumulate = [&](const Vector& x, double label) {
      const double margin = 1.0 - label * model.decision(x);
      if (margin <= 0.0) return;
      // d/dz of max(0, 1 - y z)^2 is -2 y (1 - y z).
      const double coeff = -2.0 * label * margin / n;
      for (std::size_t j = 0; j < dim; ++j) grad[j] += coeff * x[j];
      grad_bias += coeff;
    };
    accumulate(query, +1.0);
    for (const auto& doc : documents) accumulate(doc, -1.0);
    for (std::size_t j = 0; j < dim; ++j) {
      grad[j] += 2.0 * options.lambda * model.weights[j];
      model.weights[j] -= options.learning_rate * grad[j];
    }
    model.bias -= options.learning_rate * grad_bias;
  }
  return model;
}

Ranking svm_retrieve(std::string_view query, const KnowledgeBase& kb, std::size_t k, const EmbeddingProvider& provider,
                     const SvmOptions& options) {
  require_k(k);
  if (kb.empty()) return {};
  const Vector q = embed_query(query, kb, provider);
  const auto model = train_query_svm(q, kb.embeddings(), options);
  std::vector<double> scores;
  scores.reserve(kb.size());
  for (const auto& e : kb.embeddings()) scores.push_back(model.decision(e));
  return top_k(scores, k);
}

// ---------------------------------------------------------------- ensemble

void EnsembleConfig::validate() const {
  if (!(tfidf_weight > 0.0 && knn_weight > 0.0 && svm_weight > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "ensemble weights must be positive");
  }
  if (top_k < 1) throw Error(ErrorCode::kInvalidConfig, "top_k must be at least 1");
  if (!(rrf_constant > 0.0)) throw Error(ErrorCode::kInvalidConfig, "rrf_constant must be positive");
  if (svm.iterations < 0 || !(svm.learning_rate > 0.0) || !(svm.lambda >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "invalid svm options");
  }
}

Ranking fuse(const std::vector<WeightedRanking>& components, FusionMethod method, double rrf_constant,
             std::size_t k) {
  std::map<std::size_t, std::vector<double>> contributions;
  for (const auto& component : components) {
    const auto& ranking = component.ranking;
    if (ranking.empty()) continue;
    double lo = ranking.front().score;
    double hi = ranking.front().score;
    for (const auto& d : ranking) {
      lo = std::min(lo, d.score);
      hi = std::max(hi, d.score);
    }
    for (std::size_t pos = 0; pos < ranking.size(); ++pos) {
      double value = 0.0;
      if (method == FusionMethod::kReciprocalRank) {
        value = component.weight / (rrf_constant + static_cast<double>(pos + 1));
      } else {
        const double normalized = hi > lo ? (ranking[pos].score - lo) / (hi - lo) : 1.0;
        value = component.weight * normalized;
      }
      contributions[ranking[pos].doc_id].push_back(value);
    }
  }
  Ranking fused;
  fused.reserve(contributions.size());
  for (auto& [doc, values] : contributions) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    fused.push_back({doc, sum});
  }
  std::sort(fused.begin(), fused.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    return a.score != b.score ? a.score > b.score : a.doc_id < b.doc_id;
  });
  if (fused.size() > k) fused.resize(k);
  return fused;
}

Ranking ensemble_retrieve(std::string_view query, const KnowledgeBase& kb, const EnsembleConfig& config,
                          const EmbeddingProvider& provider) {
  config.validate();
  if (kb.empty()) return {};
  const std::size_t depth = 2 * config.top_k;
  std::vector<WeightedRanking> components{
      {config.tfidf_weight, tfidf_retrieve(query, kb, depth)},
      {config.knn_weight, knn_retrieve(query, kb, depth, provider)},
      {config.svm_weight, svm_retrieve(query, kb, depth, provider, config.svm)},
  };
  return fuse(components, config.fusion, config.rrf_constant, config.top_k);
}

}  // namespace fedqa::retriever
