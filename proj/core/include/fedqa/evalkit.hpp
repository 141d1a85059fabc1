#pragma once

// Evaluation drivers: QA dataset builders, scoring, relevancy sweeps and
// latency statistics over the gateway telemetry log.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedqa/dedup.hpp"
#include "fedqa/embedding.hpp"
#include "fedqa/llm.hpp"
#include "fedqa/ranking.hpp"
#include "fedqa/retriever.hpp"

namespace fedqa::evalkit {

// ---------------------------------------------------------------- datasets

/// Every *.json object below `dir` (recursive, path order) mapped with the
/// fixture field map, then deduplicated. Files that are not a record object
/// or lack a title are skipped. The source id is the parent directory name.
std::vector<taxonomy::ScholarlyRecord> load_record_corpus(const std::filesystem::path& dir,
                                                          const dedup::SimilarityWeights& weights = {});

struct ClusterPlan {
  std::size_t n_docs = 0;
  std::optional<std::size_t> k;  // none: too few documents
};

/// k = 10 above 50 docs, 5 for 5..50, none below 5.
ClusterPlan plan_clusters(std::size_t n_docs) noexcept;

enum class QaSource { kAiQa, kComparisonQa };
std::string_view to_string(QaSource source) noexcept;

struct QaItem {
  std::string question;
  /// Cluster texts for AI-QA, a single property value for Comparison-QA.
  std::vector<std::string> ground_truth;
  QaSource source = QaSource::kAiQa;
  /// Search query that produced the knowledge base, when known.
  std::optional<std::string> query;

  /// Ground-truth texts joined by blank lines.
  std::string reference() const;
  void validate() const;  // kInvalidArgument on empty question or truth
  bool operator==(const QaItem&) const = default;
};

std::string to_json_line(const QaItem& item);
/// Throws kParseError.
QaItem qa_item_from_json(std::string_view line);
std::vector<QaItem> read_dataset(const std::string& path);
void write_dataset(const std::string& path, const std::vector<QaItem>& items);

inline constexpr std::string_view kQuestionGenerationTemplate =
    "The task is to generate questions based on the provided information.\n"
    "Given a list of texts, generate only two questions, no more than two.\n"
    "Make questions variant.\n"
    "The questions should imitate what a user might look for in the given documents.\n"
    "\n"
    "Return questions as a Python list.\n"
    "\n"
    "Documents:\n"
    "{documents}";

/// Documents are joined by blank lines.
std::string render_generation_prompt(const std::vector<std::string>& documents);

/// Parses a bracketed list of quoted strings ('...' or "...", backslash
/// escapes). Text around the outermost brackets is ignored. Throws
/// kMalformedGeneration unless exactly two non-empty questions are found.
std::vector<std::string> parse_question_list(std::string_view reply);

/// Offline question writer: answers a generation prompt with two questions
/// built from the first document's title line.
class StubQuestionWriter final : public llm::LlmProvider {
 public:
  std::string generate(const std::string& prompt, int max_output_tokens) const override;
};

struct AiQaBuild {
  std::vector<QaItem> items;
  std::size_t clusters = 0;
  std::size_t malformed = 0;
};

/// Clusters the KB embeddings per plan_clusters and asks the provider for two
/// questions per cluster. Malformed replies skip that cluster.
AiQaBuild build_ai_qa(const retriever::KnowledgeBase& kb, const llm::LlmProvider& provider, std::uint64_t seed = 42,
                      std::optional<std::string> query = std::nullopt);

struct ComparisonPaper {
  std::string title;
  std::vector<std::pair<std::string, std::string>> properties;  // name -> value, file order
};

struct Comparison {
  std::string title;
  std::vector<ComparisonPaper> papers;
};

/// Accepts one comparison object or an array of them.
std::vector<Comparison> comparisons_from_json(std::string_view json_text);

/// Lowercase with collapsed whitespace.
std::string normalize_title(std::string_view title);

std::string comparison_question(std::string_view paper, std::string_view property);

/// `retrieved_titles` may be raw; they are normalized here.
std::vector<QaItem> build_comparison_qa(const std::vector<Comparison>& comparisons,
                                        const std::set<std::string>& retrieved_titles);

// ---------------------------------------------------------------- scoring

struct MetricReport {
  double rouge1_f = 0.0;
  double rouge1_p = 0.0;
  double rouge1_r = 0.0;
  double rougeL_f = 0.0;
  double rougeL_p = 0.0;
  double rougeL_r = 0.0;
  double bleu1 = 0.0;
  double semantic = 0.0;
  std::optional<double> exact_match;  // comparison items only
};

MetricReport score_answer(std::string_view answer, const QaItem& item, const embedding::EmbeddingProvider& embedder);

struct ItemReport {
  QaItem item;
  std::string answer;
  MetricReport metrics;
};

struct DatasetReport {
  std::vector<ItemReport> items;
  /// Means over evaluated items; exact_match over comparison items only.
  MetricReport aggregate;
  std::size_t evaluated = 0;
  std::size_t excluded_prompt_too_large = 0;
};

using AnswerFn = std::function<std::string(const QaItem&)>;

/// Items whose answer_fn throws kPromptTooLarge are excluded and counted.
DatasetReport evaluate_dataset(const std::vector<QaItem>& items, const AnswerFn& answer_fn,
                               const embedding::EmbeddingProvider& embedder);

std::string report_summary_json(const DatasetReport& report);
/// One row per evaluated item.
std::string report_items_csv(const DatasetReport& report);

// ---------------------------------------------------------------- sweeps

enum class Representation { kTfidf, kBm25, kEmbedding };
std::string_view to_string(Representation rep) noexcept;

enum class Bm25SweepMode {
  kCosine,           // cosine over BM25+-weighted term vectors
  kNormalizedScore,  // raw BM25+ score divided by the maximum over docs
};

/// 0.00, 0.01, ..., 0.99.
std::vector<double> default_thresholds();

struct SweepOptions {
  std::vector<double> thresholds = default_thresholds();
  Bm25SweepMode bm25_mode = Bm25SweepMode::kCosine;
  ranking::Bm25Params bm25;
};

struct SweepCurve {
  Representation representation = Representation::kTfidf;
  std::vector<double> thresholds;
  std::vector<std::size_t> retained;
  std::vector<double> similarities;  // per document
};

/// Query/document similarities under each representation; docs with
/// similarity >= t are retained at threshold t. Thresholds must ascend within
/// [0, 0.99] (kInvalidArgument).
std::vector<SweepCurve> relevancy_sweep(std::string_view query, const std::vector<std::string>& docs,
                                        const embedding::EmbeddingProvider& embedder,
                                        const SweepOptions& options = {});

/// Columns: threshold, representation, retained_count.
std::string sweep_csv(const std::vector<SweepCurve>& curves);

// ---------------------------------------------------------------- perf

struct LogEntry {
  double latency_seconds = 0.0;
  double docs_returned = 0.0;
};

/// Reads latency_seconds and docs_returned from a telemetry JSON line.
LogEntry log_entry_from_json(std::string_view line);

struct SeriesStats {
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  /// Adjusted Fisher-Pearson G1; absent when n < 3 or variance is zero.
  std::optional<double> skewness;
  bool zero_variance = false;
};

struct PerfStats {
  std::size_t n = 0;
  SeriesStats latency;
  SeriesStats docs;
};

/// Median and p95 by linear interpolation between order statistics.
SeriesStats series_stats(std::vector<double> values);
/// Throws kEmptyLog.
PerfStats perf_stats(const std::vector<LogEntry>& log);
/// Includes the formulas used.
std::string perf_stats_json(const PerfStats& stats);

}  // namespace fedqa::evalkit
