#include "fedqa/evalkit.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <sstream>

#include "fedqa/connectors.hpp"
#include "fedqa/error.hpp"
#include "fedqa/json_io.hpp"
#include "fedqa/kmeans.hpp"
#include "fedqa/metrics.hpp"
#include "fedqa/text.hpp"

namespace fedqa::evalkit {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------- datasets

std::vector<taxonomy::ScholarlyRecord> load_record_corpus(const std::filesystem::path& dir,
                                                          const dedup::SimilarityWeights& weights) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  const auto map = taxonomy::FieldMap::builtin("fixture");
  std::vector<taxonomy::ScholarlyRecord> records;
  for (const auto& file : files) {
    try {
      federation::SourceRecord raw{file.parent_path().filename().string(),
                                   federation::parse_native_object(io::read_file(file)), {}};
      records.push_back(taxonomy::map_record(raw, map));
    } catch (const Error& e) {
      spdlog::debug("skipping {}: {}", file.string(), e.what());
    }
  }
  return dedup::deduplicate(records, weights).records();
}

ClusterPlan plan_clusters(std::size_t n_docs) noexcept {
  ClusterPlan plan{n_docs, std::nullopt};
  if (n_docs > 50) {
    plan.k = 10;
  } else if (n_docs >= 5) {
    plan.k = 5;
  }
  return plan;
}

std::string_view to_string(QaSource source) noexcept {
  return source == QaSource::kAiQa ? "ai_qa" : "comparison_qa";
}

std::string QaItem::reference() const { return text::join(ground_truth, "\n\n"); }

void QaItem::validate() const {
  if (text::trim(question).empty()) throw Error(ErrorCode::kInvalidArgument, "QA item has an empty question");
  bool any = false;
  for (const auto& g : ground_truth) any = any || !text::trim(g).empty();
  if (!any) throw Error(ErrorCode::kInvalidArgument, "QA item has an empty ground truth");
}

std::string to_json_line(const QaItem& item) {
  ordered_json j;
  j["question"] = item.question;
  j["ground_truth"] = item.ground_truth;
  j["source"] = to_string(item.source);
  if (item.query) j["query"] = *item.query;
  return j.dump();
}

QaItem qa_item_from_json(std::string_view line) {
  try {
    const auto j = json::parse(line);
    QaItem item;
    item.question = j.at("question").get<std::string>();
    const auto& gt = j.at("ground_truth");
    if (gt.is_string()) {
      item.ground_truth = {gt.get<std::string>()};
    } else {
      item.ground_truth = gt.get<std::vector<std::string>>();
    }
    const auto source = j.value("source", "ai_qa");
    if (source == "ai_qa") {
      item.source = QaSource::kAiQa;
    } else if (source == "comparison_qa") {
      item.source = QaSource::kComparisonQa;
    } else {
      throw Error(ErrorCode::kParseError, "unknown QA source '" + source + "'");
    }
    if (j.contains("query") && j.at("query").is_string()) item.query = j.at("query").get<std::string>();
    item.validate();
    return item;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad QA item: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kParseError) throw;
    throw Error(ErrorCode::kParseError, e.what());
  }
}

std::vector<QaItem> read_dataset(const std::string& path) {
  std::vector<QaItem> items;
  for (const auto& line : io::read_lines(path)) {
    if (text::trim(line).empty()) continue;
    items.push_back(qa_item_from_json(line));
  }
  return items;
}

void write_dataset(const std::string& path, const std::vector<QaItem>& items) {
  std::string out;
  for (const auto& item : items) {
    out += to_json_line(item);
    out += '\n';
  }
  io::write_file(path, out);
}

std::string render_generation_prompt(const std::vector<std::string>& documents) {
  std::string prompt(kQuestionGenerationTemplate);
  const auto pos = prompt.find("{documents}");
  prompt.replace(pos, std::string_view("{documents}").size(), text::join(documents, "\n\n"));
  return prompt;
}

std::vector<std::string> parse_question_list(std::string_view reply) {
  const auto open = reply.find('[');
  const auto close = reply.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw Error(ErrorCode::kMalformedGeneration, "reply holds no bracketed list");
  }
  const std::string_view body = reply.substr(open + 1, close - open - 1);
  std::vector<std::string> out;
  std::size_t i = 0;
  auto skip_space = [&] {
    while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
  };
  skip_space();
  while (i < body.size()) {
    const char quote = body[i];
    if (quote != '"' && quote != '\'') throw Error(ErrorCode::kMalformedGeneration, "list element is not quoted");
    ++i;
    std::string value;
    bool closed = false;
    while (i < body.size()) {
      const char c = body[i++];
      if (c == '\\' && i < body.size()) {
        const char e = body[i++];
        value.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
      } else if (c == quote) {
        closed = true;
        break;
      } else {
        value.push_back(c);
      }
    }
    if (!closed) throw Error(ErrorCode::kMalformedGeneration, "unterminated string in list");
    out.push_back(std::string(text::trim(value)));
    skip_space();
    if (i < body.size()) {
      if (body[i] != ',') throw Error(ErrorCode::kMalformedGeneration, "expected ',' between list elements");
      ++i;
      skip_space();
    }
  }
  if (out.size() != 2) {
    throw Error(ErrorCode::kMalformedGeneration, fmt::format("expected two questions, got {}", out.size()));
  }
  for (const auto& q : out) {
    if (q.empty()) throw Error(ErrorCode::kMalformedGeneration, "empty question in list");
  }
  return out;
}

std::string StubQuestionWriter::generate(const std::string& prompt, int /*max_output_tokens*/) const {
  std::string subject = "these documents";
  const auto docs = prompt.find("Documents:\n");
  if (docs != std::string::npos) {
    std::istringstream in(prompt.substr(docs + 11));
    for (std::string line; std::getline(in, line);) {
      for (std::string_view key : {"title: ", "name: "}) {
        if (line.rfind(key, 0) == 0 && line.size() > key.size()) {
          subject = line.substr(key.size());
          break;
        }
      }
      if (subject != "these documents") break;
    }
  }
  const auto quoted = [](const std::string& s) { return json(s).dump(); };
  return "[" + quoted("What is " + subject + " about?") + ", " + quoted("Who are the authors of " + subject + "?") +
         "]";
}

AiQaBuild build_ai_qa(const retriever::KnowledgeBase& kb, const llm::LlmProvider& provider, std::uint64_t seed,
                      std::optional<std::string> query) {
  AiQaBuild build;
  const auto plan = plan_clusters(kb.size());
  if (!plan.k) return build;
  const auto clustering = kmeans::kmeans(kb.embeddings(), *plan.k, {seed, 100});
  std::vector<std::vector<std::string>> groups(*plan.k);
  for (std::size_t d = 0; d < kb.size(); ++d) groups[clustering.assignments[d]].push_back(kb.documents()[d].text);

  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (groups[c].empty()) continue;
    ++build.clusters;
    const std::string reply = provider.generate(render_generation_prompt(groups[c]), 512);
    std::vector<std::string> questions;
    try {
      questions = parse_question_list(reply);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMalformedGeneration) throw;
      ++build.malformed;
      spdlog::warn("cluster {}: skipping malformed question list ({})", c, e.what());
      continue;
    }
    for (auto& q : questions) build.items.push_back({std::move(q), groups[c], QaSource::kAiQa, query});
  }
  return build;
}

std::vector<Comparison> comparisons_from_json(std::string_view json_text) {
  try {
    const auto root = ordered_json::parse(json_text);
    std::vector<Comparison> out;
    auto one = [&](const ordered_json& j) {
      Comparison c;
      c.title = j.value("title", "");
      for (const auto& p : j.at("papers")) {
        ComparisonPaper paper;
        paper.title = p.at("title").get<std::string>();
        for (const auto& [name, value] : p.at("properties").items()) {
          if (text::trim(name).empty()) throw Error(ErrorCode::kParseError, "property name is empty");
          paper.properties.emplace_back(name, value.is_string() ? value.get<std::string>() : value.dump());
        }
        c.papers.push_back(std::move(paper));
      }
      if (c.papers.empty()) throw Error(ErrorCode::kParseError, "comparison has no papers");
      out.push_back(std::move(c));
    };
    if (root.is_array()) {
      for (const auto& j : root) one(j);
    } else {
      one(root);
    }
    return out;
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad comparison file: ") + e.what());
  }
}

std::string normalize_title(std::string_view title) { return text::to_lower(text::collapse_whitespace(title)); }

std::string comparison_question(std::string_view paper, std::string_view property) {
  return fmt::format("In the paper \"{}\", what is the {}?", paper, property);
}

std::vector<QaItem> build_comparison_qa(const std::vector<Comparison>& comparisons,
                                        const std::set<std::string>& retrieved_titles) {
  std::set<std::string> wanted;
  for (const auto& t : retrieved_titles) wanted.insert(normalize_title(t));
  std::vector<QaItem> items;
  for (const auto& c : comparisons) {
    for (const auto& paper : c.papers) {
      if (!wanted.count(normalize_title(paper.title))) continue;
      for (const auto& [name, value] : paper.properties) {
        if (text::trim(value).empty()) continue;
        items.push_back({comparison_question(paper.title, name), {value}, QaSource::kComparisonQa, paper.title});
      }
    }
  }
  return items;
}

// ---------------------------------------------------------------- scoring

MetricReport score_answer(std::string_view answer, const QaItem& item, const embedding::EmbeddingProvider& embedder) {
  const std::string reference = item.reference();
  const auto cand = text::tokenize(answer);
  const auto ref = text::tokenize(reference);
  MetricReport m;
  const auto r1 = metrics::rouge1_tokens(cand, ref);
  const auto rl = metrics::rougeL_tokens(cand, ref);
  m.rouge1_p = r1.precision;
  m.rouge1_r = r1.recall;
  m.rouge1_f = r1.f1;
  m.rougeL_p = rl.precision;
  m.rougeL_r = rl.recall;
  m.rougeL_f = rl.f1;
  m.bleu1 = metrics::bleu1_tokens(cand, ref);
  m.semantic = metrics::semantic_score(answer, reference, embedder);
  if (item.source == QaSource::kComparisonQa) m.exact_match = metrics::exact_match(answer, reference);
  return m;
}

DatasetReport evaluate_dataset(const std::vector<QaItem>& items, const AnswerFn& answer_fn,
                               const embedding::EmbeddingProvider& embedder) {
  DatasetReport report;
  std::size_t em_count = 0;
  double em_sum = 0.0;
  for (const auto& item : items) {
    std::string answer;
    try {
      answer = answer_fn(item);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kPromptTooLarge) throw;
      ++report.excluded_prompt_too_large;
      continue;
    }
    auto m = score_answer(answer, item, embedder);
    auto& agg = report.aggregate;
    agg.rouge1_f += m.rouge1_f;
    agg.rouge1_p += m.rouge1_p;
    agg.rouge1_r += m.rouge1_r;
    agg.rougeL_f += m.rougeL_f;
    agg.rougeL_p += m.rougeL_p;
    agg.rougeL_r += m.rougeL_r;
    agg.bleu1 += m.bleu1;
    agg.semantic += m.semantic;
    if (m.exact_match) {
      em_sum += *m.exact_match;
      ++em_count;
    }
    report.items.push_back({item, std::move(answer), m});
  }
  report.evaluated = report.items.size();
  if (report.evaluated > 0) {
    const double n = static_cast<double>(report.evaluated);
    auto& agg = report.aggregate;
    for (double* v : {&agg.rouge1_f, &agg.rouge1_p, &agg.rouge1_r, &agg.rougeL_f, &agg.rougeL_p, &agg.rougeL_r,
                      &agg.bleu1, &agg.semantic}) {
      *v /= n;
    }
  }
  if (em_count > 0) report.aggregate.exact_match = em_sum / static_cast<double>(em_count);
  return report;
}

namespace {

ordered_json metrics_json(const MetricReport& m) {
  ordered_json j;
  j["rouge1_f"] = m.rouge1_f;
  j["rouge1_p"] = m.rouge1_p;
  j["rouge1_r"] = m.rouge1_r;
  j["rougeL_f"] = m.rougeL_f;
  j["rougeL_p"] = m.rougeL_p;
  j["rougeL_r"] = m.rougeL_r;
  j["bleu1"] = m.bleu1;
  j["semantic"] = m.semantic;
  j["exact_match"] = m.exact_match ? ordered_json(*m.exact_match) : ordered_json(nullptr);
  return j;
}

}  // namespace

std::string report_summary_json(const DatasetReport& report) {
  ordered_json j;
  j["evaluated"] = report.evaluated;
  j["excluded_prompt_too_large"] = report.excluded_prompt_too_large;
  j["aggregate"] = metrics_json(report.aggregate);
  j["notes"] = "ROUGE headline values are F1; precision and recall are reported alongside.";
  return j.dump(2);
}

std::string report_items_csv(const DatasetReport& report) {
  std::string out = "question,source,answer,rouge1_f,rougeL_f,bleu1,semantic,exact_match\n";
  for (const auto& r : report.items) {
    const auto& m = r.metrics;
    out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", io::csv_escape(r.item.question),
                       to_string(r.item.source), io::csv_escape(r.answer), m.rouge1_f, m.rougeL_f, m.bleu1,
                       m.semantic, m.exact_match ? fmt::format("{:.0f}", *m.exact_match) : std::string());
  }
  return out;
}

// ---------------------------------------------------------------- sweeps

std::string_view to_string(Representation rep) noexcept {
  switch (rep) {
    case Representation::kTfidf: return "tfidf";
    case Representation::kBm25: return "bm25";
    case Representation::kEmbedding: return "embedding";
  }
  return "?";
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 100; ++i) t.push_back(i / 100.0);
  return t;
}

namespace {

std::vector<double> bm25_similarities(std::string_view query, const std::vector<std::string>& docs,
                                      const SweepOptions& options) {
  std::vector<ranking::TokenList> tokens;
  tokens.reserve(docs.size());
  for (const auto& d : docs) tokens.push_back(text::tokenize(d));
  const auto stats = ranking::build_stats(tokens);
  const auto qtokens = text::tokenize(query);
  const auto& p = options.bm25;
  std::vector<double> sims(docs.size(), 0.0);

  if (options.bm25_mode == Bm25SweepMode::kNormalizedScore) {
    double hi = 0.0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      sims[d] = ranking::bm25plus_score(qtokens, d, stats, p);
      hi = std::max(hi, sims[d]);
    }
    for (auto& s : sims) s = hi > 0.0 ? s / hi : 0.0;
    return sims;
  }

  // query vector: its own BM25+ weights, treating it as one more document
  std::map<std::string, std::size_t> qtf;
  for (const auto& t : qtokens) ++qtf[t];
  std::map<std::string, double> qvec;
  double qsq = 0.0;
  for (const auto& [term, tf] : qtf) {
    const double idf = ranking::bm25plus_idf(stats.n, stats.document_frequency(term));
    const double w = ranking::bm25plus_term_weight(static_cast<double>(tf), static_cast<double>(qtokens.size()),
                                                   stats.avgdl, idf, p);
    qvec[term] = w;
    qsq += w * w;
  }
  const double qnorm = std::sqrt(qsq);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    double dotp = 0.0;
    double dsq = 0.0;
    for (const auto& [term, tf] : stats.term_freqs[d]) {
      const double idf = ranking::bm25plus_idf(stats.n, stats.document_frequency(term));
      const double w = ranking::bm25plus_term_weight(static_cast<double>(tf),
                                                     static_cast<double>(stats.doc_lengths[d]), stats.avgdl, idf, p);
      dsq += w * w;
      if (auto it = qvec.find(term); it != qvec.end()) dotp += w * it->second;
    }
    const double dnorm = std::sqrt(dsq);
    sims[d] = (qnorm > 0.0 && dnorm > 0.0) ? dotp / (qnorm * dnorm) : 0.0;
  }
  return sims;
}

}  // namespace

std::vector<SweepCurve> relevancy_sweep(std::string_view query, const std::vector<std::string>& docs,
                                        const embedding::EmbeddingProvider& embedder, const SweepOptions& options) {
  const auto& th = options.thresholds;
  for (std::size_t i = 0; i < th.size(); ++i) {
    if (!(th[i] >= 0.0 && th[i] <= 0.99) || (i > 0 && !(th[i] > th[i - 1]))) {
      throw Error(ErrorCode::kInvalidArgument, "thresholds must ascend within [0, 0.99]");
    }
  }
  std::vector<SweepCurve> curves;
  auto add = [&](Representation rep, std::vector<double> sims) {
    SweepCurve c;
    c.representation = rep;
    c.thresholds = th;
    for (double t : th) {
      c.retained.push_back(
          static_cast<std::size_t>(std::count_if(sims.begin(), sims.end(), [t](double s) { return s >= t; })));
    }
    c.similarities = std::move(sims);
    curves.push_back(std::move(c));
  };
  if (docs.empty()) {
    for (auto rep : {Representation::kTfidf, Representation::kBm25, Representation::kEmbedding}) add(rep, {});
    return curves;
  }
  add(Representation::kTfidf, retriever::TfidfIndex::build(docs).cosine_scores(query));
  add(Representation::kBm25, bm25_similarities(query, docs, options));

  const auto dvecs = embedder.embed(docs);
  const auto qvec = embedder.embed_one(std::string(query));
  std::vector<double> sims;
  sims.reserve(dvecs.size());
  for (const auto& v : dvecs) sims.push_back(embedding::cosine(qvec, v));
  add(Representation::kEmbedding, std::move(sims));
  return curves;
}

std::string sweep_csv(const std::vector<SweepCurve>& curves) {
  std::string out = "threshold,representation,retained_count\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
      out += fmt::format("{:.2f},{},{}\n", c.thresholds[i], to_string(c.representation), c.retained[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------- perf

LogEntry log_entry_from_json(std::string_view line) {
  try {
    const auto j = json::parse(line);
    return {j.at("latency_seconds").get<double>(), j.at("docs_returned").get<double>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bad telemetry line: ") + e.what());
  }
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

SeriesStats series_stats(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyLog, "no values");
  std::sort(values.begin(), values.end());
  SeriesStats s;
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / n;
  s.median = quantile(values, 0.5);
  s.p95 = quantile(values, 0.95);
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  s.zero_variance = m2 <= 1e-300 || values.front() == values.back();
  if (values.size() >= 3 && !s.zero_variance) {
    s.skewness = std::sqrt(n * (n - 1.0)) / (n - 2.0) * m3 / std::pow(m2, 1.5);
  }
  return s;
}

PerfStats perf_stats(const std::vector<LogEntry>& log) {
  if (log.empty()) throw Error(ErrorCode::kEmptyLog, "telemetry log is empty");
  std::vector<double> lat, docs;
  for (const auto& e : log) {
    lat.push_back(e.latency_seconds);
    docs.push_back(e.docs_returned);
  }
  return {log.size(), series_stats(std::move(lat)), series_stats(std::move(docs))};
}

std::string perf_stats_json(const PerfStats& stats) {
  auto series = [](const SeriesStats& s) {
    ordered_json j;
    j["mean"] = s.mean;
    j["median"] = s.median;
    j["p95"] = s.p95;
    j["skewness"] = s.skewness ? ordered_json(*s.skewness) : ordered_json(nullptr);
    j["zero_variance"] = s.zero_variance;
    return j;
  };
  ordered_json j;
  j["n"] = stats.n;
  j["latency_seconds"] = series(stats.latency);
  j["docs_returned"] = series(stats.docs);
  j["formulas"] = {
      {"skewness", "G1 = sqrt(n(n-1))/(n-2) * m3 / m2^1.5, m_k = mean((x - mean)^k); absent when n < 3 or m2 = 0"},
      {"quantiles", "linear interpolation at position q(n-1) of the sorted sample"},
  };
  return j.dump(2);
}

}  // namespace fedqa::evalkit
