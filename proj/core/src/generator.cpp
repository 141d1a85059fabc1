#include "fedqa/generator.hpp"

#include <set>

#include "fedqa/error.hpp"
#include "fedqa/text.hpp"

namespace fedqa::generator {

namespace {

constexpr std::string_view kContextMarker = "Given the following context, answer the below question:\n\n";
constexpr std::string_view kQuestionMarker = "\nQuestion: ";
constexpr std::string_view kAnswerMarker = "\nHelpful Answer:";

void replace_once(std::string& s, std::string_view from, std::string_view to) {
  const auto pos = s.find(from);
  if (pos != std::string::npos) s.replace(pos, from.size(), to);
}

std::vector<std::string> split_sentences(std::string_view context) {
  std::vector<std::string> out;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    const auto piece = text::trim(context.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
    start = end;
  };
  for (std::size_t i = 0; i < context.size(); ++i) {
    const char c = context[i];
    if (c == '\n') {
      emit(i);
      start = i + 1;
    } else if (c == '.' && (i + 1 == context.size() || context[i + 1] == ' ' || context[i + 1] == '\t' ||
                            context[i + 1] == '\r' || context[i + 1] == '\n')) {
      emit(i + 1);
    }
  }
  emit(context.size());
  return out;
}

}  // namespace

std::string render_context(const std::vector<std::string>& doc_texts, const std::vector<ChatTurn>& history) {
  std::vector<std::string> blocks = doc_texts;
  for (const auto& turn : history) blocks.push_back("Question: " + turn.question + "\nAnswer: " + turn.answer);
  return text::join(blocks, "\n\n");
}

std::string build_prompt(const std::vector<std::string>& doc_texts, const std::vector<ChatTurn>& history,
                         std::string_view question) {
  if (text::trim(question).empty()) throw Error(ErrorCode::kEmptyQuestion, "question is empty");
  std::string prompt(kPromptTemplate);
  // question first: a context containing "{question}" must stay literal
  replace_once(prompt, "{question}", question);
  replace_once(prompt, "{context}", render_context(doc_texts, history));
  return prompt;
}

std::string stub_generate(std::string_view prompt) {
  std::string_view context = prompt;
  std::string_view question;
  if (const auto c = prompt.find(kContextMarker); c != std::string_view::npos) {
    const auto body = c + kContextMarker.size();
    const auto a = prompt.rfind(kAnswerMarker);
    const auto q = a == std::string_view::npos ? prompt.rfind(kQuestionMarker) : prompt.rfind(kQuestionMarker, a);
    if (q != std::string_view::npos && q >= body) {
      context = prompt.substr(body, q - body);
      const auto qs = q + kQuestionMarker.size();
      question = prompt.substr(qs, (a == std::string_view::npos || a < qs ? prompt.size() : a) - qs);
    }
  }
  const auto qtokens = text::tokenize(question);
  const std::set<std::string> wanted(qtokens.begin(), qtokens.end());
  if (wanted.empty()) return std::string(kDontKnow);

  std::size_t best_overlap = 0;
  std::string best;
  for (const auto& sentence : split_sentences(context)) {
    const auto toks = text::tokenize(sentence);
    const std::set<std::string> seen(toks.begin(), toks.end());
    std::size_t overlap = 0;
    for (const auto& t : seen) overlap += wanted.count(t);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = sentence;
    }
  }
  return best_overlap == 0 ? std::string(kDontKnow) : best;
}

std::string StubLlm::generate(const std::string& prompt, int /*max_output_tokens*/) const {
  return stub_generate(prompt);
}

void GeneratorConfig::validate() const {
  if (context_char_budget == 0) throw Error(ErrorCode::kInvalidConfig, "context_char_budget must be positive");
  if (max_output_tokens <= 0) throw Error(ErrorCode::kInvalidConfig, "max_output_tokens must be positive");
  if (history_capacity == 0) throw Error(ErrorCode::kInvalidConfig, "history_capacity must be positive");
}

ChatSession::ChatSession(std::string id, std::string query, std::shared_ptr<const retriever::KnowledgeBase> kb,
                         std::vector<taxonomy::ScholarlyRecord> records, std::size_t history_capacity)
    : id_(std::move(id)),
      query_(std::move(query)),
      kb_(std::move(kb)),
      records_(std::move(records)),
      capacity_(history_capacity) {
  if (!kb_) throw Error(ErrorCode::kInvalidArgument, "session needs a knowledge base");
  if (capacity_ == 0) throw Error(ErrorCode::kInvalidArgument, "history capacity must be positive");
}

std::vector<ChatTurn> ChatSession::history() const {
  std::lock_guard lock(state_mutex_);
  return {turns_.begin(), turns_.end()};
}

void ChatSession::push_turn(ChatTurn turn) {
  std::lock_guard lock(state_mutex_);
  turns_.push_back(std::move(turn));
  while (turns_.size() > capacity_) turns_.pop_front();
}

Answer ChatSession::answer(std::string_view question, const retriever::EnsembleConfig& ensemble,
                           const embedding::EmbeddingProvider& embedder, const llm::LlmProvider& llm,
                           const GeneratorConfig& config) {
  config.validate();
  const std::string q = text::collapse_whitespace(question);
  if (q.empty()) throw Error(ErrorCode::kEmptyQuestion, "question is empty");

  std::lock_guard serial(answer_mutex_);
  const auto past = history();
  const auto ranked = retriever::ensemble_retrieve(q, *kb_, ensemble, embedder);

  std::vector<std::size_t> ids;
  std::vector<std::string> texts;
  for (const auto& d : ranked) {
    ids.push_back(d.doc_id);
    texts.push_back(kb_->documents()[d.doc_id].text);
  }
  std::string prompt = build_prompt(texts, past, q);
  while (text::utf8_length(prompt) > config.context_char_budget && !texts.empty()) {
    texts.pop_back();
    ids.pop_back();
    prompt = build_prompt(texts, past, q);
  }
  if (text::utf8_length(prompt) > config.context_char_budget) {
    throw Error(ErrorCode::kPromptTooLarge, "prompt exceeds the context budget even without documents");
  }

  Answer result;
  result.text = std::string(text::trim(llm.generate(prompt, config.max_output_tokens)));
  result.supporting_doc_ids = std::move(ids);
  result.prompt_chars = text::utf8_length(prompt);
  result.turn = {q, result.text, std::chrono::system_clock::now()};
  {
    std::lock_guard lock(state_mutex_);
    turns_.push_back(result.turn);
    while (turns_.size() > capacity_) turns_.pop_front();
    result.history_len = turns_.size();
  }
  return result;
}

Answer answer(ChatSession& session, std::string_view question, const retriever::EnsembleConfig& ensemble,
              const embedding::EmbeddingProvider& embedder, const llm::LlmProvider& llm,
              const GeneratorConfig& config) {
  return session.answer(question, ensemble, embedder, llm, config);
}

}  // namespace fedqa::generator
