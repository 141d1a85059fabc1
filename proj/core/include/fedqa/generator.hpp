#pragma once

// Prompt assembly, the offline extractive stub and conversational sessions.

#include <chrono>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "fedqa/llm.hpp"
#include "fedqa/retriever.hpp"
#include "fedqa/taxonomy.hpp"

namespace fedqa::generator {

inline constexpr std::string_view kPromptTemplate =
    "Provide your answers only on the knowledge provided here. Do not use any outside knowledge.\n"
    "If you don't know the answer, say that you don't know. Don't try to make up an answer.\n"
    "\n"
    "Given the following context, answer the below question:\n"
    "\n"
    "{context}\n"
    "Question: {question}\n"
    "Helpful Answer:";

inline constexpr std::string_view kDontKnow = "I don't know.";

struct ChatTurn {
  std::string question;
  std::string answer;
  std::chrono::system_clock::time_point asked_at{};

  bool operator==(const ChatTurn&) const = default;
};

/// Document texts joined by blank lines, then prior turns rendered as
/// "Question: q\nAnswer: a".
std::string render_context(const std::vector<std::string>& doc_texts, const std::vector<ChatTurn>& history);

std::string build_prompt(const std::vector<std::string>& doc_texts, const std::vector<ChatTurn>& history,
                         std::string_view question);

/// Extractive answer: the context sentence sharing the most distinct tokens
/// with the question (earliest wins ties). Sentences end at a newline or at a
/// period followed by whitespace. No overlap gives kDontKnow.
std::string stub_generate(std::string_view prompt);

class StubLlm final : public llm::LlmProvider {
 public:
  std::string generate(const std::string& prompt, int max_output_tokens) const override;
};

struct GeneratorConfig {
  std::size_t context_char_budget = 24000;
  int max_output_tokens = 512;
  std::size_t history_capacity = 5;

  void validate() const;
};

struct Answer {
  std::string text;
  /// Knowledge-base doc ids actually placed in the prompt, in fused order.
  std::vector<std::size_t> supporting_doc_ids;
  std::size_t prompt_chars = 0;
  /// The turn appended to the history and the history length right after.
  ChatTurn turn;
  std::size_t history_len = 0;
};

/// One conversation bound to a search result. Calls to answer() on the same
/// session are serialized.
class ChatSession {
 public:
  ChatSession(std::string id, std::string query, std::shared_ptr<const retriever::KnowledgeBase> kb,
              std::vector<taxonomy::ScholarlyRecord> records, std::size_t history_capacity = 5);

  const std::string& id() const noexcept { return id_; }
  const std::string& query() const noexcept { return query_; }
  const retriever::KnowledgeBase& knowledge_base() const noexcept { return *kb_; }
  const std::vector<taxonomy::ScholarlyRecord>& records() const noexcept { return records_; }
  std::size_t history_capacity() const noexcept { return capacity_; }

  /// Oldest first.
  std::vector<ChatTurn> history() const;
  /// Appends, evicting the oldest turn beyond capacity.
  void push_turn(ChatTurn turn);

  Answer answer(std::string_view question, const retriever::EnsembleConfig& ensemble,
                const embedding::EmbeddingProvider& embedder, const llm::LlmProvider& llm,
                const GeneratorConfig& config = {});

 private:
  std::string id_;
  std::string query_;
  std::shared_ptr<const retriever::KnowledgeBase> kb_;
  std::vector<taxonomy::ScholarlyRecord> records_;
  std::size_t capacity_;
  mutable std::mutex state_mutex_;
  std::mutex answer_mutex_;
  std::deque<ChatTurn> turns_;
};

/// Throws kEmptyQuestion for blank questions, kPromptTooLarge when even a
/// prompt without documents exceeds the budget. Tail documents are dropped
/// until the prompt fits. History is only updated on success.
Answer answer(ChatSession& session, std::string_view question, const retriever::EnsembleConfig& ensemble,
              const embedding::EmbeddingProvider& embedder, const llm::LlmProvider& llm,
              const GeneratorConfig& config = {});

}  // namespace fedqa::generator
