#pragma once

#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "fedqa/embedding.hpp"
#include "fedqa/generator.hpp"

namespace fedqa::sessions {

/// LRU table of chat sessions. With a journal, session creation and every
/// turn are appended as JSON lines, and a session missing from memory
/// (evicted, or from an earlier process) is rebuilt from the journal.
class SessionStore {
 public:
  SessionStore(std::size_t capacity, std::shared_ptr<const embedding::EmbeddingProvider> embedder,
               std::size_t history_capacity = 5, std::optional<std::filesystem::path> journal = std::nullopt);

  std::shared_ptr<generator::ChatSession> create(std::string query, std::vector<taxonomy::ScholarlyRecord> records,
                                                 std::shared_ptr<const retriever::KnowledgeBase> kb);

  /// Null when unknown.
  std::shared_ptr<generator::ChatSession> find(const std::string& id);
  /// Throws kSessionNotFound.
  std::shared_ptr<generator::ChatSession> get(const std::string& id);

  /// Journals a completed turn; a no-op without a journal.
  void record_turn(const std::string& id, const generator::ChatTurn& turn);

  std::size_t size() const;
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  using Lru = std::list<std::string>;
  struct Slot {
    std::shared_ptr<generator::ChatSession> session;
    Lru::iterator position;
  };

  std::string next_id();
  void insert_locked(std::shared_ptr<generator::ChatSession> session);
  std::shared_ptr<generator::ChatSession> restore(const std::string& id);

  std::size_t capacity_;
  std::shared_ptr<const embedding::EmbeddingProvider> embedder_;
  std::size_t history_capacity_;
  std::optional<std::filesystem::path> journal_;

  mutable std::mutex mutex_;
  std::unordered_map<std::string, Slot> slots_;
  Lru lru_;  // front = most recent
  std::mt19937_64 rng_;
  std::mutex journal_mutex_;
};

}  // namespace fedqa::sessions
