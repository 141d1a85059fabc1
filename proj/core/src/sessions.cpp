#include "fedqa/sessions.hpp"

#include <fmt/format.h>

#include <chrono>
#include <json.hpp>

#include "fedqa/error.hpp"
#include "fedqa/json_io.hpp"
#include "record_json.hpp"

namespace fedqa::sessions {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::int64_t to_millis(std::chrono::system_clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

}  // namespace

SessionStore::SessionStore(std::size_t capacity, std::shared_ptr<const embedding::EmbeddingProvider> embedder,
                           std::size_t history_capacity, std::optional<std::filesystem::path> journal)
    : capacity_(capacity),
      embedder_(std::move(embedder)),
      history_capacity_(history_capacity),
      journal_(std::move(journal)),
      rng_(std::random_device{}()) {
  if (capacity_ == 0) throw Error(ErrorCode::kInvalidConfig, "session capacity must be at least 1");
  if (!embedder_) throw Error(ErrorCode::kInvalidArgument, "session store needs an embedder");
}

std::string SessionStore::next_id() {
  for (;;) {
    std::string id = fmt::format("{:016x}", rng_());
    if (!slots_.contains(id)) return id;
  }
}

void SessionStore::insert_locked(std::shared_ptr<generator::ChatSession> session) {
  const std::string id = session->id();
  lru_.push_front(id);
  slots_[id] = Slot{std::move(session), lru_.begin()};
  while (slots_.size() > capacity_) {
    slots_.erase(lru_.back());
    lru_.pop_back();
  }
}

std::shared_ptr<generator::ChatSession> SessionStore::create(std::string query,
                                                             std::vector<taxonomy::ScholarlyRecord> records,
                                                             std::shared_ptr<const retriever::KnowledgeBase> kb) {
  std::shared_ptr<generator::ChatSession> session;
  {
    std::lock_guard lock(mutex_);
    session = std::make_shared<generator::ChatSession>(next_id(), std::move(query), std::move(kb), std::move(records),
                                                       history_capacity_);
    insert_locked(session);
  }
  if (journal_) {
    ordered_json line;
    line["event"] = "session";
    line["id"] = session->id();
    line["query"] = session->query();
    line["records"] = ordered_json::array();
    for (const auto& r : session->records()) line["records"].push_back(detail::record_to_json(r));
    std::lock_guard lock(journal_mutex_);
    io::append_line(*journal_, line.dump());
  }
  return session;
}

std::shared_ptr<generator::ChatSession> SessionStore::find(const std::string& id) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = slots_.find(id); it != slots_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.position);
      return it->second.session;
    }
  }
  return journal_ ? restore(id) : nullptr;
}

std::shared_ptr<generator::ChatSession> SessionStore::get(const std::string& id) {
  auto session = find(id);
  if (!session) throw Error(ErrorCode::kSessionNotFound, "no session with id '" + id + "'");
  return session;
}

void SessionStore::record_turn(const std::string& id, const generator::ChatTurn& turn) {
  if (!journal_) return;
  ordered_json line;
  line["event"] = "turn";
  line["id"] = id;
  line["question"] = turn.question;
  line["answer"] = turn.answer;
  line["ts_ms"] = to_millis(turn.asked_at);
  std::lock_guard lock(journal_mutex_);
  io::append_line(*journal_, line.dump());
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return slots_.size();
}

std::shared_ptr<generator::ChatSession> SessionStore::restore(const std::string& id) {
  std::vector<std::string> lines;
  {
    std::lock_guard lock(journal_mutex_);
    if (!std::filesystem::exists(*journal_)) return nullptr;
    lines = io::read_lines(*journal_);
  }
  std::optional<std::string> query;
  std::vector<taxonomy::ScholarlyRecord> records;
  std::vector<generator::ChatTurn> turns;
  for (const auto& raw : lines) {
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error&) {
      continue;  // torn tail line
    }
    if (j.value("id", "") != id) continue;
    const auto event = j.value("event", "");
    if (event == "session") {
      query = j.value("query", "");
      records.clear();
      turns.clear();
      for (const auto& r : j.at("records")) records.push_back(detail::record_from_json(r));
    } else if (event == "turn" && query) {
      turns.push_back({j.value("question", ""), j.value("answer", ""),
                       std::chrono::system_clock::time_point(std::chrono::milliseconds(j.value("ts_ms", 0LL)))});
    }
  }
  if (!query) return nullptr;

  auto kb = std::make_shared<const retriever::KnowledgeBase>(retriever::KnowledgeBase::build(records, *embedder_));
  auto session = std::make_shared<generator::ChatSession>(id, *query, std::move(kb), std::move(records),
                                                          history_capacity_);
  for (auto& t : turns) session->push_turn(std::move(t));

  std::lock_guard lock(mutex_);
  if (auto it = slots_.find(id); it != slots_.end()) return it->second.session;  // raced with another restore
  insert_locked(session);
  return session;
}

}  // namespace fedqa::sessions
