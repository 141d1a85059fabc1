#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fedqa/taxonomy.hpp"
#include "oracles.hpp"

namespace fedqa::testing {

inline std::filesystem::path fixtures_dir() { return FEDQA_FIXTURES_DIR; }

/// Up to `max_docs` docs over a vocabulary "t0".."t<vocab-1>"; docs may be empty.
std::vector<Tokens> random_token_corpus(std::mt19937_64& rng, std::size_t max_docs = 20, std::size_t vocab = 10,
                                        std::size_t max_len = 12);
Tokens random_tokens(std::mt19937_64& rng, std::size_t vocab, std::size_t max_len);

/// Pseudo-word like "kavorimel", built from syllables.
std::string random_word(std::mt19937_64& rng);
std::string random_sentence(std::mt19937_64& rng, std::size_t words);

struct PlantedCorpus {
  std::vector<taxonomy::ScholarlyRecord> records;
  /// Entity label per record; records sharing a label are planted duplicates.
  std::vector<std::size_t> entity;
};

/// `entities` distinct works, some of which get 1-2 noisy copies (case,
/// punctuation, author format, DOI resolver prefix, missing abstract).
PlantedCorpus planted_duplicate_corpus(std::mt19937_64& rng, std::size_t entities);

/// Distinct random document texts.
std::vector<std::string> random_texts(std::mt19937_64& rng, std::size_t n, std::size_t words = 12);

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// Copies the fixture sources and registry into `dir` and returns the
/// registry path.
std::filesystem::path copy_fixture_sources(const std::filesystem::path& dir);

}  // namespace fedqa::testing
