#include "generators.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <set>

#include "fedqa/text.hpp"

namespace fedqa::testing {

namespace fs = std::filesystem;

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

const std::vector<std::string> kSyllables = {"ka", "vo", "ri", "mel", "tan", "su", "pre", "lo", "dex", "nu",
                                             "bar", "qi", "zen", "fo", "ly", "ham", "gri", "op", "tu", "wes"};

const std::vector<std::string> kFirst = {"Ada", "Alan", "Grace", "Edsger", "Barbara", "Donald", "Frances",
                                         "John", "Leslie", "Margaret", "Niklaus", "Radia", "Tim", "Yann"};
const std::vector<std::string> kLast = {"Lovelace", "Turing", "Hopper", "Dijkstra", "Liskov", "Knuth", "Allen",
                                        "McCarthy", "Lamport", "Hamilton", "Wirth", "Perlman", "Berners", "LeCun"};

}  // namespace

Tokens random_tokens(std::mt19937_64& rng, std::size_t vocab, std::size_t max_len) {
  Tokens out(pick(rng, max_len + 1));
  for (auto& t : out) t = "t" + std::to_string(pick(rng, vocab));
  return out;
}

std::vector<Tokens> random_token_corpus(std::mt19937_64& rng, std::size_t max_docs, std::size_t vocab,
                                        std::size_t max_len) {
  std::vector<Tokens> corpus(1 + pick(rng, max_docs));
  for (auto& d : corpus) d = random_tokens(rng, vocab, max_len);
  return corpus;
}

std::string random_word(std::mt19937_64& rng) {
  std::string w;
  const std::size_t parts = 2 + pick(rng, 3);
  for (std::size_t i = 0; i < parts; ++i) w += kSyllables[pick(rng, kSyllables.size())];
  return w;
}

std::string random_sentence(std::mt19937_64& rng, std::size_t words) {
  std::string s;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) s += ' ';
    s += random_word(rng);
  }
  return s;
}

std::vector<std::string> random_texts(std::mt19937_64& rng, std::size_t n, std::size_t words) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    auto s = random_sentence(rng, words);
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

PlantedCorpus planted_duplicate_corpus(std::mt19937_64& rng, std::size_t entities) {
  using taxonomy::Facet;
  PlantedCorpus out;
  const std::vector<Facet> facets = {Facet::kArticle, Facet::kDataset, Facet::kSoftwareApplication};
  for (std::size_t e = 0; e < entities; ++e) {
    taxonomy::ScholarlyRecord base;
    base.facet = facets[pick(rng, facets.size())];
    base.title = random_sentence(rng, 4 + pick(rng, 4));
    base.title[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(base.title[0])));
    const std::size_t n_auth = 1 + pick(rng, 3);
    for (std::size_t a = 0; a < n_auth; ++a) base.authors.push_back(kFirst[pick(rng, kFirst.size())] + " " + kLast[pick(rng, kLast.size())]);
    base.abstract = random_sentence(rng, 15);
    base.date_published = taxonomy::PublicationDate{static_cast<int>(1990 + pick(rng, 35)), 1 + static_cast<int>(pick(rng, 12)), 1, false};
    if (pick(rng, 2) == 0) base.doi = "10." + std::to_string(1000 + pick(rng, 9000)) + "/" + random_word(rng);
    base.source_ids = {"s" + std::to_string(pick(rng, 3))};
    out.records.push_back(base);
    out.entity.push_back(e);

    const std::size_t copies = pick(rng, 3);  // 0, 1 or 2 duplicates
    for (std::size_t c = 0; c < copies; ++c) {
      auto dup = base;
      dup.source_ids = {"s" + std::to_string(3 + c)};
      switch (pick(rng, 4)) {
        case 0: dup.title = text::to_lower(dup.title) + "."; break;
        case 1: {
          // "Last, First" author format
          for (auto& name : dup.authors) {
            const auto sp = name.find(' ');
            name = name.substr(sp + 1) + ", " + name.substr(0, sp);
          }
          break;
        }
        case 2: dup.abstract.reset(); break;
        default: {
          for (auto& ch : dup.title) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
          break;
        }
      }
      if (dup.doi && pick(rng, 2) == 0) dup.doi.reset();
      out.records.push_back(std::move(dup));
      out.entity.push_back(e);
    }
  }
  // shuffle so duplicates are not adjacent
  std::vector<std::size_t> order(out.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  PlantedCorpus shuffled;
  for (auto i : order) {
    shuffled.records.push_back(out.records[i]);
    shuffled.entity.push_back(out.entity[i]);
  }
  return shuffled;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("fedqa-test-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path copy_fixture_sources(const fs::path& dir) {
  fs::copy(fixtures_dir() / "sources", dir / "sources", fs::copy_options::recursive);
  fs::copy_file(fixtures_dir() / "registry.json", dir / "registry.json");
  return dir / "registry.json";
}

}  // namespace fedqa::testing
