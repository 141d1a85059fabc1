#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <thread>

#include "fedqa/connectors.hpp"
#include "fedqa/error.hpp"
#include "fedqa/federation.hpp"
#include "generators.hpp"

using namespace fedqa;
using namespace fedqa::federation;
using fedqa::testing::fixtures_dir;

namespace {

SourceDescriptor fixture_desc(const std::string& id, const std::string& dir, double timeout = 5.0,
                              double delay = 0.0) {
  SourceDescriptor d;
  d.id = id;
  d.display_name = id;
  d.kind = SourceKind::kFixture;
  d.endpoint = (fixtures_dir() / "sources" / dir).string();
  d.timeout = Seconds{timeout};
  d.fixture_delay = Seconds{delay};
  return d;
}

std::shared_ptr<SourceRegistry> three_sources() {
  auto reg = std::make_shared<SourceRegistry>();
  reg->register_source(fixture_desc("alpha", "alpha"));
  reg->register_source(fixture_desc("beta", "beta"));
  reg->register_source(fixture_desc("gamma", "gamma"));
  return reg;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

class ThrowingConnector final : public Connector {
 public:
  std::vector<SourceRecord> fetch(const std::string&, std::stop_token) override {
    throw Error(ErrorCode::kProviderFailure, "boom");
  }
};

}  // namespace

TEST(Registry, RegisterAndList) {
  SourceRegistry reg;
  reg.register_source(fixture_desc("dblp-fixture", "alpha"));
  const auto list = reg.list_sources();
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0].id, "dblp-fixture");
}

TEST(Registry, DuplicateIdRejected) {
  SourceRegistry reg;
  reg.register_source(fixture_desc("x", "alpha"));
  EXPECT_EQ(code_of([&] { reg.register_source(fixture_desc("x", "beta")); }), ErrorCode::kDuplicateSourceId);
}

TEST(Registry, ZeroTimeoutRejected) {
  SourceRegistry reg;
  EXPECT_EQ(code_of([&] { reg.register_source(fixture_desc("x", "alpha", 0.0)); }), ErrorCode::kInvalidDescriptor);
  auto d = fixture_desc("", "alpha");
  EXPECT_EQ(code_of([&] { reg.register_source(d); }), ErrorCode::kInvalidDescriptor);
}

TEST(Registry, FromJsonResolvesRelativeDirs) {
  const auto reg = SourceRegistry::from_file(fixtures_dir() / "registry.json");
  ASSERT_EQ(reg.size(), 3u);
  const auto* alpha = reg.find("alpha");
  ASSERT_NE(alpha, nullptr);
  EXPECT_EQ(std::filesystem::path(alpha->descriptor.endpoint), fixtures_dir() / "sources/alpha");
  EXPECT_EQ(code_of([] { SourceRegistry::from_json_text("{\"nope\": 1}"); }), ErrorCode::kInvalidConfig);
}

TEST(Federation, FetchSourceMatchesPlantedRecords) {
  Federator fed(three_sources());
  const auto batch = fed.fetch_source("alpha", "ontology learning");
  EXPECT_EQ(batch.status, BatchStatus::kOk);
  EXPECT_EQ(batch.records.size(), 2u);
  EXPECT_EQ(code_of([&] { fed.fetch_source("nope", "x"); }), ErrorCode::kUnknownSource);
  EXPECT_EQ(code_of([&] { fed.fetch_source("alpha", "  "); }), ErrorCode::kEmptyQuery);
}

TEST(Federation, SearchAllOrderedBySourceId) {
  Federator fed(three_sources());
  const auto resp = fed.search_all("ontology learning");
  ASSERT_EQ(resp.batches.size(), 3u);
  EXPECT_EQ(resp.batches[0].source_id, "alpha");
  EXPECT_EQ(resp.batches[1].source_id, "beta");
  EXPECT_EQ(resp.batches[2].source_id, "gamma");
  for (const auto& b : resp.batches) EXPECT_EQ(b.status, BatchStatus::kOk);
  EXPECT_EQ(resp.record_count(), 6u);
  EXPECT_GE(resp.total_latency.count(), 0.0);
}

TEST(Federation, EmptyQueryAndNoSources) {
  auto reg = three_sources();
  Federator fed(reg);
  EXPECT_EQ(code_of([&] { fed.search_all(""); }), ErrorCode::kEmptyQuery);
  for (const char* id : {"alpha", "beta", "gamma"}) reg->set_enabled(id, false);
  EXPECT_EQ(code_of([&] { fed.search_all("x"); }), ErrorCode::kNoSourcesEnabled);
}

TEST(Federation, DelayedSourceTimesOutWithinSlack) {
  auto reg = std::make_shared<SourceRegistry>();
  reg->register_source(fixture_desc("alpha", "alpha"));
  reg->register_source(fixture_desc("beta", "beta"));
  reg->register_source(fixture_desc("slow", "gamma", 1.0, 20.0));
  Federator fed(reg);
  const auto started = std::chrono::steady_clock::now();
  const auto resp = fed.search_all("ontology learning");
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  ASSERT_EQ(resp.batches.size(), 3u);
  EXPECT_EQ(resp.batches[0].status, BatchStatus::kOk);
  EXPECT_EQ(resp.batches[1].status, BatchStatus::kOk);
  EXPECT_EQ(resp.batches[2].status, BatchStatus::kTimeout);
  EXPECT_TRUE(resp.batches[2].records.empty());
  EXPECT_EQ(resp.batches[0].records.size() + resp.batches[1].records.size(), 4u);
  EXPECT_LE(resp.batches[2].latency.count(), 1.0 + 0.5);
  EXPECT_LT(elapsed, 5.0);
}

TEST(Federation, FailingSourceDoesNotSuppressOthers) {
  Federator healthy(three_sources());
  const auto base = healthy.search_all("ontology learning");

  auto reg = std::make_shared<SourceRegistry>();
  reg->register_source(fixture_desc("alpha", "alpha"));
  auto bad = fixture_desc("beta", "beta");
  reg->register_source(bad, std::make_shared<ThrowingConnector>());
  reg->register_source(fixture_desc("gamma", "gamma"));
  Federator fed(reg);
  const auto resp = fed.search_all("ontology learning");
  EXPECT_EQ(resp.batches[1].status, BatchStatus::kError);
  EXPECT_NE(resp.batches[1].message.find("boom"), std::string::npos);
  for (std::size_t i : {0u, 2u}) {
    ASSERT_EQ(resp.batches[i].records.size(), base.batches[i].records.size());
    for (std::size_t r = 0; r < resp.batches[i].records.size(); ++r) {
      EXPECT_EQ(resp.batches[i].records[r].native_fields, base.batches[i].records[r].native_fields);
    }
  }
}

TEST(Federation, MissingFixtureDirectoryIsErrorBatch) {
  auto reg = std::make_shared<SourceRegistry>();
  reg->register_source(fixture_desc("ghost", "does-not-exist"));
  Federator fed(reg);
  const auto resp = fed.search_all("x");
  ASSERT_EQ(resp.batches.size(), 1u);
  EXPECT_EQ(resp.batches[0].status, BatchStatus::kError);
}

TEST(Federation, BoundedParallelism) {
  auto reg = std::make_shared<SourceRegistry>();
  for (int i = 0; i < 4; ++i) reg->register_source(fixture_desc("s" + std::to_string(i), "alpha", 5.0, 0.2));
  Federator fed(reg, FederationOptions{2});
  const auto started = std::chrono::steady_clock::now();
  const auto resp = fed.search_all("ontology");
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  EXPECT_EQ(resp.batches.size(), 4u);
  // two waves of 0.2 s with two workers
  EXPECT_GE(elapsed, 0.38);
}

TEST(Federation, RandomDelaysDoNotChangeOrder) {
  std::mt19937_64 rng(7);
  std::vector<std::string> reference;
  for (int trial = 0; trial < 5; ++trial) {
    auto reg = std::make_shared<SourceRegistry>();
    std::uniform_real_distribution<double> delay(0.0, 0.05);
    reg->register_source(fixture_desc("gamma", "gamma", 5.0, delay(rng)));
    reg->register_source(fixture_desc("alpha", "alpha", 5.0, delay(rng)));
    reg->register_source(fixture_desc("beta", "beta", 5.0, delay(rng)));
    Federator fed(reg);
    std::vector<std::string> order;
    for (const auto& b : fed.search_all("ontology").batches) {
      for (const auto& r : b.records) order.push_back(b.source_id + ":" + std::get<std::string>(r.native_fields[1].second));
    }
    if (trial == 0) reference = order;
    EXPECT_EQ(order, reference);
  }
}
