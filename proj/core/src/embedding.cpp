#include "fedqa/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <json.hpp>

#include "fedqa/error.hpp"
#include "fedqa/text.hpp"
#include "http.hpp"

namespace fedqa::embedding {

namespace {
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
}  // namespace

std::uint64_t fnv1a_64(std::string_view data) noexcept {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : data) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t fnv1_64(std::string_view data) noexcept {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : data) {
    h *= kFnvPrime;
    h ^= c;
  }
  return h;
}

double dot(const Vector& a, const Vector& b) noexcept {
  const std::size_t n = std::min(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double l2_norm(const Vector& v) noexcept { return std::sqrt(dot(v, v)); }

void l2_normalize(Vector& v) noexcept {
  const double norm = l2_norm(v);
  if (norm == 0.0) return;
  for (double& x : v) x /= norm;
}

double cosine(const Vector& a, const Vector& b) noexcept {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

// ---------------------------------------------------------------- local

LocalHashEmbedder::LocalHashEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw Error(ErrorCode::kInvalidConfig, "embedding dimension must be positive");
}

std::vector<Vector> LocalHashEmbedder::embed(const std::vector<std::string>& texts) const {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    Vector v(dimension_, 0.0);
    const auto tokens = text::tokenize(t);
    auto add = [&](std::string_view feature) {
      const auto bucket = fnv1a_64(feature) % dimension_;
      v[bucket] += (fnv1_64(feature) & 1U) == 0 ? 1.0 : -1.0;
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      add(tokens[i]);
      if (i + 1 < tokens.size()) add(tokens[i] + " " + tokens[i + 1]);
    }
    l2_normalize(v);
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------- remote

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig config) : config_(std::move(config)) {
  if (config_.dimension == 0) throw Error(ErrorCode::kInvalidConfig, "remote embedder needs a dimension");
  http::parse_url(config_.endpoint);
}

std::vector<Vector> RemoteEmbedder::embed(const std::vector<std::string>& texts) const {
  if (texts.empty()) return {};
  using json = nlohmann::json;
  http::Headers headers{{"Accept", "application/json"}};
  if (!config_.token_env.empty()) {
    if (const char* token = std::getenv(config_.token_env.c_str()); token != nullptr && *token != '\0') {
      headers.emplace_back("Authorization", std::string("Bearer ") + token);
    }
  }
  const auto response =
      http::post_json(http::parse_url(config_.endpoint), json{{"texts", texts}}.dump(), headers, config_.timeout);
  if (response.status != 200) {
    throw Error(ErrorCode::kProviderFailure, "embedding service returned HTTP " + std::to_string(response.status));
  }
  std::vector<Vector> vectors;
  try {
    const auto body = json::parse(response.body);
    vectors = body.at("vectors").get<std::vector<Vector>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderFailure, std::string("embedding service sent a malformed body: ") + e.what());
  }
  if (vectors.size() != texts.size()) {
    throw Error(ErrorCode::kProviderFailure, "embedding service returned the wrong number of vectors");
  }
  for (auto& v : vectors) {
    if (v.size() != config_.dimension) {
      throw Error(ErrorCode::kProviderFailure, "embedding service returned vectors of dimension " +
                                                   std::to_string(v.size()) + ", expected " +
                                                   std::to_string(config_.dimension));
    }
    l2_normalize(v);
  }
  return vectors;
}

}  // namespace fedqa::embedding
