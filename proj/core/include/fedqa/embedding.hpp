#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fedqa::embedding {

using Vector = std::vector<double>;

/// Turns texts into fixed-dimension vectors. Implementations are immutable
/// after construction and safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const noexcept = 0;
  /// One vector per text, in order. Throws Error(kProviderFailure).
  virtual std::vector<Vector> embed(const std::vector<std::string>& texts) const = 0;

  Vector embed_one(const std::string& text) const { return embed({text}).front(); }
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a_64(std::string_view data) noexcept;
/// 64-bit FNV-1 (multiply before xor).
std::uint64_t fnv1_64(std::string_view data) noexcept;

/// Offline stand-in for a sentence encoder: signed feature hashing of token
/// unigrams and bigrams. Bucket = FNV-1a(feature) mod D, sign from the parity
/// of FNV-1(feature), then L2 normalization. Text without tokens embeds to
/// the zero vector.
class LocalHashEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDimension = 512;

  explicit LocalHashEmbedder(std::size_t dimension = kDefaultDimension);

  std::size_t dimension() const noexcept override { return dimension_; }
  std::vector<Vector> embed(const std::vector<std::string>& texts) const override;

 private:
  std::size_t dimension_;
};

struct RemoteEmbedderConfig {
  std::string endpoint;
  std::size_t dimension = 0;
  /// Environment variable holding an optional bearer token.
  std::string token_env;
  std::chrono::duration<double> timeout{30.0};
};

/// POST {"texts": [...]} -> {"vectors": [[...], ...]}; vectors are
/// L2-normalized on receipt.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(RemoteEmbedderConfig config);

  std::size_t dimension() const noexcept override { return config_.dimension; }
  std::vector<Vector> embed(const std::vector<std::string>& texts) const override;

 private:
  RemoteEmbedderConfig config_;
};

double dot(const Vector& a, const Vector& b) noexcept;
double l2_norm(const Vector& v) noexcept;
/// Leaves the zero vector untouched.
void l2_normalize(Vector& v) noexcept;
/// Zero when either operand is the zero vector.
double cosine(const Vector& a, const Vector& b) noexcept;

}  // namespace fedqa::embedding
