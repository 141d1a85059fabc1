#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fedqa/embedding.hpp"

namespace fedqa::kmeans {

using embedding::Vector;

struct KMeansOptions {
  std::uint64_t seed = 42;
  int max_iterations = 100;
};

struct KMeansResult {
  std::vector<std::size_t> assignments;
  std::vector<Vector> centroids;
  /// Sum of squared distances after each assignment step, first one included.
  std::vector<double> inertia_history;
  int iterations = 0;
  bool converged = false;

  double inertia() const noexcept { return inertia_history.empty() ? 0.0 : inertia_history.back(); }
};

double squared_distance(const Vector& a, const Vector& b) noexcept;

/// k-means++ seeding from a mt19937_64, then Lloyd steps until the
/// assignment stops changing or max_iterations. Throws kInvalidArgument for
/// k == 0 or ragged input, kKTooLarge for k > n.
KMeansResult kmeans(const std::vector<Vector>& points, std::size_t k, const KMeansOptions& options = {});

}  // namespace fedqa::kmeans
