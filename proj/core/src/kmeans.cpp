#include "fedqa/kmeans.hpp"

#include <limits>
#include <random>
#include <tuple>

#include "fedqa/error.hpp"

namespace fedqa::kmeans {

namespace {

// mt19937_64 output mapped to [0, 1) by hand so results do not depend on the
// standard library's distribution implementation.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t nearest(const Vector& p, const std::vector<Vector>& centroids, double* dist_out) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}

std::vector<Vector> seed_plus_plus(const std::vector<Vector>& points, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<Vector> centroids;
  std::vector<bool> chosen(n, false);
  std::size_t first = std::min<std::size_t>(static_cast<std::size_t>(unit(rng) * static_cast<double>(n)), n - 1);
  centroids.push_back(points[first]);
  chosen[first] = true;
  std::vector<double> d2(n);
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest(points[i], centroids, &d2[i]);
      if (chosen[i]) d2[i] = 0.0;
      total += d2[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > target) break;
      }
    }
    if (pick == n) {
      // every remaining point coincides with a centroid
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    chosen[pick] = true;
    centroids.push_back(points[pick]);
  }
  return centroids;
}

}  // namespace

double squared_distance(const Vector& a, const Vector& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

KMeansResult kmeans(const std::vector<Vector>& points, std::size_t k, const KMeansOptions& options) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (k > points.size()) {
    throw Error(ErrorCode::kKTooLarge,
                "k=" + std::to_string(k) + " exceeds the number of points (" + std::to_string(points.size()) + ")");
  }
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::kInvalidArgument, "points have different dimensions");
  }

  std::mt19937_64 rng(options.seed);
  KMeansResult result;
  result.centroids = seed_plus_plus(points, k, rng);
  const std::size_t n = points.size();
  result.assignments.assign(n, 0);
  std::vector<double> dist(n);

  auto assign = [&]() {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = nearest(points[i], result.centroids, &dist[i]);
      if (c != result.assignments[i]) changed = true;
      result.assignments[i] = c;
      inertia += dist[i];
    }
    return std::pair{changed, inertia};
  };

  auto [changed, inertia] = assign();
  result.inertia_history.push_back(inertia);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // repair empty clusters by moving the worst-fitting point into them
    std::vector<std::size_t> sizes(k, 0);
    for (auto a : result.assignments) ++sizes[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[result.assignments[i]] <= 1) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      if (far == n) break;
      --sizes[result.assignments[far]];
      result.assignments[far] = c;
      dist[far] = 0.0;
      sizes[c] = 1;
    }
    std::vector<Vector> sums(k, Vector(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[result.assignments[i]];
      for (std::size_t j = 0; j < dim; ++j) s[j] += points[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < dim; ++j) sums[c][j] /= static_cast<double>(sizes[c]);
    }
    result.centroids = std::move(sums);
    ++result.iterations;
    std::tie(changed, inertia) = assign();
    result.inertia_history.push_back(inertia);
    if (!changed) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace fedqa::kmeans
