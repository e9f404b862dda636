#include "provq/kmeans.hpp"

#include <cmath>
#include <limits>

#include "provq/errors.hpp"

namespace provq {

namespace {

double sq_dist(const double* a, const double* b, std::size_t d) {
  double acc = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    acc += diff * diff;
  }
  return acc;
}

// k-means++ seeding: first centroid uniform, the rest proportional to the
// squared distance to the nearest chosen centroid.
std::vector<double> seed_centroids(const std::vector<double>& points,
                                   std::size_t n, std::size_t d, std::size_t k,
                                   Rng& rng) {
  std::vector<double> centroids(k * d);
  const std::size_t first = rng.below(n);
  for (std::size_t j = 0; j < d; ++j) centroids[j] = points[first * d + j];

  std::vector<double> dist2(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist2[i] = sq_dist(points.data() + i * d, centroids.data(), d);
  }

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double w : dist2) total += w;

    std::size_t pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        target -= dist2[i];
        if (target <= 0.0) {
          pick = i;
          break;
        }
        pick = i;  // falls through to the last point on rounding
      }
    } else {
      pick = rng.below(n);  // all points already coincide with a centroid
    }

    double* row = centroids.data() + c * d;
    for (std::size_t j = 0; j < d; ++j) row[j] = points[pick * d + j];
    for (std::size_t i = 0; i < n; ++i) {
      const double nd = sq_dist(points.data() + i * d, row, d);
      if (nd < dist2[i]) dist2[i] = nd;
    }
  }
  return centroids;
}

}  // namespace

std::size_t nearest_row(const double* point, const double* table,
                        std::size_t k, std::size_t d) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    const double dist = sq_dist(point, table + i * d, d);
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  return best;
}

KMeansResult kmeans(const std::vector<double>& points, std::size_t n,
                    std::size_t d, std::size_t k, Rng& rng, int max_iters) {
  if (k < 1) throw ConfigError("kmeans: k must be >= 1");
  if (n < k) {
    throw ConfigError("kmeans: " + std::to_string(n) +
                      " points cannot seed " + std::to_string(k) +
                      " centroids");
  }
  if (points.size() != n * d) {
    throw DimensionError("kmeans: points buffer does not match n*d");
  }

  KMeansResult result;
  result.centroids = seed_centroids(points, n, d, k, rng);
  result.assignments.assign(n, -1);

  std::vector<double> sums(k * d);
  std::vector<std::size_t> counts(k);

  for (int iter = 0; iter < max_iters; ++iter) {
    // Assignment phase.
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a =
          nearest_row(points.data() + i * d, result.centroids.data(), k, d);
      inertia += sq_dist(points.data() + i * d,
                         result.centroids.data() + a * d, d);
      if (result.assignments[i] != static_cast<int>(a)) {
        result.assignments[i] = static_cast<int>(a);
        changed = true;
      }
    }
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;
    if (!changed) {
      result.converged = true;
      break;
    }

    // Update phase.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = static_cast<std::size_t>(result.assignments[i]);
      ++counts[a];
      for (std::size_t j = 0; j < d; ++j) sums[a * d + j] += points[i * d + j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        result.centroids[c * d + j] =
            sums[c * d + j] / static_cast<double>(counts[c]);
      }
    }

    // Re-seed each empty cluster to the point farthest from its centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      double worst = -1.0;
      std::size_t steal = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto a = static_cast<std::size_t>(result.assignments[i]);
        if (counts[a] <= 1) continue;  // do not empty another cluster
        const double dist = sq_dist(points.data() + i * d,
                                    result.centroids.data() + a * d, d);
        if (dist > worst) {
          worst = dist;
          steal = i;
        }
      }
      if (worst < 0.0) break;  // every cluster is a singleton
      const auto old = static_cast<std::size_t>(result.assignments[steal]);
      --counts[old];
      ++counts[c];
      result.assignments[steal] = static_cast<int>(c);
      for (std::size_t j = 0; j < d; ++j) {
        result.centroids[c * d + j] = points[steal * d + j];
      }
    }
  }
  return result;
}

}  // namespace provq
