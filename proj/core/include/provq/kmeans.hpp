#pragma once

#include <cstddef>
#include <vector>

#include "provq/rng.hpp"

namespace provq {

struct KMeansResult {
  std::vector<double> centroids;        // k x d, row-major
  std::vector<int> assignments;         // length n
  std::vector<double> inertia_history;  // post-assignment inertia per iteration
  int iterations = 0;
  bool converged = false;
};

// Lloyd's algorithm from k-means++ seeding. Stops at the assignment fixpoint
// or after max_iters. An empty cluster is re-seeded to the point farthest
// from its current centroid.
KMeansResult kmeans(const std::vector<double>& points, std::size_t n,
                    std::size_t d, std::size_t k, Rng& rng,
                    int max_iters = 100);

// Index of the Euclidean-nearest row of table (k x d); ties break to the
// lowest index.
std::size_t nearest_row(const double* point, const double* table,
                        std::size_t k, std::size_t d);

}  // namespace provq
