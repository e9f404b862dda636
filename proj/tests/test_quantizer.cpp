#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "provq/errors.hpp"
#include "provq/kmeans.hpp"
#include "provq/metrics.hpp"
#include "provq/quantizer.hpp"
#include "support/testutil.hpp"

using namespace provq;

namespace {

Codebook two_codes() {
  return Codebook::from_values(2, 2, {0.0, 0.0, 1.0, 1.0});
}

// Brute-force minimum within-cluster SSE over every 2-partition.
double best_two_partition_sse(const std::vector<double>& pts, std::size_t n,
                              std::vector<double>* best_centroids) {
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    double sum[2][2] = {{0, 0}, {0, 0}};
    double cnt[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      const int side = (mask >> i) & 1u;
      sum[side][0] += pts[2 * i];
      sum[side][1] += pts[2 * i + 1];
      cnt[side] += 1.0;
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int side = (mask >> i) & 1u;
      const double cx = sum[side][0] / cnt[side];
      const double cy = sum[side][1] / cnt[side];
      const double dx = pts[2 * i] - cx;
      const double dy = pts[2 * i + 1] - cy;
      sse += dx * dx + dy * dy;
    }
    if (sse < best) {
      best = sse;
      if (best_centroids) {
        *best_centroids = {sum[0][0] / cnt[0], sum[0][1] / cnt[0],
                           sum[1][0] / cnt[1], sum[1][1] / cnt[1]};
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("nearest_code basic cases and tie-breaking") {
  const Codebook cb = two_codes();
  CHECK(nearest_code(Tensor::matrix(1, 2, {0.1, 0.2}), cb) ==
        std::vector<int>{0});
  CHECK(nearest_code(Tensor::matrix(1, 2, {1.0, 1.0}), cb) ==
        std::vector<int>{1});

  // z equidistant from codes 1 and 3: the lowest index wins.
  const Codebook four = Codebook::from_values(
      4, 2, {5.0, 5.0, 1.0, 0.0, 9.0, 9.0, 3.0, 0.0});
  CHECK(nearest_code(Tensor::matrix(1, 2, {2.0, 0.0}), four) ==
        std::vector<int>{1});
}

TEST_CASE("nearest_code matches an exhaustive scan on random inputs") {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t k = 2 + rng.below(31);
    const std::size_t d = 1 + rng.below(4);
    const std::size_t n = 1 + rng.below(16);
    std::vector<double> codes(k * d);
    std::vector<double> zs(n * d);
    for (double& v : codes) v = rng.uniform(-2.0, 2.0);
    for (double& v : zs) v = rng.uniform(-2.0, 2.0);
    const Codebook cb = Codebook::from_values(k, d, codes);
    const auto got = nearest_code(Tensor::from({n, d}, zs), cb);

    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        double dist = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double diff = zs[i * d + j] - codes[c * d + j];
          dist += diff * diff;
        }
        if (dist < best_dist) {
          best_dist = dist;
          best = static_cast<int>(c);
        }
      }
      CHECK(got[i] == best);
    }
  }
}

TEST_CASE("quantize_ste forward equals the selected codes exactly") {
  Tape tape;
  const Codebook cb = two_codes();
  const Tensor z = Tensor::matrix(1, 2, {0.1, 0.2}, true);
  const Quantized q = quantize_ste(tape, z, cb);
  CHECK(q.indices == std::vector<int>{0});
  CHECK(q.z_q.values() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("quantize_ste routes gradients straight through to z") {
  const Codebook cb = two_codes();
  const Tensor z = Tensor::matrix(2, 2, {0.1, 0.2, 0.9, 1.3}, true);

  Tape tape;
  const Quantized q = quantize_ste(tape, z, cb);
  tape.backward(tape.sum(q.z_q));
  CHECK(z.grad() == std::vector<double>{1.0, 1.0, 1.0, 1.0});
  CHECK(cb.codes.grad() == std::vector<double>{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("quantize_ste forward is constant in codes while assignment holds") {
  const Codebook cb = two_codes();
  const Tensor z = Tensor::matrix(1, 2, {0.1, 0.2}, true);
  // Perturb the selected code within the assignment region: the forward
  // value tracks the code exactly, i.e. the sg path carries no gradient but
  // the value is the code itself.
  Tape tape;
  const Quantized q = quantize_ste(tape, z, cb);
  CHECK(q.z_q.values() == std::vector<double>{0.0, 0.0});
  cb.codes.values()[0] = 0.05;
  Tape tape2;
  const Quantized q2 = quantize_ste(tape2, z, cb);
  CHECK(q2.indices == q.indices);
  CHECK(q2.z_q.values() == std::vector<double>{0.05, 0.0});
}

TEST_CASE("quantize_ste rejects non-finite latents") {
  Tape tape;
  const Codebook cb = two_codes();
  const Tensor bad =
      Tensor::matrix(1, 2, {std::numeric_limits<double>::infinity(), 0.0});
  CHECK_THROWS_AS(quantize_ste(tape, bad, cb), NumericError);
}

TEST_CASE("blend endpoints are exact and interior values are convex") {
  Tape tape;
  const Tensor z = Tensor::matrix(1, 2, {2.0, 0.0}, true);
  const Tensor z_q = Tensor::matrix(1, 2, {0.0, 0.0});

  CHECK(blend(tape, z, z_q, 1.0).values() == z.values());
  CHECK(blend(tape, z, z_q, 0.0).values() == z_q.values());
  CHECK(blend(tape, z, z_q, 0.25).values() == std::vector<double>{0.5, 0.0});
  CHECK_THROWS_AS(blend(tape, z, z_q, 1.5), ConfigError);
  CHECK_THROWS_AS(blend(tape, z, z_q, -0.1), ConfigError);
}

TEST_CASE("blend gradient w.r.t. z is the identity for every alpha") {
  const Codebook cb = two_codes();
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Tensor z = Tensor::matrix(1, 2, {0.1, 0.2}, true);
    Tape tape;
    const Quantized q = quantize_ste(tape, z, cb);
    const Tensor zt = blend(tape, z, q.z_q, alpha);
    tape.backward(tape.sum(zt));
    CHECK(z.grad() == std::vector<double>{1.0, 1.0});
  }
}

TEST_CASE("vq and commit losses share values but split gradients") {
  const Codebook cb = two_codes();
  const Tensor z = Tensor::matrix(1, 2, {1.0, 0.0}, true);
  const std::vector<int> idx = nearest_code(z, cb);
  REQUIRE(idx == std::vector<int>{0});

  Tape tape;
  const Tensor vq = vq_loss(tape, z, cb, idx);
  const Tensor commit = commit_loss(tape, z, cb, idx);
  CHECK(vq.item() == doctest::Approx(0.5));  // (1 + 0) / 2, element mean
  CHECK(vq.item() == commit.item());

  // vq_loss: gradient reaches the codebook only.
  z.zero_grad();
  cb.codes.zero_grad();
  Tape t1;
  t1.backward(vq_loss(t1, z, cb, idx));
  CHECK(z.grad() == std::vector<double>{0.0, 0.0});
  CHECK(cb.codes.grad()[0] == doctest::Approx(-1.0));
  CHECK(cb.codes.grad()[1] == 0.0);
  CHECK(cb.codes.grad()[2] == 0.0);
  CHECK(cb.codes.grad()[3] == 0.0);

  // commit_loss: gradient reaches z only; (1, 0) under the element mean.
  z.zero_grad();
  cb.codes.zero_grad();
  Tape t2;
  t2.backward(commit_loss(t2, z, cb, idx));
  CHECK(cb.codes.grad() == std::vector<double>{0.0, 0.0, 0.0, 0.0});
  CHECK(z.grad()[0] == doctest::Approx(1.0));
  CHECK(z.grad()[1] == 0.0);

  auto commit_forward = [&]() {
    Tape t;
    return commit_loss(t, z, cb, idx).item();
  };
  z.zero_grad();
  Tape t3;
  t3.backward(commit_loss(t3, z, cb, idx));
  CHECK(testutil::max_rel_err(z.grad(),
                              testutil::finite_diff(z, commit_forward)) <
        1e-4);

  auto vq_forward = [&]() {
    Tape t;
    return vq_loss(t, z, cb, idx).item();
  };
  cb.codes.zero_grad();
  Tape t4;
  t4.backward(vq_loss(t4, z, cb, idx));
  CHECK(testutil::max_rel_err(cb.codes.grad(),
                              testutil::finite_diff(cb.codes, vq_forward)) <
        1e-4);
}

TEST_CASE("vq_loss is zero when z sits on its codes") {
  const Codebook cb = two_codes();
  const Tensor z = Tensor::matrix(2, 2, {0.0, 0.0, 1.0, 1.0}, true);
  const auto idx = nearest_code(z, cb);
  Tape tape;
  CHECK(vq_loss(tape, z, cb, idx).item() == 0.0);
}

TEST_CASE("vq_loss rejects out-of-range indices") {
  const Codebook cb = two_codes();
  const Tensor z = Tensor::matrix(1, 2, {0.0, 0.0}, true);
  Tape tape;
  CHECK_THROWS_AS(vq_loss(tape, z, cb, {7}), Error);
}

TEST_CASE("kmeans recovers the brute-force optimal 2-partition") {
  const std::vector<double> pts{0.0, 0.0, 0.0, 1.0, 10.0, 0.0, 10.0, 1.0};
  Rng rng(11);
  const KMeansResult km = kmeans(pts, 4, 2, 2, rng);
  REQUIRE(km.converged);

  std::vector<double> expect;
  best_two_partition_sse(pts, 4, &expect);

  // Match centroids up to permutation.
  auto got = km.centroids;
  std::vector<double> a{got[0], got[1]};
  std::vector<double> b{got[2], got[3]};
  if (a[0] > b[0]) std::swap(a, b);
  CHECK(a[0] == doctest::Approx(0.0));
  CHECK(a[1] == doctest::Approx(0.5));
  CHECK(b[0] == doctest::Approx(10.0));
  CHECK(b[1] == doctest::Approx(0.5));

  double sse = km.inertia_history.back();
  CHECK(sse == doctest::Approx(best_two_partition_sse(pts, 4, nullptr)));
}

TEST_CASE("kmeans with N==K distinct points reaches zero inertia") {
  const std::vector<double> pts{0.0, 0.0, 3.0, 0.0, 0.0, 3.0};
  Rng rng(4);
  const KMeansResult km = kmeans(pts, 3, 2, 3, rng);
  CHECK(km.inertia_history.back() == 0.0);
  // Every point is its own centroid, in some permutation.
  for (std::size_t i = 0; i < 3; ++i) {
    bool found = false;
    for (std::size_t c = 0; c < 3; ++c) {
      if (pts[2 * i] == km.centroids[2 * c] &&
          pts[2 * i + 1] == km.centroids[2 * c + 1]) {
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("kmeans inertia is non-increasing per Lloyd iteration") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const std::size_t n = 20 + rng.below(40);
    const std::size_t k = 2 + rng.below(6);
    std::vector<double> pts(n * 2);
    for (double& v : pts) v = rng.uniform(-3.0, 3.0);
    const KMeansResult km = kmeans(pts, n, 2, k, rng);
    for (std::size_t i = 1; i < km.inertia_history.size(); ++i) {
      CHECK(km.inertia_history[i] <= km.inertia_history[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("kmeans_init rejects fewer points than codes") {
  Rng rng(1);
  const Tensor z = Tensor::matrix(3, 2, {0, 0, 1, 1, 2, 2});
  CHECK_THROWS_AS(kmeans_init(z, 5, rng), ConfigError);
}

TEST_CASE("perplexity matches hand values and bounds") {
  UsageHistogram uniform(4);
  for (int i = 0; i < 4; ++i) uniform.add(i);
  CHECK(perplexity(uniform) == doctest::Approx(4.0));

  UsageHistogram single(8);
  single.add(3);
  CHECK(perplexity(single) == doctest::Approx(1.0));

  UsageHistogram skewed(2);
  for (int i = 0; i < 3; ++i) skewed.add(0);
  skewed.add(1);
  CHECK(perplexity(skewed) == doctest::Approx(1.7547999).epsilon(1e-4));

  UsageHistogram empty(4);
  CHECK_THROWS_AS(perplexity(empty), ConfigError);
}

TEST_CASE("perplexity stays within [1, K] on random histograms") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng.below(32);
    UsageHistogram hist(k);
    const std::size_t draws = 1 + rng.below(200);
    for (std::size_t i = 0; i < draws; ++i) {
      hist.add(static_cast<int>(rng.below(k)));
    }
    const double p = perplexity(hist);
    CHECK(p >= 1.0 - 1e-12);
    CHECK(p <= static_cast<double>(k) + 1e-12);
    const double u = utilization(hist);
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    const double norm = p / static_cast<double>(k);
    CHECK(norm > 0.0);
    CHECK(norm <= 1.0 + 1e-12);
  }
}

TEST_CASE("utilization counts used codes") {
  UsageHistogram hist(4);
  for (int i = 0; i < 5; ++i) hist.add(0);
  hist.add(2);
  hist.add(2);
  CHECK(utilization(hist) == doctest::Approx(0.5));

  UsageHistogram one_of_64(64);
  one_of_64.add(17);
  CHECK(utilization(one_of_64) == doctest::Approx(1.0 / 64.0));
}

TEST_CASE("mean_pairwise_distance exact cases") {
  CHECK(mean_pairwise_distance(
            Codebook::from_values(2, 2, {0.0, 0.0, 3.0, 4.0})) ==
        doctest::Approx(5.0));
  CHECK(mean_pairwise_distance(
            Codebook::from_values(3, 2, {1.0, 1.0, 1.0, 1.0, 1.0, 1.0})) ==
        0.0);
  CHECK(mean_pairwise_distance(Codebook::from_values(
            3, 2, {0.0, 0.0, 1.0, 0.0, 0.0, 1.0})) ==
        doctest::Approx((2.0 + std::sqrt(2.0)) / 3.0));
}

TEST_CASE("codebook CSV round-trips") {
  testutil::TempDir tmp("provq_codebook");
  Rng rng(8);
  const Codebook cb = Codebook::gaussian(16, 2, 0.5, rng);
  const auto path = tmp.path() / "codes.csv";
  save_codebook_csv(cb, path);
  const Codebook loaded = load_codebook_csv(path);
  CHECK(loaded.codes.values() == cb.codes.values());
  CHECK(loaded.size() == 16);
  CHECK(loaded.dim() == 2);
}
