#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "provq/errors.hpp"
#include "provq/rng.hpp"
#include "provq/topodisc.hpp"
#include "support/testutil.hpp"

using namespace provq;

namespace {

double edge_length(Vec2 a, Vec2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

double min_edge_distance(Vec2 p, const std::array<Vec2, 3>& tri) {
  double best = 1e300;
  for (int e = 0; e < 3; ++e) {
    best = std::min(best, segment_distance(p, tri[e], tri[(e + 1) % 3]));
  }
  return best;
}

}  // namespace

TEST_CASE("gen_disk keeps every point inside the radius") {
  Rng rng(1);
  const auto pts = gen_disk(400, {0.0, 0.0}, 0.5, rng);
  REQUIRE(pts.size() == 800);
  for (std::size_t i = 0; i < 400; ++i) {
    CHECK(std::hypot(pts[2 * i], pts[2 * i + 1]) <= 0.5 + 1e-12);
  }
}

TEST_CASE("gen_disk rejects a zero radius") {
  Rng rng(1);
  CHECK_THROWS_AS(gen_disk(1, {0.0, 0.0}, 0.0, rng), ConfigError);
}

TEST_CASE("gen_disk empirical mean radius approaches 2/3") {
  Rng rng(99);
  const std::size_t n = 100000;
  const auto pts = gen_disk(n, {0.0, 0.0}, 1.0, rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += std::hypot(pts[2 * i], pts[2 * i + 1]);
  }
  // E[r] for uniform-area sampling of the unit disk is 2/3.
  CHECK(acc / static_cast<double>(n) ==
        doctest::Approx(2.0 / 3.0).epsilon(0.015));
}

TEST_CASE("gen_triangle puts every point on the perimeter") {
  Rng rng(2);
  const std::array<Vec2, 3> tri{{{-1.2, -1.0}, {1.2, -1.0}, {0.0, 1.1}}};
  const auto pts = gen_triangle(275, tri, rng);
  REQUIRE(pts.size() == 550);
  for (std::size_t i = 0; i < 275; ++i) {
    CHECK(min_edge_distance({pts[2 * i], pts[2 * i + 1]}, tri) < 1e-9);
  }
}

TEST_CASE("gen_triangle rejects collinear vertices") {
  Rng rng(3);
  const std::array<Vec2, 3> degenerate{{{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}};
  CHECK_THROWS_AS(gen_triangle(10, degenerate, rng), GeometryError);
}

TEST_CASE("gen_triangle stratification covers all three edges with n=3") {
  const std::array<Vec2, 3> tri{{{-1.2, -1.0}, {1.2, -1.0}, {0.0, 1.1}}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto pts = gen_triangle(3, tri, rng);
    // With near-equal edge lengths each 1/3 arc stratum lands near its own
    // edge, so every edge has a sample within a short arc of it.
    for (int e = 0; e < 3; ++e) {
      double best = 1e300;
      for (std::size_t i = 0; i < 3; ++i) {
        best = std::min(best,
                        segment_distance({pts[2 * i], pts[2 * i + 1]}, tri[e],
                                         tri[(e + 1) % 3]));
      }
      CHECK(best < 0.5);
    }
  }
}

TEST_CASE("gen_triangle per-edge fractions follow arc length") {
  Rng rng(12345);
  const std::array<Vec2, 3> tri{{{-1.2, -1.0}, {1.2, -1.0}, {0.0, 1.1}}};
  const std::size_t n = 100000;
  const auto pts = gen_triangle(n, tri, rng);

  double counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p{pts[2 * i], pts[2 * i + 1]};
    int best_edge = 0;
    double best = 1e300;
    for (int e = 0; e < 3; ++e) {
      const double dist = segment_distance(p, tri[e], tri[(e + 1) % 3]);
      if (dist < best) {
        best = dist;
        best_edge = e;
      }
    }
    counts[best_edge] += 1.0;
  }

  double total_len = 0.0;
  for (int e = 0; e < 3; ++e) total_len += edge_length(tri[e], tri[(e + 1) % 3]);
  for (int e = 0; e < 3; ++e) {
    const double expected = edge_length(tri[e], tri[(e + 1) % 3]) / total_len;
    CHECK(counts[e] / static_cast<double>(n) ==
          doctest::Approx(expected).epsilon(0.01));
  }
}

TEST_CASE("gen_topodisc default counts, labels and containment") {
  TopoDiscConfig cfg;
  const TopoDisc data = gen_topodisc(cfg);
  CHECK(data.size() == 675);
  CHECK(data.count(Mode::kDisk) == 400);
  CHECK(data.count(Mode::kTriangle) == 275);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vec2 p{data.points[2 * i], data.points[2 * i + 1]};
    if (data.modes[i] == Mode::kDisk) {
      CHECK(std::hypot(p.x - cfg.disk_center.x, p.y - cfg.disk_center.y) <=
            cfg.disk_radius + 1e-12);
    } else {
      CHECK(min_edge_distance(p, cfg.triangle) < 1e-9);
    }
  }
}

TEST_CASE("gen_topodisc is deterministic per seed") {
  TopoDiscConfig cfg;
  const TopoDisc a = gen_topodisc(cfg);
  const TopoDisc b = gen_topodisc(cfg);
  CHECK(a.points == b.points);

  cfg.seed += 1;
  const TopoDisc c = gen_topodisc(cfg);
  CHECK(a.points != c.points);
}

TEST_CASE("topodisc CSV round-trips bit-exactly") {
  testutil::TempDir tmp("provq_topodisc");
  TopoDiscConfig cfg;
  cfg.n_disk = 40;
  cfg.n_triangle = 27;
  const TopoDisc data = gen_topodisc(cfg);

  const auto path = tmp.path() / "topo.csv";
  save_topodisc_csv(data, path);
  const TopoDisc loaded = load_topodisc_csv(path);
  CHECK(loaded.points == data.points);
  CHECK(loaded.modes == data.modes);

  // Config can point at the CSV instead of generating.
  TopoDiscConfig from_csv;
  from_csv.csv_path = path.string();
  const TopoDisc via_config = gen_topodisc(from_csv);
  CHECK(via_config.points == data.points);
}

TEST_CASE("load_topodisc_csv rejects a missing header") {
  testutil::TempDir tmp("provq_topodisc_bad");
  const auto path = tmp.path() / "bad.csv";
  testutil::write_file(path, "a,b,c\n1,2,disk\n");
  CHECK_THROWS_WITH_AS(load_topodisc_csv(path), doctest::Contains("header"),
                       IoError);
}
