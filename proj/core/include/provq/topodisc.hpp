#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "provq/rng.hpp"

namespace provq {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class Mode { kDisk, kTriangle };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& text);

struct TopoDiscConfig {
  std::size_t n_disk = 400;
  std::size_t n_triangle = 275;
  Vec2 disk_center{0.0, 0.0};
  double disk_radius = 0.5;
  // Disk sits inside the triangle so edge warping stays visible.
  std::array<Vec2, 3> triangle{{{-1.2, -1.0}, {1.2, -1.0}, {0.0, 1.1}}};
  std::uint64_t seed = 20240;
  // When set, the dataset is loaded from this CSV instead of generated.
  std::string csv_path;

  void validate() const;
};

// Labeled 2D point cloud: a dense disk plus a triangle boundary.
struct TopoDisc {
  std::vector<double> points;  // N x 2, row-major
  std::vector<Mode> modes;     // length N

  std::size_t size() const { return modes.size(); }
  std::size_t count(Mode mode) const;
};

// n points uniform over the disk area (radius via sqrt(u), angle uniform).
std::vector<double> gen_disk(std::size_t n, Vec2 center, double radius,
                             Rng& rng);

// n points uniform by arc length along the triangle perimeter, stratified
// into n equal arcs with one jittered sample each.
std::vector<double> gen_triangle(std::size_t n,
                                 const std::array<Vec2, 3>& vertices,
                                 Rng& rng);

// Disk points first, then triangle points; deterministic for a fixed seed.
TopoDisc gen_topodisc(const TopoDiscConfig& config);

// CSV with header "x,y,mode"; doubles round-trip exactly.
void save_topodisc_csv(const TopoDisc& data, const std::filesystem::path& path);
TopoDisc load_topodisc_csv(const std::filesystem::path& path);

// Distance from p to the segment [a, b].
double segment_distance(Vec2 p, Vec2 a, Vec2 b);

}  // namespace provq
