#include "provq/topodisc.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "provq/csv.hpp"
#include "provq/errors.hpp"

namespace provq {

namespace {

double triangle_area2(const std::array<Vec2, 3>& v) {
  // Twice the signed area.
  return (v[1].x - v[0].x) * (v[2].y - v[0].y) -
         (v[2].x - v[0].x) * (v[1].y - v[0].y);
}

}  // namespace

const char* to_string(Mode mode) {
  return mode == Mode::kDisk ? "disk" : "triangle";
}

Mode mode_from_string(const std::string& text) {
  if (text == "disk") return Mode::kDisk;
  if (text == "triangle") return Mode::kTriangle;
  throw IoError("topodisc: unknown mode label '" + text + "'");
}

void TopoDiscConfig::validate() const {
  if (!csv_path.empty()) return;  // geometry unused when loading from CSV
  if (n_disk < 1) throw ConfigError("topodisc: n_disk must be >= 1");
  if (n_triangle < 1) throw ConfigError("topodisc: n_triangle must be >= 1");
  if (!(disk_radius > 0.0)) {
    throw ConfigError("topodisc: disk_radius must be > 0");
  }
  if (std::abs(triangle_area2(triangle)) < 1e-12) {
    throw GeometryError("topodisc: triangle vertices are collinear");
  }
}

std::size_t TopoDisc::count(Mode mode) const {
  std::size_t n = 0;
  for (Mode m : modes) {
    if (m == mode) ++n;
  }
  return n;
}

std::vector<double> gen_disk(std::size_t n, Vec2 center, double radius,
                             Rng& rng) {
  if (n < 1) throw ConfigError("gen_disk: n must be >= 1");
  if (!(radius > 0.0)) throw ConfigError("gen_disk: radius must be > 0");

  std::vector<double> points(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    points[2 * i] = center.x + r * std::cos(theta);
    points[2 * i + 1] = center.y + r * std::sin(theta);
  }
  return points;
}

std::vector<double> gen_triangle(std::size_t n,
                                 const std::array<Vec2, 3>& vertices,
                                 Rng& rng) {
  if (n < 1) throw ConfigError("gen_triangle: n must be >= 1");
  if (std::abs(triangle_area2(vertices)) < 1e-12) {
    throw GeometryError("gen_triangle: vertices are collinear");
  }

  double edge_len[3];
  double total = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Vec2 a = vertices[e];
    const Vec2 b = vertices[(e + 1) % 3];
    edge_len[e] = std::hypot(b.x - a.x, b.y - a.y);
    total += edge_len[e];
  }

  std::vector<double> points(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    // One jittered sample per 1/n arc of the perimeter.
    const double s =
        (static_cast<double>(i) + rng.uniform()) / static_cast<double>(n) *
        total;
    double remain = s;
    int e = 0;
    while (e < 2 && remain > edge_len[e]) {
      remain -= edge_len[e];
      ++e;
    }
    const Vec2 a = vertices[e];
    const Vec2 b = vertices[(e + 1) % 3];
    const double t = remain / edge_len[e];
    points[2 * i] = a.x + t * (b.x - a.x);
    points[2 * i + 1] = a.y + t * (b.y - a.y);
  }
  return points;
}

TopoDisc gen_topodisc(const TopoDiscConfig& config) {
  config.validate();
  if (!config.csv_path.empty()) return load_topodisc_csv(config.csv_path);

  Rng rng(config.seed);
  TopoDisc data;
  data.points = gen_disk(config.n_disk, config.disk_center, config.disk_radius,
                         rng);
  std::vector<double> tri = gen_triangle(config.n_triangle, config.triangle,
                                         rng);
  data.points.insert(data.points.end(), tri.begin(), tri.end());
  data.modes.assign(config.n_disk, Mode::kDisk);
  data.modes.insert(data.modes.end(), config.n_triangle, Mode::kTriangle);
  return data;
}

void save_topodisc_csv(const TopoDisc& data,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("topodisc: cannot write '" + path.string() + "'");
  out << "x,y,mode\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << format_double(data.points[2 * i]) << ','
        << format_double(data.points[2 * i + 1]) << ','
        << to_string(data.modes[i]) << '\n';
  }
  if (!out) throw IoError("topodisc: write failed for '" + path.string() + "'");
}

TopoDisc load_topodisc_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("topodisc: cannot read '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line) || line != "x,y,mode") {
    throw IoError("topodisc: '" + path.string() +
                  "' missing required header 'x,y,mode'");
  }

  TopoDisc data;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string xs, ys, ms;
    if (!std::getline(row, xs, ',') || !std::getline(row, ys, ',') ||
        !std::getline(row, ms)) {
      throw IoError("topodisc: '" + path.string() + "' line " +
                    std::to_string(lineno) + " is malformed");
    }
    data.points.push_back(parse_double(xs, path.string(), lineno));
    data.points.push_back(parse_double(ys, path.string(), lineno));
    data.modes.push_back(mode_from_string(ms));
  }
  if (data.modes.empty()) {
    throw IoError("topodisc: '" + path.string() + "' contains no points");
  }
  return data;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace provq
