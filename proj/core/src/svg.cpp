#include "provq/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "provq/csv.hpp"
#include "provq/errors.hpp"

namespace provq {

namespace {

void grow(PlotBounds& b, double x, double y) {
  b.xmin = std::min(b.xmin, x);
  b.xmax = std::max(b.xmax, x);
  b.ymin = std::min(b.ymin, y);
  b.ymax = std::max(b.ymax, y);
}

void require_2d(const Snapshot& s) {
  if (s.d_lat != 2) {
    throw ConfigError("plot: snapshot at step " + std::to_string(s.step) +
                      " has d_lat=" + std::to_string(s.d_lat) +
                      "; only 2-D latents can be rendered");
  }
}

std::string num(double v) { return format_double(v); }

}  // namespace

PlotBounds snapshot_bounds(const std::vector<Snapshot>& snapshots) {
  if (snapshots.empty()) throw ConfigError("plot: no snapshots given");
  PlotBounds b{1e300, -1e300, 1e300, -1e300};
  for (const Snapshot& s : snapshots) {
    require_2d(s);
    for (std::size_t i = 0; i + 1 < s.dataset_points.size(); i += 2) {
      grow(b, s.dataset_points[i], s.dataset_points[i + 1]);
    }
    for (std::size_t i = 0; i + 1 < s.embeddings.size(); i += 2) {
      grow(b, s.embeddings[i], s.embeddings[i + 1]);
    }
    for (std::size_t i = 0; i + 1 < s.codebook.size(); i += 2) {
      grow(b, s.codebook[i], s.codebook[i + 1]);
    }
  }
  const double pad = 0.06 * std::max(b.xmax - b.xmin, b.ymax - b.ymin) + 1e-9;
  b.xmin -= pad;
  b.xmax += pad;
  b.ymin -= pad;
  b.ymax += pad;
  return b;
}

std::string render_snapshot_svg(const Snapshot& snapshot,
                                const PlotBounds& bounds) {
  require_2d(snapshot);
  const double w = bounds.xmax - bounds.xmin;
  const double h = bounds.ymax - bounds.ymin;
  const double extent = std::max(w, h);
  const double r_data = 0.004 * extent;
  const double r_emb = 0.006 * extent;
  const double r_code = 0.013 * extent;

  // SVG y points down, so every y coordinate is negated and the viewBox
  // starts at -ymax.
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" "
         "height=\"720\" viewBox=\""
      << num(bounds.xmin) << ' ' << num(-bounds.ymax) << ' ' << num(w) << ' '
      << num(h) << "\">\n";
  out << "<rect x=\"" << num(bounds.xmin) << "\" y=\"" << num(-bounds.ymax)
      << "\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" fill=\"#ffffff\" stroke=\"#444444\" stroke-width=\""
      << num(0.002 * extent) << "\"/>\n";

  out << "<g class=\"dataset\">\n";
  for (std::size_t i = 0; i + 1 < snapshot.dataset_points.size(); i += 2) {
    out << "<circle class=\"data\" cx=\"" << num(snapshot.dataset_points[i])
        << "\" cy=\"" << num(-snapshot.dataset_points[i + 1]) << "\" r=\""
        << num(r_data) << "\" fill=\"#c9c9c9\"/>\n";
  }
  out << "</g>\n";

  out << "<g class=\"embeddings\">\n";
  for (std::size_t i = 0; i < snapshot.dataset_modes.size(); ++i) {
    const bool disk = snapshot.dataset_modes[i] == Mode::kDisk;
    out << "<circle class=\"" << (disk ? "emb-disk" : "emb-tri")
        << "\" cx=\"" << num(snapshot.embeddings[2 * i]) << "\" cy=\""
        << num(-snapshot.embeddings[2 * i + 1]) << "\" r=\"" << num(r_emb)
        << "\" fill=\"" << (disk ? "#1f77b4" : "#ff7f0e")
        << "\" fill-opacity=\"0.75\"/>\n";
  }
  out << "</g>\n";

  out << "<g class=\"codes\">\n";
  for (std::size_t i = 0; i + 1 < snapshot.codebook.size(); i += 2) {
    const double cx = snapshot.codebook[i];
    const double cy = -snapshot.codebook[i + 1];
    out << "<polygon class=\"code\" points=\"" << num(cx) << ','
        << num(cy - r_code) << ' ' << num(cx + r_code) << ',' << num(cy) << ' '
        << num(cx) << ',' << num(cy + r_code) << ' ' << num(cx - r_code) << ','
        << num(cy)
        << "\" fill=\"#d62728\" stroke=\"#7a1214\" stroke-width=\""
        << num(0.0015 * extent) << "\"/>\n";
  }
  out << "</g>\n";

  out << "<text x=\"" << num(bounds.xmin + 0.02 * w) << "\" y=\""
      << num(-bounds.ymax + 0.05 * h) << "\" font-family=\"sans-serif\" "
      << "font-size=\"" << num(0.035 * extent) << "\" fill=\"#333333\">step "
      << snapshot.step << " | " << to_string(snapshot.stage) << " | alpha="
      << num(snapshot.alpha) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace provq
