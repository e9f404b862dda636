#pragma once

#include <string>
#include <vector>

#include "provq/trainer.hpp"

namespace provq {

struct PlotBounds {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;
};

// Padded union of dataset, embedding and codebook extents over a snapshot
// series, so every frame shares one coordinate system.
PlotBounds snapshot_bounds(const std::vector<Snapshot>& snapshots);

// One scatter frame: dataset points faint, embeddings colored by mode,
// codes as diamond markers (one element with class "code" per code).
// Frames rendered with the same bounds carry an identical viewBox.
std::string render_snapshot_svg(const Snapshot& snapshot,
                                const PlotBounds& bounds);

}  // namespace provq
