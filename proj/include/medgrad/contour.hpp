#pragma once

#include <vector>

#include "medgrad/field.hpp"

namespace medgrad {

struct Polyline {
  std::vector<Point2> points;
  bool closed = false;
};

/// Marching-squares level curves of the field at `level`, linked into
/// polylines. Cells with an unmasked corner are skipped. Saddle cells are
/// resolved by the cell-centre average.
std::vector<Polyline> extract_contours(const GridField& field, double level);

/// Total length of the marching-squares level curves at `level`.
double contour_length(const GridField& field, double level);

}  // namespace medgrad
