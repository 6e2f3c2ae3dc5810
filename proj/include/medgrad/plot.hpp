#pragma once

#include <string>
#include <vector>

#include "medgrad/field.hpp"

namespace medgrad {

/// Marching-squares contours at the given levels over the domain outline.
std::string contour_svg(const GridField& field, const std::vector<double>& levels,
                        int pixels = 600);

/// `count` evenly spaced interior levels of the field's range.
std::vector<double> even_levels(const GridField& field, int count);

/// Binary PGM (P5) heatmap, one pixel per node, row 0 at the top (ymax).
/// Unmasked nodes are black; the range maps to 16..255.
std::string heatmap_pgm(const GridField& field);

}  // namespace medgrad
