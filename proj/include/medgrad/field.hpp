#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "medgrad/boundary.hpp"
#include "medgrad/geometry.hpp"

namespace medgrad {

/// Scalar field on a square-celled lattice with a validity mask.
///
/// Values are stored row-major with rows along y: index = j·nx + i for the
/// node (xmin + i·h, ymin + j·h). Unmasked values are NaN and ignored by
/// every consumer. Nodes flagged `pinned` carry Dirichlet data and are never
/// updated by the solvers.
class GridField {
 public:
  GridField(Domain domain, int nx, int ny, BBox bbox);

  const Domain& domain() const { return domain_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const BBox& bbox() const { return bbox_; }
  double h() const { return h_; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
  Point2 node(int i, int j) const { return {bbox_.xmin + i * h_, bbox_.ymin + j * h_}; }
  Point2 node(std::size_t k) const {
    return node(static_cast<int>(k % nx_), static_cast<int>(k / nx_));
  }

  double value(std::size_t k) const { return values_[k]; }
  double& value(std::size_t k) { return values_[k]; }
  const double* data() const { return values_.data(); }
  bool masked(std::size_t k) const { return mask_[k] != 0; }
  bool pinned(std::size_t k) const { return pinned_[k] != 0; }
  bool masked(int i, int j) const {
    return i >= 0 && j >= 0 && i < nx_ && j < ny_ && mask_[index(i, j)] != 0;
  }

  void set_masked(std::size_t k, bool m);
  void set_pinned(std::size_t k, bool p) { pinned_[k] = p ? 1 : 0; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  /// Bilinear interpolation; NaN when an enclosing node is unmasked or p lies
  /// outside the lattice.
  double try_eval(Point2 p) const;

  /// Min and max over masked nodes.
  std::pair<double, double> range() const;

 private:
  Domain domain_;
  int nx_;
  int ny_;
  BBox bbox_;
  double h_;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint8_t> pinned_;
};

/// Bilinear interpolation; throws OutsideDomainError ("sample outside domain")
/// when an enclosing node is unmasked.
double eval(const GridField& field, Point2 p);

/// Lattice over the domain's bounding box, masked where distance_to_boundary
/// is non-negative, with values f at masked nodes. The box must give square
/// cells.
GridField from_function(const Domain& domain, int nx, int ny,
                        const std::function<double(Point2)>& f);

/// Convenience: n nodes along the longer side, the box padded symmetrically
/// along the shorter side so that cells are square.
GridField from_function(const Domain& domain, int n, const std::function<double(Point2)>& f);

inline constexpr double kDefaultBoundaryBand = 1.5;

/// Pins every masked node closer than band·h to ∂Ω to g at the nearest
/// boundary parameter.
GridField apply_dirichlet(GridField field, const BoundaryData& g,
                          double band = kDefaultBoundaryBand);

/// SFLD1 text format. Writers emit shortest round-trip decimals.
void write_sfld(std::ostream& out, const GridField& field);
std::string to_sfld(const GridField& field);
GridField read_sfld(std::istream& in);
void save_sfld(const std::string& path, const GridField& field);
GridField load_sfld(const std::string& path);

}  // namespace medgrad
