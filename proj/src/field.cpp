#include "medgrad/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "medgrad/error.hpp"
#include "medgrad/format.hpp"

namespace medgrad {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

GridField::GridField(Domain domain, int nx, int ny, BBox bbox)
    : domain_(std::move(domain)), nx_(nx), ny_(ny), bbox_(bbox) {
  if (nx < 2 || ny < 2) throw ValidationError("grid needs at least 2 nodes per axis");
  if (!(bbox.xmin < bbox.xmax) || !(bbox.ymin < bbox.ymax)) {
    throw ValidationError("grid bounding box is empty");
  }
  h_ = (bbox.xmax - bbox.xmin) / (nx - 1);
  const double hy = (bbox.ymax - bbox.ymin) / (ny - 1);
  if (std::abs(hy - h_) > 1e-12 * h_) throw ValidationError("grid cells must be square");
  const auto n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  values_.assign(n, kNaN);
  mask_.assign(n, 0);
  pinned_.assign(n, 0);
}

void GridField::set_masked(std::size_t k, bool m) {
  mask_[k] = m ? 1 : 0;
  if (!m) {
    values_[k] = kNaN;
    pinned_[k] = 0;
  }
}

double GridField::try_eval(Point2 p) const {
  const double fx = (p.x - bbox_.xmin) / h_;
  const double fy = (p.y - bbox_.ymin) / h_;
  if (!(fx >= 0.0) || !(fy >= 0.0) || fx > nx_ - 1 || fy > ny_ - 1) return kNaN;
  const int i = std::min(static_cast<int>(fx), nx_ - 2);
  const int j = std::min(static_cast<int>(fy), ny_ - 2);
  const double a = fx - i;
  const double b = fy - j;
  const std::size_t k = index(i, j);
  // Unmasked nodes hold NaN, which propagates regardless of weight.
  const double v00 = values_[k];
  const double v10 = values_[k + 1];
  const double v01 = values_[k + nx_];
  const double v11 = values_[k + nx_ + 1];
  return (1.0 - b) * ((1.0 - a) * v00 + a * v10) + b * ((1.0 - a) * v01 + a * v11);
}

std::pair<double, double> GridField::range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!mask_[k]) continue;
    lo = std::min(lo, values_[k]);
    hi = std::max(hi, values_[k]);
  }
  return {lo, hi};
}

double eval(const GridField& field, Point2 p) {
  const double v = field.try_eval(p);
  if (std::isnan(v)) throw OutsideDomainError();
  return v;
}

GridField from_function(const Domain& domain, int nx, int ny,
                        const std::function<double(Point2)>& f) {
  GridField field(domain, nx, ny, domain.bbox());
  for (std::size_t k = 0; k < field.size(); ++k) {
    const Point2 p = field.node(k);
    if (domain.signed_distance(p) >= 0.0) {
      const double v = f(p);
      if (!std::isfinite(v)) throw ValidationError("field function returned a non-finite value");
      field.set_masked(k, true);
      field.value(k) = v;
    }
  }
  return field;
}

GridField from_function(const Domain& domain, int n, const std::function<double(Point2)>& f) {
  if (n < 2) throw ValidationError("grid needs at least 2 nodes per axis");
  BBox b = domain.bbox();
  const double wx = b.xmax - b.xmin;
  const double wy = b.ymax - b.ymin;
  int nx = n;
  int ny = n;
  if (wx >= wy) {
    const double h = wx / (n - 1);
    ny = static_cast<int>(std::ceil(wy / h - 1e-9)) + 1;
    const double pad = 0.5 * ((ny - 1) * h - wy);
    b.ymin -= pad;
    b.ymax = b.ymin + (ny - 1) * h;
  } else {
    const double h = wy / (n - 1);
    nx = static_cast<int>(std::ceil(wx / h - 1e-9)) + 1;
    const double pad = 0.5 * ((nx - 1) * h - wx);
    b.xmin -= pad;
    b.xmax = b.xmin + (nx - 1) * h;
  }
  GridField field(domain, nx, ny, b);
  for (std::size_t k = 0; k < field.size(); ++k) {
    const Point2 p = field.node(k);
    if (domain.signed_distance(p) >= 0.0) {
      const double v = f(p);
      if (!std::isfinite(v)) throw ValidationError("field function returned a non-finite value");
      field.set_masked(k, true);
      field.value(k) = v;
    }
  }
  return field;
}

GridField apply_dirichlet(GridField field, const BoundaryData& g, double band) {
  const double limit = band * field.h();
  const Domain& domain = field.domain();
  for (std::size_t k = 0; k < field.size(); ++k) {
    if (!field.masked(k)) continue;
    const Point2 p = field.node(k);
    if (domain.signed_distance(p) < limit) {
      field.value(k) = g(domain.nearest_parameter(p));
      field.set_pinned(k, true);
    }
  }
  return field;
}

void write_sfld(std::ostream& out, const GridField& field) {
  const BBox& b = field.bbox();
  out << "sfld 1\n";
  out << "domain: " << field.domain().serialize() << "\n";
  out << "grid: " << field.nx() << " " << field.ny() << " " << format_double(b.xmin) << " "
      << format_double(b.xmax) << " " << format_double(b.ymin) << " " << format_double(b.ymax)
      << "\n";
  out << "data:\n";
  for (int j = 0; j < field.ny(); ++j) {
    for (int i = 0; i < field.nx(); ++i) {
      const std::size_t k = field.index(i, j);
      if (i > 0) out << ' ';
      out << (field.masked(k) ? format_double(field.value(k)) : "nan");
    }
    out << '\n';
  }
}

std::string to_sfld(const GridField& field) {
  std::ostringstream out;
  write_sfld(out, field);
  return out.str();
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  std::string s = hash == std::string::npos ? line : line.substr(0, hash);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

std::string expect_header(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("truncated sfld file: missing " + key);
  line = strip_comment(line);
  const std::string prefix = key + ":";
  if (!line.starts_with(prefix)) throw ValidationError("sfld: expected '" + prefix + "'");
  return line.substr(prefix.size());
}

}  // namespace

GridField read_sfld(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty sfld file");
  {
    std::istringstream head(strip_comment(line));
    std::string magic, version;
    head >> magic >> version;
    if (magic != "sfld") throw ValidationError("not an sfld file");
    if (version != "1") throw ValidationError("unsupported sfld version " + version);
  }
  const Domain domain = Domain::parse(expect_header(in, "domain"));
  std::istringstream grid(expect_header(in, "grid"));
  int nx = 0, ny = 0;
  std::string bx0, bx1, by0, by1;
  if (!(grid >> nx >> ny >> bx0 >> bx1 >> by0 >> by1)) throw ValidationError("sfld: bad grid line");
  const BBox b{parse_double(bx0), parse_double(bx1), parse_double(by0), parse_double(by1)};
  const std::string rest = expect_header(in, "data");
  if (!rest.empty() && rest.find_first_not_of(" \t") != std::string::npos) {
    throw ValidationError("sfld: unexpected text after 'data:'");
  }
  GridField field(domain, nx, ny, b);
  for (int j = 0; j < ny; ++j) {
    if (!std::getline(in, line)) throw ValidationError("sfld: missing data rows");
    std::istringstream row(line);
    std::string tok;
    for (int i = 0; i < nx; ++i) {
      if (!(row >> tok)) throw ValidationError("sfld: short data row");
      const double v = parse_double(tok);
      const std::size_t k = field.index(i, j);
      if (std::isnan(v)) continue;
      if (!std::isfinite(v)) throw ValidationError("sfld: non-finite value");
      field.set_masked(k, true);
      field.value(k) = v;
    }
    if (row >> tok) throw ValidationError("sfld: long data row");
  }
  return field;
}

void save_sfld(const std::string& path, const GridField& field) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  write_sfld(out, field);
}

GridField load_sfld(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return read_sfld(in);
}

}  // namespace medgrad
