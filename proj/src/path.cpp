#include "supmin/path.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "supmin/error.hpp"
#include "supmin/format.hpp"

namespace supmin {

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 3) {
    throw Error(ErrorKind::kInvalidArgument, "grid needs at least 2 elements");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!std::isfinite(nodes_[i])) {
      throw Error(ErrorKind::kNonFinite, "grid node");
    }
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "grid nodes must be strictly increasing");
    }
  }
}

Grid Grid::uniform(double a, double b, int elements) {
  if (!(a < b)) throw Error(ErrorKind::kInvalidArgument, "grid: a < b required");
  if (elements < 2) {
    throw Error(ErrorKind::kInvalidArgument, "grid needs at least 2 elements");
  }
  std::vector<double> nodes(static_cast<std::size_t>(elements) + 1);
  const double h = (b - a) / elements;
  for (int i = 0; i <= elements; ++i) nodes[static_cast<std::size_t>(i)] = a + h * i;
  nodes.back() = b;
  return Grid(std::move(nodes));
}

int Grid::locate(double x) const {
  if (!(x >= a() && x <= b())) {
    throw Error(ErrorKind::kOutOfDomain, "x outside [a, b]");
  }
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  const int i = static_cast<int>(it - nodes_.begin());
  return std::clamp(i - 1, 0, elements() - 1);
}

bool Grid::is_uniform() const {
  const double h = length() / elements();
  for (int e = 0; e < elements(); ++e) {
    if (std::abs(element_length(e) - h) > 1e-9 * h) return false;
  }
  return true;
}

Grid Grid::slice(int first, int last) const {
  return Grid(std::vector<double>(nodes_.begin() + first,
                                  nodes_.begin() + last + 1));
}

// ---------------------------------------------------------------------------
// AffineMap

AffineMap AffineMap::chord(double xa, const Vec& ua, double xb, const Vec& ub) {
  const Vec b1 = (ub - ua) / (xb - xa);
  return AffineMap{ua - b1 * xa, b1};
}

// ---------------------------------------------------------------------------
// Path

Path::Path(Grid grid, NodeMatrix values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.rows() != grid_.num_nodes() || values_.cols() < 1) {
    throw Error(ErrorKind::kInvalidArgument,
                "path values must be (M+1) x N with N >= 1");
  }
  if (!values_.allFinite()) throw Error(ErrorKind::kNonFinite, "path values");
}

Vec Path::element_slope(int e) const {
  return (values_.row(e + 1) - values_.row(e)).transpose() /
         grid_.element_length(e);
}

double Path::max_slope_norm() const {
  double best = 0.0;
  for (int e = 0; e < grid_.elements(); ++e) {
    best = std::max(best, element_slope(e).norm());
  }
  return best;
}

PointEval Path::eval_and_slope(double x) const {
  const int e = grid_.locate(x);
  const double x0 = grid_.node(e);
  const double h = grid_.element_length(e);
  const double theta = (x - x0) / h;
  PointEval out;
  out.element = e;
  const auto left = values_.row(e).transpose();
  const auto right = values_.row(e + 1).transpose();
  if (x == grid_.node(e + 1)) {
    out.value = right;
  } else {
    out.value = left + theta * (right - left);
  }
  out.slope = element_slope(e);
  return out;
}

Path Path::slice(int first, int last) const {
  if (first < 0 || last >= grid_.num_nodes() || last - first < 2) {
    throw Error(ErrorKind::kInvalidArgument, "path slice needs >= 2 elements");
  }
  return Path(grid_.slice(first, last),
              values_.middleRows(first, last - first + 1));
}

Path Path::resample(const Grid& finer) const {
  if (finer.a() != grid_.a() || finer.b() != grid_.b()) {
    throw Error(ErrorKind::kInvalidArgument,
                "resample target must cover the same interval");
  }
  NodeMatrix v(finer.num_nodes(), dim());
  for (int i = 0; i < finer.num_nodes(); ++i) {
    v.row(i) = value_at(finer.node(i)).transpose();
  }
  return Path(finer, std::move(v));
}

Path interpolate_affine(const AffineMap& b, const Grid& grid) {
  if (b.b0.size() != b.b1.size()) {
    throw Error(ErrorKind::kInvalidArgument, "affine map: b0, b1 dimensions");
  }
  NodeMatrix v(grid.num_nodes(), b.b0.size());
  for (int i = 0; i < grid.num_nodes(); ++i) {
    v.row(i) = b(grid.node(i)).transpose();
  }
  return Path(grid, std::move(v));
}

// ---------------------------------------------------------------------------
// Difference quotients

namespace {

void check_increment(const Path& path, double y, double t) {
  if (t == 0.0) throw Error(ErrorKind::kZeroStep, "difference quotient t = 0");
  const auto& g = path.grid();
  if (!(y >= g.a() && y <= g.b() && y + t >= g.a() && y + t <= g.b())) {
    throw Error(ErrorKind::kOutOfDomain, "y and y + t must lie in [a, b]");
  }
}

}  // namespace

Vec averaged_slope(const Path& path, double y, double t) {
  check_increment(path, y, t);
  const double lo = std::min(y, y + t);
  const double hi = std::max(y, y + t);
  const auto& g = path.grid();
  Vec acc = Vec::Zero(path.dim());
  const int first = g.locate(lo);
  for (int e = first; e < g.elements() && g.node(e) < hi; ++e) {
    const double len = std::min(hi, g.node(e + 1)) - std::max(lo, g.node(e));
    if (len > 0.0) acc += len * path.element_slope(e);
  }
  return acc / (hi - lo);
}

double quotient_scale(const Path& path, double y, double t) {
  const double ends =
      (path.value_at(y).norm() + path.value_at(y + t).norm()) / std::abs(t);
  return std::max(ends, path.max_slope_norm());
}

Vec difference_quotient(const Path& path, double y, double t) {
  check_increment(path, y, t);
  Vec q = (path.value_at(y + t) - path.value_at(y)) / t;
#ifndef NDEBUG
  {
    const double tol = 8.0 * std::numeric_limits<double>::epsilon() *
                       quotient_scale(path, y, t) * std::sqrt(path.dim());
    assert((q - averaged_slope(path, y, t)).norm() <= tol);
  }
#endif
  return q;
}

// ---------------------------------------------------------------------------
// CSV

void write_path_csv(std::ostream& out, const Path& path) {
  out << "x";
  for (int k = 1; k <= path.dim(); ++k) out << ",u" << k;
  out << '\n';
  const auto& g = path.grid();
  for (int i = 0; i < g.num_nodes(); ++i) {
    out << format_double(g.node(i));
    for (int k = 0; k < path.dim(); ++k) {
      out << ',' << format_double(path.values()(i, k));
    }
    out << '\n';
  }
}

void write_path_csv(const std::string& filename, const Path& path) {
  std::ofstream out(filename);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + filename);
  write_path_csv(out, path);
}

Path read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("x", 0) != 0) {
    throw Error(ErrorKind::kInvalidArgument, "path csv: missing x,u1,... header");
  }
  const auto columns = std::count(line.begin(), line.end(), ',');
  if (columns < 1) {
    throw Error(ErrorKind::kInvalidArgument, "path csv: no value columns");
  }
  std::vector<double> xs;
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kInvalidArgument,
                    "path csv line " + std::to_string(lineno) + ": bad number");
      }
    }
    if (static_cast<long>(row.size()) != columns + 1) {
      throw Error(ErrorKind::kInvalidArgument,
                  "path csv line " + std::to_string(lineno) + ": column count");
    }
    xs.push_back(row.front());
    rows.push_back(std::move(row));
  }
  NodeMatrix v(static_cast<long>(rows.size()), columns);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (long k = 0; k < columns; ++k) {
      v(static_cast<long>(i), k) = rows[i][static_cast<std::size_t>(k) + 1];
    }
  }
  return Path(Grid(std::move(xs)), std::move(v));
}

Path read_path_csv(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw Error(ErrorKind::kInvalidArgument, "cannot read " + filename);
  return read_path_csv(in);
}

}  // namespace supmin
