#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "supmin/types.hpp"

namespace supmin {

/// Strictly increasing nodes a = x_0 < ... < x_M = b with M >= 2.
class Grid {
 public:
  explicit Grid(std::vector<double> nodes);
  static Grid uniform(double a, double b, int elements);

  [[nodiscard]] double a() const { return nodes_.front(); }
  [[nodiscard]] double b() const { return nodes_.back(); }
  [[nodiscard]] double length() const { return b() - a(); }
  [[nodiscard]] int elements() const { return static_cast<int>(nodes_.size()) - 1; }
  [[nodiscard]] int num_nodes() const { return static_cast<int>(nodes_.size()); }
  [[nodiscard]] double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] double element_length(int e) const { return node(e + 1) - node(e); }
  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }

  /// Element containing x; interior nodes belong to the element on their left.
  [[nodiscard]] int locate(double x) const;
  /// True when all element lengths agree to a relative 1e-9.
  [[nodiscard]] bool is_uniform() const;
  /// Sub-grid made of nodes first..last inclusive.
  [[nodiscard]] Grid slice(int first, int last) const;

 private:
  std::vector<double> nodes_;
};

/// u(x) = b0 + b1 x
struct AffineMap {
  Vec b0;
  Vec b1;

  [[nodiscard]] Vec operator()(double x) const { return b0 + b1 * x; }
  /// The affine map through (xa, ua) and (xb, ub).
  static AffineMap chord(double xa, const Vec& ua, double xb, const Vec& ub);
};

struct PointEval {
  Vec value;
  Vec slope;
  int element = 0;
};

/// Continuous piecewise-linear map on a grid; row i holds u(x_i).
class Path {
 public:
  Path(Grid grid, NodeMatrix values);

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const NodeMatrix& values() const { return values_; }
  NodeMatrix& mutable_values() { return values_; }
  [[nodiscard]] int dim() const { return static_cast<int>(values_.cols()); }

  [[nodiscard]] Vec node_value(int i) const { return values_.row(i).transpose(); }
  [[nodiscard]] Vec element_slope(int e) const;
  /// Largest element slope norm.
  [[nodiscard]] double max_slope_norm() const;

  [[nodiscard]] PointEval eval_and_slope(double x) const;
  [[nodiscard]] Vec value_at(double x) const { return eval_and_slope(x).value; }

  /// Restriction to nodes first..last.
  [[nodiscard]] Path slice(int first, int last) const;
  /// Sample onto another grid covering the same interval.
  [[nodiscard]] Path resample(const Grid& finer) const;

 private:
  Grid grid_;
  NodeMatrix values_;
};

Path interpolate_affine(const AffineMap& b, const Grid& grid);

/// (u(y + t) - u(y)) / t
Vec difference_quotient(const Path& path, double y, double t);

/// Element-length-weighted average of element slopes over [y, y + t].
/// Equal to the difference quotient for piecewise-linear paths.
Vec averaged_slope(const Path& path, double y, double t);

/// Scale used for the quotient/average agreement tolerance.
double quotient_scale(const Path& path, double y, double t);

/// CSV with header x,u1,...,uN and 17 significant digits.
void write_path_csv(std::ostream& out, const Path& path);
void write_path_csv(const std::string& filename, const Path& path);
Path read_path_csv(std::istream& in);
Path read_path_csv(const std::string& filename);

}  // namespace supmin
