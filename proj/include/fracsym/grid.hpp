#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

namespace fracsym {

using Array = Eigen::ArrayXd;

/// Uniform cell-centered grid on (-half_width, half_width).
/// Cell i has center x_i = -half_width + (i + 1/2) * spacing.
class Grid1D {
public:
  Grid1D(double half_width, int n_cells);

  double half_width() const { return half_width_; }
  int n_cells() const { return n_cells_; }
  double spacing() const { return spacing_; }
  double node(int i) const { return -half_width_ + (i + 0.5) * spacing_; }
  Array nodes() const;

  friend bool operator==(const Grid1D& a, const Grid1D& b) {
    return a.half_width_ == b.half_width_ && a.n_cells_ == b.n_cells_;
  }

private:
  double half_width_;
  int n_cells_;
  double spacing_;
};

Grid1D make_grid(double half_width, int n_cells);

/// Sampled real function on a Grid1D; one value per cell.
class GridFunction {
public:
  GridFunction(Grid1D grid, Array values, bool require_nonnegative = false);
  GridFunction(Grid1D grid, const std::function<double(double)>& f,
               bool require_nonnegative = false);

  const Grid1D& grid() const { return grid_; }
  const Array& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  double spacing() const { return grid_.spacing(); }

private:
  Grid1D grid_;
  Array values_;
};

/// Midpoint-rule integral; terms summed in ascending-magnitude order.
double integrate(const GridFunction& f);

/// (sum |v_i|^p dx)^(1/p); max |v_i| for p = infinity. Requires p >= 1.
double lp_norm(const GridFunction& f, double p);

/// Signed sum of arbitrary terms in ascending-magnitude order.
double stable_sum(const Array& terms);

void require_same_grid(const GridFunction& a, const GridFunction& b,
                       const char* where);

}  // namespace fracsym
