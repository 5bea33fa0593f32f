#include "fracsym/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace fracsym {

Grid1D::Grid1D(double half_width, int n_cells)
    : half_width_(half_width), n_cells_(n_cells) {
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("Grid1D: half_width must be positive");
  if (n_cells < 2) throw std::invalid_argument("Grid1D: n_cells must be >= 2");
  spacing_ = 2.0 * half_width / n_cells;
}

Array Grid1D::nodes() const {
  Array x(n_cells_);
  for (int i = 0; i < n_cells_; ++i) x[i] = node(i);
  return x;
}

Grid1D make_grid(double half_width, int n_cells) {
  return Grid1D(half_width, n_cells);
}

GridFunction::GridFunction(Grid1D grid, Array values, bool require_nonnegative)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.n_cells())
    throw std::invalid_argument("GridFunction: value count != n_cells");
  if (!values_.isFinite().all())
    throw std::invalid_argument("GridFunction: values must be finite");
  if (require_nonnegative && (values_ < 0.0).any())
    throw std::invalid_argument("GridFunction: negative value in nonnegative data");
}

GridFunction::GridFunction(Grid1D grid, const std::function<double(double)>& f,
                           bool require_nonnegative)
    : grid_(grid), values_(grid.n_cells()) {
  for (int i = 0; i < grid_.n_cells(); ++i) values_[i] = f(grid_.node(i));
  if (!values_.isFinite().all())
    throw std::invalid_argument("GridFunction: sampled values must be finite");
  if (require_nonnegative && (values_ < 0.0).any())
    throw std::invalid_argument("GridFunction: negative value in nonnegative data");
}

double stable_sum(const Array& terms) {
  std::vector<double> t(terms.data(), terms.data() + terms.size());
  std::sort(t.begin(), t.end(), [](double a, double b) {
    double ma = std::abs(a), mb = std::abs(b);
    return ma != mb ? ma < mb : a < b;
  });
  long double acc = 0.0L;
  for (double v : t) acc += v;
  return static_cast<double>(acc);
}

double integrate(const GridFunction& f) {
  return stable_sum(f.values()) * f.spacing();
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) return f.values().abs().maxCoeff();
  if (p == 1.0) return stable_sum(f.values().abs()) * f.spacing();
  if (p == 2.0)
    return std::sqrt(stable_sum(f.values().square()) * f.spacing());
  Array terms = f.values().abs().pow(p);
  return std::pow(stable_sum(terms) * f.spacing(), 1.0 / p);
}

void require_same_grid(const GridFunction& a, const GridFunction& b,
                       const char* where) {
  if (!(a.grid() == b.grid()))
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

}  // namespace fracsym
