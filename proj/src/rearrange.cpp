#include "fracsym/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fracsym {

const char* to_string(Relation r) {
  switch (r) {
    case Relation::Equal: return "Equal";
    case Relation::FirstLess: return "FirstLess";
    case Relation::FirstGreater: return "FirstGreater";
    default: return "Incomparable";
  }
}

double distribution_function(const GridFunction& f, double k) {
  if (!(k >= 0.0))
    throw std::invalid_argument("distribution_function: level k must be >= 0");
  int count = 0;
  for (int i = 0; i < f.size(); ++i)
    if (std::abs(f.values()[i]) > k) ++count;
  return f.spacing() * count;
}

StepRearrangement decreasing_rearrangement(const GridFunction& f) {
  const int n = f.size();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const Array& v = f.values();
  std::stable_sort(idx.begin(), idx.end(), [&v](int a, int b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });
  StepRearrangement r;
  r.cell_measure = f.spacing();
  r.values.resize(n);
  r.measures = Array::Constant(n, f.spacing());
  for (int k = 0; k < n; ++k) r.values[k] = std::abs(v[idx[k]]);
  return r;
}

StepRearrangement weighted_decreasing_rearrangement(const Array& values,
                                                    const Array& measures) {
  if (values.size() != measures.size())
    throw std::invalid_argument(
        "weighted_decreasing_rearrangement: size mismatch");
  if ((measures <= 0.0).any())
    throw std::invalid_argument(
        "weighted_decreasing_rearrangement: measures must be positive");
  const int n = static_cast<int>(values.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&values](int a, int b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  StepRearrangement r;
  r.values.resize(n);
  r.measures.resize(n);
  for (int k = 0; k < n; ++k) {
    r.values[k] = std::abs(values[idx[k]]);
    r.measures[k] = measures[idx[k]];
  }
  r.cell_measure = 0.0;
  if (n > 0 && (measures == measures[0]).all()) r.cell_measure = measures[0];
  return r;
}

double evaluate(const StepRearrangement& r, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("evaluate: s must be >= 0");
  double acc = 0.0;
  for (int i = 0; i < r.values.size(); ++i) {
    acc += r.measures[i];
    if (s < acc) return r.values[i];
  }
  return 0.0;  // f* vanishes past the total measure
}

double cumulative_concentration(const StepRearrangement& r, double s) {
  if (!(s >= 0.0))
    throw std::invalid_argument("cumulative_concentration: s must be >= 0");
  long double acc = 0.0L;
  double left = 0.0;
  for (int i = 0; i < r.values.size(); ++i) {
    const double right = left + r.measures[i];
    if (s <= right) {
      acc += static_cast<long double>(r.values[i]) * (s - left);
      return static_cast<double>(acc);
    }
    acc += static_cast<long double>(r.values[i]) * r.measures[i];
    left = right;
  }
  return static_cast<double>(acc);
}

namespace {

// Placement order for the N = 1 spherical rearrangement: cells sorted by
// radius; within a radius level the left cell comes first. Ranks of equal
// value may land in either order without changing the result.
std::vector<int> center_out_order(int n) {
  std::vector<int> order;
  order.reserve(n);
  if (n % 2 == 1) {
    const int c = (n - 1) / 2;
    order.push_back(c);
    for (int r = 1; c - r >= 0; ++r) {
      order.push_back(c - r);
      if (c + r < n) order.push_back(c + r);
    }
  } else {
    const int cl = n / 2 - 1, cr = n / 2;
    for (int r = 0; cl - r >= 0; ++r) {
      order.push_back(cl - r);
      order.push_back(cr + r);
    }
  }
  return order;
}

}  // namespace

double unit_ball_measure(int N) {
  if (N < 1) throw std::invalid_argument("unit_ball_measure: N must be >= 1");
  return std::pow(M_PI, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
}

GridFunction spherical_rearrangement(const GridFunction& f, int N) {
  if (N < 1)
    throw std::invalid_argument("spherical_rearrangement: N must be >= 1");
  const int n = f.size();
  if (N == 1) {
    StepRearrangement r = decreasing_rearrangement(f);
    Array out(n);
    const std::vector<int> order = center_out_order(n);
    for (int k = 0; k < n; ++k) out[order[k]] = r.values[k];
    return GridFunction(f.grid(), std::move(out));
  }
  // N >= 2: read |x_i| as shell radii; shell measure omega_N (b^N - a^N)
  // split evenly over the one or two cells at that radius.
  const double wN = unit_ball_measure(N);
  const double dx = f.spacing();
  Array measures(n);
  for (int i = 0; i < n; ++i) {
    const double r = std::abs(f.grid().node(i));
    const double a = std::max(0.0, r - 0.5 * dx);
    const double b = r + 0.5 * dx;
    double shell = wN * (std::pow(b, N) - std::pow(a, N));
    if (a > 0.0) shell *= 0.5;  // radius shared by a mirror cell
    measures[i] = shell;
  }
  StepRearrangement rs =
      weighted_decreasing_rearrangement(f.values(), measures);
  Array out(n);
  for (int i = 0; i < n; ++i) {
    const double s = wN * std::pow(std::abs(f.grid().node(i)), N);
    out[i] = evaluate(rs, s);
  }
  return GridFunction(f.grid(), std::move(out));
}

bool is_rearranged(const GridFunction& f, int N) {
  GridFunction s = spherical_rearrangement(f, N);
  return (s.values() == f.values()).all();
}

ConcentrationReport compare_concentration(const GridFunction& f,
                                          const GridFunction& g, double tol) {
  require_same_grid(f, g, "compare_concentration");
  StepRearrangement rf = decreasing_rearrangement(f);
  StepRearrangement rg = decreasing_rearrangement(g);
  const int n = f.size();
  const double dx = f.spacing();
  if (tol < 0.0) {
    const double l1 = std::max(rf.values.sum(), rg.values.sum()) * dx;
    tol = 1e-9 * l1;
  }

  ConcentrationReport rep;
  rep.tolerance = tol;
  long double acc = 0.0L;
  double max_gap = 0.0, min_gap = 0.0;
  int sign_state = 0;  // -1, 0, +1 relative to the tolerance band
  for (int k = 0; k < n; ++k) {
    acc += static_cast<long double>(rg.values[k] - rf.values[k]) * dx;
    const double D = static_cast<double>(acc);
    max_gap = std::max(max_gap, D);
    min_gap = std::min(min_gap, D);
    const int s = D > tol ? 1 : (D < -tol ? -1 : 0);
    if (s != 0) {
      if (sign_state != 0 && s != sign_state)
        rep.crossing_points.push_back((k + 1) * dx);
      sign_state = s;
    }
  }
  rep.max_gap = max_gap;
  rep.min_gap = min_gap;
  if (max_gap <= tol && min_gap >= -tol)
    rep.relation = Relation::Equal;
  else if (min_gap >= -tol)
    rep.relation = Relation::FirstLess;
  else if (max_gap <= tol)
    rep.relation = Relation::FirstGreater;
  else
    rep.relation = Relation::Incomparable;
  return rep;
}

HardyLittlewoodResult hardy_littlewood_check(const GridFunction& f,
                                             const GridFunction& g) {
  require_same_grid(f, g, "hardy_littlewood_check");
  HardyLittlewoodResult res;
  res.lhs = stable_sum((f.values() * g.values()).abs()) * f.spacing();
  StepRearrangement rf = decreasing_rearrangement(f);
  StepRearrangement rg = decreasing_rearrangement(g);
  res.rhs = stable_sum(rf.values * rg.values) * f.spacing();
  res.holds = res.lhs <= res.rhs + 1e-12 * res.rhs;
  return res;
}

bool convex_order_check(const GridFunction& f, const GridFunction& g,
                        const std::function<double(double)>& Phi, double tol) {
  require_same_grid(f, g, "convex_order_check");
  if (!is_rearranged(f) || !is_rearranged(g))
    throw std::invalid_argument("convex_order_check: inputs must be rearranged");
  if (Phi(0.0) != 0.0)
    throw std::invalid_argument("convex_order_check: Phi(0) must be 0");
  // spot-check convexity and monotonicity on the sampled value range
  const double vmax =
      std::max(f.values().abs().maxCoeff(), g.values().abs().maxCoeff());
  if (vmax > 0.0) {
    double prev = Phi(0.0);
    double prev_slope = -std::numeric_limits<double>::infinity();
    const int probes = 17;
    for (int k = 1; k <= probes; ++k) {
      const double t0 = vmax * (k - 1) / probes, t1 = vmax * k / probes;
      const double ph = Phi(t1);
      if (ph < prev - 1e-12 * std::abs(prev))
        throw std::invalid_argument("convex_order_check: Phi not nondecreasing");
      const double slope = (ph - prev) / (t1 - t0);
      if (slope < prev_slope - 1e-9 * (std::abs(slope) + 1.0))
        throw std::invalid_argument("convex_order_check: Phi not convex");
      prev = ph;
      prev_slope = slope;
    }
  }
  Array pf(f.size()), pg(g.size());
  for (int i = 0; i < f.size(); ++i) {
    pf[i] = Phi(std::abs(f.values()[i]));
    pg[i] = Phi(std::abs(g.values()[i]));
  }
  const double lhs = stable_sum(pf) * f.spacing();
  const double rhs = stable_sum(pg) * f.spacing();
  if (tol < 0.0) tol = 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return lhs <= rhs + tol;
}

}  // namespace fracsym
