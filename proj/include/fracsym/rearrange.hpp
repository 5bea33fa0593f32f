#pragma once

#include <optional>
#include <vector>

#include "fracsym/grid.hpp"

namespace fracsym {

/// Exact measure-weighted decreasing rearrangement f*(s), stored as a step
/// function: f*(s) = values[i] for s in [S_i, S_{i+1}) with step widths
/// given by measures (all equal to cell_measure on a uniform grid).
struct StepRearrangement {
  double cell_measure = 0.0;  // uniform step width; 0 when measures vary
  Array values;               // non-increasing
  Array measures;             // per-step widths

  double total_measure() const { return measures.sum(); }
};

enum class Relation { Equal, FirstLess, FirstGreater, Incomparable };
const char* to_string(Relation r);

struct ConcentrationReport {
  Relation relation = Relation::Equal;
  double max_gap = 0.0;  // max over s of int_0^s (g* - f*)
  double min_gap = 0.0;  // min over s of the same
  std::vector<double> crossing_points;
  double tolerance = 0.0;
  bool symmetrized_both = true;  // comparands are always rearranged first
};

/// mu_f(k) = dx * #{ i : |f_i| > k }.  Requires k >= 0.
double distribution_function(const GridFunction& f, double k);

/// |values| sorted non-increasing; ties keep original index order.
StepRearrangement decreasing_rearrangement(const GridFunction& f);

/// Measure-weighted variant used by the N >= 2 radial machinery.
StepRearrangement weighted_decreasing_rearrangement(const Array& values,
                                                    const Array& measures);

/// Evaluate f* at measure coordinate s (value of the step containing s).
double evaluate(const StepRearrangement& r, double s);

/// int_0^s f*(tau) dtau, exact piecewise-linear evaluation. Requires s >= 0.
double cumulative_concentration(const StepRearrangement& r, double s);

/// Spherical decreasing rearrangement f#. For N = 1 on a symmetric grid this
/// is an exact permutation of |values| (largest values nearest the origin,
/// per radius level the left cell is filled first). For N >= 2 the grid is
/// read as a radial profile and f# samples the measure-weighted f* at
/// s = omega_N |x|^N, which is no longer a permutation.
GridFunction spherical_rearrangement(const GridFunction& f, int N = 1);

bool is_rearranged(const GridFunction& f, int N = 1);

/// Comparison of mass concentrations of f and g (both symmetrized first):
/// FirstLess means f is less concentrated than g. Negative tol selects the
/// default 1e-9 * max(|f|_1, |g|_1).
ConcentrationReport compare_concentration(const GridFunction& f,
                                          const GridFunction& g,
                                          double tol = -1.0);

struct HardyLittlewoodResult {
  double lhs = 0.0;  // int |f g|
  double rhs = 0.0;  // int f* g*
  bool holds = false;
};
HardyLittlewoodResult hardy_littlewood_check(const GridFunction& f,
                                             const GridFunction& g);

/// Forward direction of the convex-order equivalence: for rearranged f, g
/// returns int Phi(f) <= int Phi(g) + tol. Phi must be convex nondecreasing
/// with Phi(0) = 0 (spot-checked on the sampled value range).
bool convex_order_check(const GridFunction& f, const GridFunction& g,
                        const std::function<double(double)>& Phi,
                        double tol = -1.0);

/// Measure of the N-dimensional unit ball (omega_1 = 2).
double unit_ball_measure(int N);

}  // namespace fracsym
