#pragma once

#include <optional>

#include "fracsym/fractional_laplacian.hpp"
#include "fracsym/nonlinearity.hpp"
#include "fracsym/rearrange.hpp"

namespace fracsym {

struct SolverControls {
  double newton_tol = 1e-10;  // L2 residual, relative to |f|_2
  int max_iters = 60;
  int max_halvings = 20;
};

/// One implicit step h (-Delta)^{sigma/2} A(u) + u = f, solved in the
/// elliptic variable v = A(u): h L v + B(v) = f.
struct ResolventProblem {
  const DiscreteOperator* op = nullptr;
  Nonlinearity nonlinearity;
  double h = 1.0;
  GridFunction f;
  SolverControls controls;

  ResolventProblem(const DiscreteOperator& op_, Nonlinearity nl, double h_,
                   GridFunction f_, SolverControls c = {});
};

struct ResolventSolution {
  GridFunction u;  // = B(v)
  GridFunction v;  // = A(u)
  double residual_norm = 0.0;
  int iterations = 0;
  int clamp_count = 0;
  std::vector<double> residual_history;  // accepted-step residuals
};

/// Damped Newton on R(v) = h L v + B(v) - f with Jacobian h L + diag(B'(v)),
/// line-searched step halving, negative overshoots clamped at zero. Newton
/// linear systems are solved matrix-free by Jacobi-preconditioned CG with a
/// dense LDLT fallback.
ResolventSolution solve_resolvent(const ResolventProblem& problem);

/// |u1 - u2|_1 - |f1 - f2|_1 (theory predicts <= 0 up to solver tolerance).
double contraction_gap(const ResolventSolution& s1, const ResolventSolution& s2,
                       const GridFunction& f1, const GridFunction& f2);

/// (int u - int f) / int f; requires int f > 0.
double mass_balance(const ResolventSolution& sol, const GridFunction& f);

/// Twin solves with data f and f#; both solutions symmetrized and compared.
/// For convex B the second report compares B(v#) with B(V) as well.
struct SymmetrizationReport {
  ConcentrationReport v_report;
  std::optional<ConcentrationReport> b_report;
  double mass_plain = 0.0;  // int u for the f-run
  double mass_symm = 0.0;   // int u for the f#-run
};

SymmetrizationReport elliptic_symmetrization_experiment(
    const GridFunction& f, const Nonlinearity& nl, double sigma, double h,
    SolverControls controls = {});

/// Variant reusing a preassembled operator (grid must match f).
SymmetrizationReport elliptic_symmetrization_experiment(
    const GridFunction& f, const Nonlinearity& nl, const DiscreteOperator& op,
    double h, SolverControls controls = {});

struct TailFit {
  double slope = 0.0;
  double prefactor = 0.0;  // u ~ prefactor * |x|^slope on the window
  double r_squared = 0.0;
};

/// Least-squares fit of log u against log |x| over even-side averages of the
/// cells with radius in [r_lo, r_hi]. Values must be positive on the window.
TailFit tail_fit(const GridFunction& snapshot, double r_lo, double r_hi);

struct EllipticCounterexampleReport {
  double m = 0.0, R = 0.0, sigma = 0.0, h = 0.0;
  double h_guard = 0.0;          // admissible-h bound used
  double window_lo = 0.0, window_hi = 0.0;
  double mass_u = 0.0, mass_uR = 0.0;
  TailFit tail_u, tail_uR;
  Relation relation = Relation::Equal;  // compare_concentration(u_R, u)
  double min_gap = 0.0, max_gap = 0.0;
  bool slopes_ok = false;
  bool violation = false;  // u_R is NOT less concentrated than u
  std::optional<GridFunction> u, uR;
};

/// Mass-preserving indicator pair f = chi_(-1,1), f_R = R^{-1} chi_(-R,R)
/// (sampled, rescaled to exactly equal discrete masses), solved with
/// h L(u^m) + u = f; for m > 1 and small h the less concentrated datum
/// produces the more concentrated solution at large radii.
/// Requires m >= 1, R >= 1 and h below the scaling guard.
EllipticCounterexampleReport elliptic_counterexample(
    double m, double R, double sigma, double h, const Grid1D& grid,
    SolverControls controls = {});

}  // namespace fracsym
