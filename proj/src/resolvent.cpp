#include "fracsym/resolvent.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace fracsym {

namespace {

using Vector = Eigen::VectorXd;

// Jacobi-preconditioned CG on J = h K + diag(d), matrix-free.
// Returns true when the relative residual target was reached.
bool pcg(const DiscreteOperator& op, double h, const Array& diag,
         const Array& rhs, Array& x, double rel_tol, int max_iters) {
  Array jd = h * op.diagonal() + diag;
  Array r = rhs - (h * op.apply(x) + diag * x);
  Array z = r / jd;
  Array p = z;
  double rz = (r * z).sum();
  const double b_norm = std::sqrt((rhs * rhs).sum());
  if (b_norm == 0.0) {
    x.setZero();
    return true;
  }
  for (int it = 0; it < max_iters; ++it) {
    if (std::sqrt((r * r).sum()) <= rel_tol * b_norm) return true;
    Array Jp = h * op.apply(p) + diag * p;
    const double pJp = (p * Jp).sum();
    if (!(pJp > 0.0)) return false;  // lost positive definiteness
    const double alpha = rz / pJp;
    x += alpha * p;
    r -= alpha * Jp;
    z = r / jd;
    const double rz_new = (r * z).sum();
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  return std::sqrt((r * r).sum()) <= rel_tol * b_norm;
}

Array solve_newton_system(const DiscreteOperator& op, double h,
                          const Array& diag, const Array& rhs,
                          double rel_tol) {
  const int n = static_cast<int>(rhs.size());
  Array x = Array::Zero(n);
  if (pcg(op, h, diag, rhs, x, rel_tol, std::max(800, 2 * n))) return x;
  if (n > 4096)
    throw std::runtime_error(
        "solve_resolvent: CG stalled and the system is too large for the "
        "dense fallback");
  Eigen::MatrixXd J = h * op.dense_matrix();
  J.diagonal() += diag.matrix();
  Vector sol = J.ldlt().solve(rhs.matrix());
  return sol.array();
}

}  // namespace

ResolventProblem::ResolventProblem(const DiscreteOperator& op_, Nonlinearity nl,
                                   double h_, GridFunction f_, SolverControls c)
    : op(&op_), nonlinearity(std::move(nl)), h(h_), f(std::move(f_)),
      controls(c) {
  if (!(h > 0.0)) throw std::invalid_argument("ResolventProblem: h must be > 0");
  if (!(f.grid() == op->grid()))
    throw std::invalid_argument("ResolventProblem: f not on operator grid");
  if ((f.values() < 0.0).any())
    throw std::invalid_argument("ResolventProblem: data must be nonnegative");
}

ResolventSolution solve_resolvent(const ResolventProblem& problem) {
  const DiscreteOperator& op = *problem.op;
  const Nonlinearity& nl = problem.nonlinearity;
  const double h = problem.h;
  const int n = problem.f.size();
  const Array& f = problem.f.values();

  const double f_norm = std::sqrt((f * f).sum());
  const double tol = problem.controls.newton_tol * std::max(f_norm, 1e-300);

  Array v(n);
  for (int i = 0; i < n; ++i) v[i] = nl.A(f[i]);  // exact as h -> 0

  auto residual = [&](const Array& w) -> Array {
    Array r = h * op.apply(w) - f;
    for (int i = 0; i < n; ++i) r[i] += nl.B(w[i]);
    return r;
  };

  ResolventSolution out{GridFunction(problem.f.grid(), Array::Zero(n)),
                        GridFunction(problem.f.grid(), Array::Zero(n)),
                        0.0, 0, 0, {}};

  Array r = residual(v);
  double r_norm = std::sqrt((r * r).sum());
  out.residual_history.push_back(r_norm);

  for (int iter = 1; iter <= problem.controls.max_iters; ++iter) {
    out.iterations = iter;
    if (r_norm <= tol) break;

    // Jacobian diagonal B'(v); guard both degeneracies (B'(0) = 0 and
    // B'(0) = +inf) without touching the residual
    const double v_cap = 1e-16 * std::max(1.0, v.abs().maxCoeff());
    Array diag(n);
    for (int i = 0; i < n; ++i) {
      double d = nl.B_prime(std::max(v[i], v_cap));
      diag[i] = std::min(std::max(d, 1e-12), 1e12);
    }

    // inexact Newton: aim the linear solve below the next residual target
    const double eta =
        std::max(1e-14, std::min(1e-4, 0.01 * tol / std::max(r_norm, 1e-300)));
    Array step = solve_newton_system(op, h, diag, -r, eta);

    double alpha = 1.0;
    Array v_next = v, r_next = r;
    double r_next_norm = r_norm;
    bool accepted = false;
    for (int halve = 0; halve <= problem.controls.max_halvings; ++halve) {
      Array cand = (v + alpha * step).max(0.0);
      Array rc = residual(cand);
      const double rc_norm = std::sqrt((rc * rc).sum());
      if (rc_norm < r_norm) {
        v_next = std::move(cand);
        r_next = std::move(rc);
        r_next_norm = rc_norm;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (r_norm <= 1e3 * tol) break;  // stalled within a whisker of target
      throw std::runtime_error(
          "solve_resolvent: no descent after max halvings; residual " +
          std::to_string(r_norm));
    }
    for (int i = 0; i < n; ++i)
      if (v[i] + alpha * step[i] < 0.0) ++out.clamp_count;
    v = std::move(v_next);
    r = std::move(r_next);
    r_norm = r_next_norm;
    out.residual_history.push_back(r_norm);
  }

  if (r_norm > tol) {
    if (r_norm > 1e3 * tol)
      throw std::runtime_error(
          "solve_resolvent: Newton did not converge; residual " +
          std::to_string(r_norm) + " tol " + std::to_string(tol));
  }

  Array u(n);
  for (int i = 0; i < n; ++i) {
    if (v[i] < 0.0)
      throw std::runtime_error("solve_resolvent: negative v after clamping");
    u[i] = nl.B(v[i]);
  }
  out.u = GridFunction(problem.f.grid(), std::move(u));
  out.v = GridFunction(problem.f.grid(), std::move(v));
  out.residual_norm = r_norm;
  return out;
}

double contraction_gap(const ResolventSolution& s1, const ResolventSolution& s2,
                       const GridFunction& f1, const GridFunction& f2) {
  require_same_grid(f1, f2, "contraction_gap");
  const double du =
      stable_sum((s1.u.values() - s2.u.values()).abs()) * f1.spacing();
  const double df =
      stable_sum((f1.values() - f2.values()).abs()) * f1.spacing();
  return du - df;
}

double mass_balance(const ResolventSolution& sol, const GridFunction& f) {
  const double mf = integrate(f);
  if (!(mf > 0.0))
    throw std::invalid_argument("mass_balance: int f must be positive");
  return (integrate(sol.u) - mf) / mf;
}

SymmetrizationReport elliptic_symmetrization_experiment(
    const GridFunction& f, const Nonlinearity& nl, const DiscreteOperator& op,
    double h, SolverControls controls) {
  GridFunction fs = spherical_rearrangement(f);
  ResolventSolution plain =
      solve_resolvent(ResolventProblem(op, nl, h, f, controls));
  ResolventSolution symm =
      solve_resolvent(ResolventProblem(op, nl, h, fs, controls));

  SymmetrizationReport rep;
  const double tol = 1e-6 * std::max(integrate(f), 1e-300);
  rep.v_report = compare_concentration(plain.v, symm.v, tol);
  rep.mass_plain = integrate(plain.u);
  rep.mass_symm = integrate(symm.u);
  if (nl.b_convexity() == Convexity::Convex ||
      nl.b_convexity() == Convexity::Linear)
    rep.b_report = compare_concentration(plain.u, symm.u, tol);
  return rep;
}

SymmetrizationReport elliptic_symmetrization_experiment(
    const GridFunction& f, const Nonlinearity& nl, double sigma, double h,
    SolverControls controls) {
  DiscreteOperator op = assemble(
      OperatorSpec(sigma, OperatorMethod::SingularIntegralTruncated, f.grid()));
  return elliptic_symmetrization_experiment(f, nl, op, h, controls);
}

TailFit tail_fit(const GridFunction& snapshot, double r_lo, double r_hi) {
  const Grid1D& g = snapshot.grid();
  if (!(0.0 < r_lo && r_lo < r_hi && r_hi < g.half_width()))
    throw std::invalid_argument("tail_fit: window must satisfy 0 < lo < hi < L");
  // up to 128 log-spaced radii so every decade of the window carries the
  // same weight in the regression
  constexpr int kMaxPoints = 128;
  std::vector<double> lx, ly;
  const int n = g.n_cells();
  int last_cell = -1;
  for (int k = 0; k < kMaxPoints; ++k) {
    const double r_target =
        r_lo * std::pow(r_hi / r_lo, k / double(kMaxPoints - 1));
    int i = n / 2 +
            static_cast<int>(std::floor((r_target - 0.5 * g.spacing()) /
                                        g.spacing()));
    i = std::min(std::max(i, n / 2), n - 1);
    if (i == last_cell) continue;
    last_cell = i;
    const double r = g.node(i);
    if (r < r_lo || r > r_hi) continue;
    const int mirror = n - 1 - i;
    double val = snapshot.values()[i];
    if (mirror >= 0 && std::abs(g.node(mirror) + r) < 0.5 * g.spacing())
      val = 0.5 * (val + snapshot.values()[mirror]);
    if (!(val > 0.0))
      throw std::invalid_argument("tail_fit: non-positive value in window");
    lx.push_back(std::log(r));
    ly.push_back(std::log(val));
  }
  if (lx.size() < 4)
    throw std::invalid_argument("tail_fit: window too narrow for a fit");
  const int m = static_cast<int>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int k = 0; k < m; ++k) {
    sx += lx[k];
    sy += ly[k];
    sxx += lx[k] * lx[k];
    sxy += lx[k] * ly[k];
    syy += ly[k] * ly[k];
  }
  const double den = m * sxx - sx * sx;
  TailFit fit;
  fit.slope = (m * sxy - sx * sy) / den;
  const double intercept = (sy - fit.slope * sx) / m;
  fit.prefactor = std::exp(intercept);
  const double ss_tot = syy - sy * sy / m;
  double ss_res = 0.0;
  for (int k = 0; k < m; ++k) {
    const double e = ly[k] - (intercept + fit.slope * lx[k]);
    ss_res += e * e;
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

EllipticCounterexampleReport elliptic_counterexample(double m, double R,
                                                     double sigma, double h,
                                                     const Grid1D& grid,
                                                     SolverControls controls) {
  if (!(m >= 1.0)) throw std::invalid_argument("elliptic_counterexample: m >= 1");
  if (!(R >= 1.0)) throw std::invalid_argument("elliptic_counterexample: R >= 1");
  EllipticCounterexampleReport rep;
  rep.m = m;
  rep.R = R;
  rep.sigma = sigma;
  rep.h = h;
  // admissible h from the mass-preserving scaling (A = R^{-N}, N = 1)
  rep.h_guard = 0.1 * std::pow(R, sigma) * std::pow(R, -(m - 1.0));
  if (h > rep.h_guard)
    throw std::invalid_argument("elliptic_counterexample: h exceeds the guard " +
                                std::to_string(rep.h_guard));

  const double L = grid.half_width();
  rep.window_lo = std::max(0.25 * L, 5.0 * R);
  rep.window_hi = 0.75 * L;
  if (!(rep.window_hi >= 2.0 * rep.window_lo))
    throw std::invalid_argument(
        "elliptic_counterexample: tail window outside the grid; increase L");

  auto indicator = [&](double radius) {
    GridFunction raw(grid, [radius](double x) {
      return std::abs(x) < radius ? 1.0 : 0.0;
    });
    const double mass = integrate(raw);
    if (!(mass > 0.0))
      throw std::invalid_argument("elliptic_counterexample: empty indicator");
    return GridFunction(grid, Array(raw.values() / mass));  // unit mass
  };
  GridFunction f = indicator(1.0);
  GridFunction fR = indicator(R);

  DiscreteOperator op = assemble(
      OperatorSpec(sigma, OperatorMethod::SingularIntegralTruncated, grid));
  Nonlinearity nl = Nonlinearity::power(m);
  ResolventSolution su = solve_resolvent(ResolventProblem(op, nl, h, f, controls));
  ResolventSolution sR = solve_resolvent(ResolventProblem(op, nl, h, fR, controls));

  rep.mass_u = integrate(su.u);
  rep.mass_uR = integrate(sR.u);
  rep.tail_u = tail_fit(su.u, rep.window_lo, rep.window_hi);
  rep.tail_uR = tail_fit(sR.u, rep.window_lo, rep.window_hi);
  const double want = -(1.0 + sigma);
  rep.slopes_ok = std::abs(rep.tail_u.slope - want) <= 0.15 &&
                  std::abs(rep.tail_uR.slope - want) <= 0.15;

  const double tol = 1e-6 * std::max(rep.mass_u, rep.mass_uR);
  ConcentrationReport cc = compare_concentration(sR.u, su.u, tol);
  rep.relation = cc.relation;
  rep.min_gap = cc.min_gap;
  rep.max_gap = cc.max_gap;
  rep.violation = cc.relation != Relation::FirstLess &&
                  cc.relation != Relation::Equal;
  rep.u = std::move(su.u);
  rep.uR = std::move(sR.u);
  return rep;
}

}  // namespace fracsym
