#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracsym/resolvent.hpp"
#include "fracsym/rng.hpp"

using namespace fracsym;

namespace {

DiscreteOperator make_singular(double sigma, double L, int n) {
  return assemble(OperatorSpec(
      sigma, OperatorMethod::SingularIntegralTruncated, Grid1D(L, n)));
}

GridFunction random_profile(const Grid1D& g, CounterRng& rng) {
  Array v(g.n_cells());
  for (int i = 0; i < g.n_cells(); ++i) v[i] = rng.uniform(0.0, 1.0);
  return GridFunction(g, std::move(v));
}

bool ordered_or_equal(Relation r) {
  return r == Relation::FirstLess || r == Relation::Equal;
}

}  // namespace

TEST_CASE("zero data solves in one iteration") {
  DiscreteOperator op = make_singular(1.0, 10.0, 128);
  GridFunction f(op.grid(), Array::Zero(128));
  ResolventSolution sol =
      solve_resolvent(ResolventProblem(op, Nonlinearity::power(2.0), 0.5, f));
  CHECK(sol.iterations == 1);
  CHECK((sol.u.values() == 0.0).all());
  CHECK((sol.v.values() == 0.0).all());
}

TEST_CASE("periodic backend: constants are invariant for linear A") {
  Grid1D g(10.0, 128);
  DiscreteOperator op =
      assemble(OperatorSpec(1.0, OperatorMethod::SpectralPeriodic, g));
  GridFunction f(g, Array::Constant(128, 0.7));
  ResolventSolution sol =
      solve_resolvent(ResolventProblem(op, Nonlinearity::power(1.0), 1.0, f));
  CHECK((sol.u.values() - 0.7).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("linear case matches a dense direct solve") {
  DiscreteOperator op = make_singular(0.9, 20.0, 512);
  const Grid1D& g = op.grid();
  GridFunction f(g, [](double x) { return std::abs(x) < 2.0 ? 1.0 : 0.0; });
  const double h = 1.0;
  ResolventSolution sol =
      solve_resolvent(ResolventProblem(op, Nonlinearity::power(1.0), h, f));

  Eigen::MatrixXd J = h * op.dense_matrix();
  J.diagonal().array() += 1.0;
  Eigen::VectorXd direct = J.ldlt().solve(f.values().matrix());
  const double rel = (sol.u.values() - direct.array()).matrix().norm() /
                     direct.norm();
  CHECK(rel <= 1e-10);
}

TEST_CASE("newton residuals decrease along accepted steps") {
  DiscreteOperator op = make_singular(1.0, 20.0, 256);
  GridFunction f(op.grid(),
                 [](double x) { return std::abs(x) < 2.0 ? 1.0 : 0.0; });
  ResolventSolution sol =
      solve_resolvent(ResolventProblem(op, Nonlinearity::power(2.0), 0.5, f));
  REQUIRE(sol.residual_history.size() >= 2);
  for (std::size_t k = 1; k < sol.residual_history.size(); ++k)
    CHECK(sol.residual_history[k] < sol.residual_history[k - 1]);
  CHECK(sol.residual_norm <=
        1e-10 * std::sqrt((f.values() * f.values()).sum()));
}

TEST_CASE("L1 contraction over random pairs") {
  DiscreteOperator op = make_singular(1.0, 20.0, 256);
  CounterRng rng(321);
  for (double m : {0.5, 1.0, 2.0}) {
    Nonlinearity nl = Nonlinearity::power(m);
    for (int trial = 0; trial < 50; ++trial) {
      GridFunction f1 = random_profile(op.grid(), rng);
      GridFunction f2 = random_profile(op.grid(), rng);
      ResolventSolution s1 = solve_resolvent(ResolventProblem(op, nl, 0.1, f1));
      ResolventSolution s2 = solve_resolvent(ResolventProblem(op, nl, 0.1, f2));
      const double gap = contraction_gap(s1, s2, f1, f2);
      const double df =
          lp_norm(GridFunction(op.grid(), Array(f1.values() - f2.values())),
                  1.0);
      CHECK(gap <= 1e-6 * df);
    }
  }
}

TEST_CASE("contraction: identical and perturbed data") {
  DiscreteOperator op = make_singular(1.0, 20.0, 256);
  Nonlinearity nl = Nonlinearity::power(2.0);
  GridFunction f(op.grid(), [](double x) { return std::exp(-x * x); });
  ResolventSolution s1 = solve_resolvent(ResolventProblem(op, nl, 0.2, f));
  ResolventSolution s2 = solve_resolvent(ResolventProblem(op, nl, 0.2, f));
  CHECK(std::abs(contraction_gap(s1, s2, f, f)) <= 1e-12);

  Array pert = f.values();
  pert[128] += 0.05;  // single-cell spike
  GridFunction f3(op.grid(), std::move(pert));
  ResolventSolution s3 = solve_resolvent(ResolventProblem(op, nl, 0.2, f3));
  CHECK(contraction_gap(s1, s3, f, f3) <= 1e-8);
}

TEST_CASE("mass balance") {
  // linear case, h = 0.01, L = 40: truncation-limited, below 1e-3
  DiscreteOperator op = make_singular(1.0, 40.0, 1024);
  GridFunction chi(op.grid(),
                   [](double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; });
  ResolventSolution lin = solve_resolvent(
      ResolventProblem(op, Nonlinearity::power(1.0), 0.01, chi));
  CHECK(std::abs(mass_balance(lin, chi)) < 1e-3);

  ResolventSolution quad = solve_resolvent(
      ResolventProblem(op, Nonlinearity::power(2.0), 0.01, chi));
  CHECK(std::abs(mass_balance(quad, chi)) < 1e-2);

  GridFunction zero(op.grid(), Array::Zero(1024));
  ResolventSolution sz = solve_resolvent(
      ResolventProblem(op, Nonlinearity::power(1.0), 0.01, zero));
  CHECK_THROWS_AS(mass_balance(sz, zero), std::invalid_argument);
}

TEST_CASE("comparison principle: ordered data give ordered solutions") {
  DiscreteOperator op = make_singular(0.8, 20.0, 256);
  CounterRng rng(55);
  for (double m : {0.5, 1.0, 2.0}) {
    Nonlinearity nl = Nonlinearity::power(m);
    GridFunction f1 = random_profile(op.grid(), rng);
    Array bigger = f1.values();
    for (int i = 0; i < bigger.size(); ++i) bigger[i] += rng.uniform(0.0, 0.5);
    GridFunction f2(op.grid(), std::move(bigger));
    ResolventSolution s1 = solve_resolvent(ResolventProblem(op, nl, 0.3, f1));
    ResolventSolution s2 = solve_resolvent(ResolventProblem(op, nl, 0.3, f2));
    CHECK((s1.u.values() <= s2.u.values() + 1e-8).all());
  }
}

TEST_CASE("radial data give radial solutions") {
  DiscreteOperator op = make_singular(1.0, 20.0, 256);
  const Grid1D& g = op.grid();
  GridFunction f(g, [](double x) { return std::exp(-0.5 * x * x); });
  REQUIRE(is_rearranged(f));
  for (double m : {0.5, 2.0}) {
    ResolventSolution sol = solve_resolvent(
        ResolventProblem(op, Nonlinearity::power(m), 0.5, f));
    const Array& u = sol.u.values();
    const int n = g.n_cells();
    for (int i = 0; i < n / 2; ++i)  // even
      CHECK(u[i] == doctest::Approx(u[n - 1 - i]).epsilon(1e-8));
    for (int i = n / 2 + 1; i < n; ++i)  // non-increasing in |x|
      CHECK(u[i] <= u[i - 1] + 1e-8);
  }
}

TEST_CASE("concentration monotonicity for rearranged pairs, per-variable") {
  // f1 < f2, both rearranged, equal masses. The order passes to the
  // solutions in the elliptic variable when B is concave and in u = B(v)
  // when B is convex; the opposite variable genuinely fails at small h.
  DiscreteOperator op = make_singular(1.0, 40.0, 1024);
  const Grid1D& g = op.grid();
  GridFunction f2(g, [](double x) { return std::exp(-x * x); });
  GridFunction wide_raw(g, [](double x) { return std::exp(-x * x / 16.0); });
  GridFunction f1(g, Array(wide_raw.values() *
                           (integrate(f2) / integrate(wide_raw))));
  REQUIRE(is_rearranged(f1));
  REQUIRE(is_rearranged(f2));
  REQUIRE(ordered_or_equal(compare_concentration(f1, f2, 1e-10).relation));

  const double h = 0.01;
  const double tol = 1e-8 * integrate(f2);

  // concave B (m = 2): v-order holds, u-order fails
  {
    Nonlinearity nl = Nonlinearity::power(2.0);
    ResolventSolution s1 = solve_resolvent(ResolventProblem(op, nl, h, f1));
    ResolventSolution s2 = solve_resolvent(ResolventProblem(op, nl, h, f2));
    CHECK(ordered_or_equal(compare_concentration(s1.v, s2.v, tol).relation));
    CHECK_FALSE(
        ordered_or_equal(compare_concentration(s1.u, s2.u, tol).relation));
  }
  // convex B (m = 0.5): u-order holds, v-order fails
  {
    Nonlinearity nl = Nonlinearity::power(0.5);
    ResolventSolution s1 = solve_resolvent(ResolventProblem(op, nl, h, f1));
    ResolventSolution s2 = solve_resolvent(ResolventProblem(op, nl, h, f2));
    CHECK(ordered_or_equal(compare_concentration(s1.u, s2.u, tol).relation));
    CHECK_FALSE(
        ordered_or_equal(compare_concentration(s1.v, s2.v, tol).relation));
  }
  // linear B: both coincide and hold
  {
    Nonlinearity nl = Nonlinearity::power(1.0);
    ResolventSolution s1 = solve_resolvent(ResolventProblem(op, nl, h, f1));
    ResolventSolution s2 = solve_resolvent(ResolventProblem(op, nl, h, f2));
    CHECK(ordered_or_equal(compare_concentration(s1.u, s2.u, tol).relation));
  }
}

TEST_CASE("symmetrization experiment: rearranged data is a fixed point") {
  DiscreteOperator op = make_singular(1.0, 20.0, 256);
  GridFunction f(op.grid(), [](double x) { return std::exp(-x * x); });
  REQUIRE(is_rearranged(f));
  SymmetrizationReport rep = elliptic_symmetrization_experiment(
      f, Nonlinearity::power(1.0), op, 0.5);
  CHECK(rep.v_report.relation == Relation::Equal);
}

TEST_CASE("symmetrization experiment: linear B, off-center bump") {
  DiscreteOperator op = make_singular(1.0, 40.0, 1024);
  GridFunction f(op.grid(), [](double x) {
    const double z = x - 4.0;
    return std::exp(-z * z);
  });
  SymmetrizationReport rep = elliptic_symmetrization_experiment(
      f, Nonlinearity::power(1.0), op, 0.5);
  CHECK(ordered_or_equal(rep.v_report.relation));
  REQUIRE(rep.b_report.has_value());
  CHECK(ordered_or_equal(rep.b_report->relation));
}

TEST_CASE("symmetrization experiment: convex B, two-bump data") {
  // The u-comparison (second report) holds. The v-comparison must fail for
  // genuinely asymmetric data: both runs conserve int u, the u-order is
  // strict, and A = B^{-1} is strictly concave, so int v of the plain run
  // strictly exceeds the symmetrized one and the cumulative curves cross.
  DiscreteOperator op = make_singular(0.5, 40.0, 1024);
  GridFunction f(op.grid(), [](double x) {
    const double a = (x - 5.0) / 2.0, b = (x + 3.0);
    return 0.8 * std::exp(-a * a) + 0.5 * std::exp(-b * b);
  });
  Nonlinearity nl = Nonlinearity::power(0.5);  // B(v) = v^2
  SymmetrizationReport rep = elliptic_symmetrization_experiment(f, nl, op, 0.5);
  REQUIRE(rep.b_report.has_value());
  CHECK(ordered_or_equal(rep.b_report->relation));
  CHECK_FALSE(ordered_or_equal(rep.v_report.relation));

  // the mass mechanism, directly on the solutions
  GridFunction fs = spherical_rearrangement(f);
  ResolventSolution plain = solve_resolvent(ResolventProblem(op, nl, 0.5, f));
  ResolventSolution symm = solve_resolvent(ResolventProblem(op, nl, 0.5, fs));
  // u-mass agrees up to truncation flux (sigma = 0.5 tails are fat at L = 40)
  CHECK(std::abs(integrate(plain.u) - integrate(symm.u)) < 0.01 * integrate(f));
  CHECK(integrate(plain.v) > integrate(symm.v) + 1e-6);  // strict v-mass gap
}

TEST_CASE("elliptic counterexample: m = 2 violates, m = 1 does not") {
  Grid1D grid(100.0, 2048);
  EllipticCounterexampleReport rep =
      elliptic_counterexample(2.0, 4.0, 1.0, 1e-3, grid);
  CHECK(rep.violation);
  CHECK(rep.relation != Relation::FirstLess);
  CHECK(rep.slopes_ok);
  CHECK(std::abs(rep.mass_u - rep.mass_uR) < 0.01 * rep.mass_u);
  // scaling prediction: the wide-data tail is suppressed for m > 1
  CHECK(rep.tail_uR.prefactor < rep.tail_u.prefactor);

  EllipticCounterexampleReport ctrl =
      elliptic_counterexample(1.0, 4.0, 1.0, 1e-3, grid);
  CHECK_FALSE(ctrl.violation);
  CHECK(ctrl.relation == Relation::FirstLess);
}

TEST_CASE("elliptic counterexample at R = 1 compares equal") {
  Grid1D grid(100.0, 1024);
  EllipticCounterexampleReport rep =
      elliptic_counterexample(2.0, 1.0, 1.0, 1e-3, grid);
  CHECK(rep.relation == Relation::Equal);
  CHECK_FALSE(rep.violation);
}

TEST_CASE("elliptic counterexample guards") {
  Grid1D grid(100.0, 1024);
  // h above the admissible scaling window
  CHECK_THROWS_AS(elliptic_counterexample(2.0, 4.0, 1.0, 0.5, grid),
                  std::invalid_argument);
  // tail window does not fit: demands a larger domain
  Grid1D tiny(20.0, 512);
  CHECK_THROWS_AS(elliptic_counterexample(2.0, 4.0, 1.0, 1e-3, tiny),
                  std::invalid_argument);
  CHECK_THROWS_AS(elliptic_counterexample(0.5, 4.0, 1.0, 1e-3, grid),
                  std::invalid_argument);
}

TEST_CASE("desk-scale smoke at n = 8192 stays matrix-free") {
  DiscreteOperator op = make_singular(1.0, 100.0, 8192);
  GridFunction f(op.grid(),
                 [](double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; });
  ResolventSolution sol = solve_resolvent(
      ResolventProblem(op, Nonlinearity::power(2.0), 0.01, f));
  CHECK(sol.residual_norm <=
        1e-10 * std::sqrt((f.values() * f.values()).sum()));
  CHECK(std::abs(mass_balance(sol, f)) < 1e-2);
}

TEST_CASE("problem validation") {
  DiscreteOperator op = make_singular(1.0, 10.0, 128);
  GridFunction f(op.grid(), Array::Zero(128));
  CHECK_THROWS_AS(ResolventProblem(op, Nonlinearity::power(1.0), 0.0, f),
                  std::invalid_argument);
  Array neg = Array::Zero(128);
  neg[3] = -0.5;
  CHECK_THROWS_AS(ResolventProblem(op, Nonlinearity::power(1.0), 0.1,
                                   GridFunction(op.grid(), neg)),
                  std::invalid_argument);
}
