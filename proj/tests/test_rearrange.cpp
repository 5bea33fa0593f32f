#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fracsym/rearrange.hpp"
#include "fracsym/rng.hpp"

using namespace fracsym;

namespace {

GridFunction random_function(const Grid1D& g, CounterRng& rng,
                             bool heavy = false) {
  Array v(g.n_cells());
  for (int i = 0; i < g.n_cells(); ++i)
    v[i] = heavy ? rng.heavy_tail() : rng.uniform(0.0, 1.0);
  return GridFunction(g, std::move(v));
}

// independent oracle: sorted copy via std::sort only
Array brute_sorted_desc(const GridFunction& f) {
  std::vector<double> v(f.values().data(), f.values().data() + f.size());
  for (double& x : v) x = std::abs(x);
  std::sort(v.begin(), v.end(), std::greater<double>());
  return Eigen::Map<const Array>(v.data(), v.size());
}

bool ordered_or_equal(Relation r) {
  return r == Relation::FirstLess || r == Relation::Equal;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("distribution function: indicator, max level, tent") {
  Grid1D g1(1.0, 1000);
  GridFunction chi(g1, [](double x) { return std::abs(x) < 0.5 ? 1.0 : 0.0; });
  CHECK(distribution_function(chi, 0.5) == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(distribution_function(chi, 1.0) == 0.0);
  CHECK(distribution_function(chi, 2.0) == 0.0);
  CHECK_THROWS_AS(distribution_function(chi, -0.1), std::invalid_argument);

  // f(x) = 1-|x| on (-1,1): mu(k) = 2(1-k), so mu(0.25) = 1.5
  GridFunction tent(g1, [](double x) { return 1.0 - std::abs(x); });
  CHECK(std::abs(distribution_function(tent, 0.25) - 1.5) <= g1.spacing());
}

TEST_CASE("decreasing rearrangement of the tent is 1 - s/2") {
  Grid1D g(1.0, 2000);
  GridFunction tent(g, [](double x) { return 1.0 - std::abs(x); });
  StepRearrangement r = decreasing_rearrangement(tent);
  // analytic inverse of mu(k) = 2(1-k): f*(s) = 1 - s/2
  for (int k = 0; k < r.values.size(); k += 97) {
    const double s = (k + 0.5) * r.cell_measure;
    CHECK(r.values[k] == doctest::Approx(1.0 - 0.5 * s).epsilon(2e-3));
  }
  for (int k = 1; k < r.values.size(); ++k)
    CHECK(r.values[k] <= r.values[k - 1]);
}

TEST_CASE("rearrangement is idempotent and sign-blind") {
  Grid1D g(2.0, 64);
  CounterRng rng(41);
  GridFunction f = random_function(g, rng);
  StepRearrangement r1 = decreasing_rearrangement(f);
  GridFunction sorted_back(g, r1.values);
  StepRearrangement r2 = decreasing_rearrangement(sorted_back);
  CHECK((r1.values == r2.values).all());

  GridFunction neg(g, Array(-f.values()));
  StepRearrangement rn = decreasing_rearrangement(neg);
  CHECK((r1.values == rn.values).all());
}

TEST_CASE("spherical rearrangement: centering, fixed points, oracle") {
  Grid1D g(2.0, 16);
  GridFunction chi(g, [](double x) { return x > 0.0 && x < 1.0 ? 1.0 : 0.0; });
  GridFunction cs = spherical_rearrangement(chi);
  GridFunction centered(g,
                        [](double x) { return std::abs(x) < 0.5 ? 1.0 : 0.0; });
  CHECK((cs.values() == centered.values()).all());

  CHECK(is_rearranged(centered));
  GridFunction again = spherical_rearrangement(cs);
  CHECK((again.values() == cs.values()).all());

  // shifted clipped tent: result must be radially non-increasing with the
  // brute-force sorted multiset
  Grid1D g2(2.0, 256);
  GridFunction tent(
      g2, [](double x) { return std::max(0.0, 1.0 - std::abs(x - 0.3)); });
  GridFunction ts = spherical_rearrangement(tent);
  Array sorted = brute_sorted_desc(tent);
  Array got = brute_sorted_desc(ts);
  CHECK((sorted == got).all());
  const int n = g2.n_cells();
  for (int i = 1; i < n / 2; ++i)  // non-increasing in |x| on each side
    CHECK(ts.values()[n / 2 + i] <= ts.values()[n / 2 + i - 1]);
  for (int i = 0; i + 1 < n / 2; ++i)
    CHECK(ts.values()[i] <= ts.values()[i + 1]);
  // idempotent
  GridFunction ts2 = spherical_rearrangement(ts);
  CHECK((ts2.values() == ts.values()).all());
}

TEST_CASE("spherical rearrangement on odd grids") {
  Grid1D g(1.5, 15);
  CounterRng rng(5);
  GridFunction f = random_function(g, rng);
  GridFunction fs = spherical_rearrangement(f);
  CHECK((brute_sorted_desc(f) == brute_sorted_desc(fs)).all());
  CHECK(fs.values().maxCoeff() == fs.values()[7]);  // peak at the center cell
  GridFunction fss = spherical_rearrangement(fs);
  CHECK((fss.values() == fs.values()).all());
}

TEST_CASE("cumulative concentration of a step function") {
  StepRearrangement r;
  r.cell_measure = 1.0;
  r.values = Array(3);
  r.values << 3.0, 2.0, 1.0;
  r.measures = Array::Constant(3, 1.0);
  CHECK(cumulative_concentration(r, 0.0) == 0.0);
  CHECK(cumulative_concentration(r, 1.5) == doctest::Approx(4.0));
  CHECK(cumulative_concentration(r, 3.0) == doctest::Approx(6.0));
  CHECK(cumulative_concentration(r, 99.0) == doctest::Approx(6.0));
  CHECK_THROWS_AS(cumulative_concentration(r, -1.0), std::invalid_argument);
}

TEST_CASE("norm preservation under both rearrangements") {
  Grid1D g(3.0, 128);
  CounterRng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    GridFunction f = random_function(g, rng, trial % 2 == 1);
    StepRearrangement r = decreasing_rearrangement(f);
    GridFunction fr(g, r.values);
    GridFunction fs = spherical_rearrangement(f);
    for (double p : {1.0, 2.0, 3.0, kInf}) {
      const double base = lp_norm(f, p);
      CHECK(std::abs(lp_norm(fr, p) - base) <= 1e-13 * base);
      CHECK(std::abs(lp_norm(fs, p) - base) <= 1e-13 * base);
    }
    // equidistribution is exact at every sampled level
    for (int k = 0; k < 8; ++k) {
      const double level = f.values().abs().maxCoeff() * k / 8.0;
      CHECK(distribution_function(f, level) ==
            distribution_function(fs, level));
    }
  }
}

TEST_CASE("compare_concentration relations") {
  Grid1D g(2.0, 64);
  GridFunction f(g, [](double x) { return std::abs(x) < 1.0 ? 0.5 : 0.0; });
  GridFunction gg(g, [](double x) { return std::abs(x) < 0.5 ? 1.0 : 0.0; });

  ConcentrationReport self = compare_concentration(f, f);
  CHECK(self.relation == Relation::Equal);

  // same mass, g more concentrated
  ConcentrationReport rep = compare_concentration(f, gg);
  CHECK(rep.relation == Relation::FirstLess);
  CHECK(rep.min_gap >= -rep.tolerance);
  CHECK(rep.max_gap > 0.0);

  ConcentrationReport rev = compare_concentration(gg, f);
  CHECK(rev.relation == Relation::FirstGreater);

  Grid1D gdiff(4.0, 64);
  GridFunction mism(gdiff, Array::Zero(64));
  CHECK_THROWS_AS(compare_concentration(f, mism), std::invalid_argument);
}

TEST_CASE("incomparable pair reports a crossing") {
  // tall spike plus a long low shelf vs a uniform bump of the same mass:
  // the spiked profile wins early in s, the bump wins later, so the
  // cumulative difference changes sign (verified against direct summation)
  Grid1D g(30.0, 600);
  const double dx = g.spacing();
  GridFunction spiked(g, [](double x) {
    if (std::abs(x) < 0.2) return 1.25;    // mass 0.5
    if (std::abs(x) < 25.0) return 0.01;   // mass ~0.5 spread wide
    return 0.0;
  });
  GridFunction wide(g, [](double x) { return std::abs(x) < 10.0 ? 0.05 : 0.0; });
  // equalize masses exactly
  GridFunction wide_eq(
      g, Array(wide.values() * (integrate(spiked) / integrate(wide))));

  ConcentrationReport nested = compare_concentration(
      GridFunction(g, Array(wide_eq.values())), spiked, 1e-12);
  CHECK(nested.relation == Relation::Incomparable);

  ConcentrationReport cross = compare_concentration(spiked, wide_eq);
  CHECK(cross.relation == Relation::Incomparable);
  CHECK(cross.crossing_points.size() >= 1);

  StepRearrangement ra = decreasing_rearrangement(spiked);
  StepRearrangement rb = decreasing_rearrangement(wide_eq);
  double acc = 0.0, worst_neg = 0.0, best_pos = 0.0;
  for (int k = 0; k < ra.values.size(); ++k) {
    acc += (rb.values[k] - ra.values[k]) * dx;
    worst_neg = std::min(worst_neg, acc);
    best_pos = std::max(best_pos, acc);
  }
  CHECK(worst_neg == doctest::Approx(cross.min_gap));
  CHECK(best_pos == doctest::Approx(cross.max_gap));
  CHECK(worst_neg < -cross.tolerance);
  CHECK(best_pos > cross.tolerance);
}

TEST_CASE("hardy-littlewood inequality") {
  Grid1D g(2.0, 100);
  GridFunction inc(g, [](double x) { return x + 2.0; });
  GridFunction dec(g, [](double x) { return std::abs(x) < 1.0 ? 1.0 : 0.0; });
  HardyLittlewoodResult r = hardy_littlewood_check(inc, dec);
  CHECK(r.holds);
  CHECK(r.lhs < r.rhs);  // strict for this misaligned pair

  HardyLittlewoodResult eq = hardy_littlewood_check(dec, dec);
  CHECK(eq.holds);
  CHECK(eq.lhs == doctest::Approx(eq.rhs).epsilon(1e-13));

  GridFunction zero(g, Array::Zero(100));
  HardyLittlewoodResult z = hardy_littlewood_check(inc, zero);
  CHECK(z.holds);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
}

TEST_CASE("hardy-littlewood property over random pairs") {
  Grid1D g(2.0, 128);
  CounterRng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    GridFunction f = random_function(g, rng, trial % 3 == 0);
    GridFunction h = random_function(g, rng, trial % 5 == 0);
    HardyLittlewoodResult r = hardy_littlewood_check(f, h);
    CHECK(r.lhs <= r.rhs + 1e-12 * r.rhs);
  }
}

TEST_CASE("convex order check (forward direction)") {
  Grid1D g(2.0, 128);
  CounterRng rng(99);
  auto smooth = [&](const GridFunction& f, int window) {
    // circular moving average: doubly stochastic, hence spreads mass and
    // decreases concentration
    Array out = Array::Zero(f.size());
    const int n = f.size();
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int w = -window; w <= window; ++w)
        acc += f.values()[(i + w + n) % n];
      out[i] = acc / (2 * window + 1);
    }
    return GridFunction(f.grid(), std::move(out));
  };
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    GridFunction raw = random_function(g, rng);
    GridFunction gsharp = spherical_rearrangement(raw);
    GridFunction fsharp =
        spherical_rearrangement(smooth(raw, 1 + rng.uniform_int(0, 6)));
    ConcentrationReport rep = compare_concentration(fsharp, gsharp, 1e-12);
    REQUIRE(ordered_or_equal(rep.relation));
    ++checked;
    CHECK(convex_order_check(fsharp, gsharp, [](double t) { return t; }));
    CHECK(convex_order_check(fsharp, gsharp, [](double t) { return t * t; }));
    for (double c : {0.1, 0.3, 0.5, 0.7, 0.9})
      CHECK(convex_order_check(fsharp, gsharp, [c](double t) {
        return std::max(t - c, 0.0);
      }));
  }
  CHECK(checked >= 30);

  GridFunction a = spherical_rearrangement(random_function(g, rng));
  CHECK(convex_order_check(a, a, [](double t) { return t; }, 1e-12));

  GridFunction not_rearranged(g, [](double x) { return x > 0 ? 1.0 : 0.0; });
  CHECK_THROWS_AS(
      convex_order_check(not_rearranged, a, [](double t) { return t; }),
      std::invalid_argument);
  CHECK_THROWS_AS(convex_order_check(a, a, [](double t) { return t + 1.0; }),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      convex_order_check(a, a, [](double t) { return std::sqrt(t); }),
      std::invalid_argument);
}

TEST_CASE("order consistency: FirstLess implies smaller p-norms") {
  Grid1D g(2.0, 100);
  CounterRng rng(123);
  for (int trial = 0; trial < 60; ++trial) {
    GridFunction a = random_function(g, rng);
    // pairwise averaging spreads mass, so the result is less concentrated
    Array sm = a.values();
    for (int i = 0; i + 1 < sm.size(); i += 2) {
      const double mean = 0.5 * (sm[i] + sm[i + 1]);
      sm[i] = mean;
      sm[i + 1] = mean;
    }
    GridFunction b(g, std::move(sm));
    ConcentrationReport rep = compare_concentration(b, a, 1e-12);
    REQUIRE(ordered_or_equal(rep.relation));
    GridFunction bs = spherical_rearrangement(b);
    GridFunction as = spherical_rearrangement(a);
    for (double p : {1.0, 2.0, kInf})
      CHECK(lp_norm(bs, p) <= lp_norm(as, p) + 1e-10);
  }
}

TEST_CASE("transitivity on pairwise comparable triples") {
  Grid1D g(2.0, 64);
  CounterRng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    GridFunction c = random_function(g, rng);
    Array bvals = c.values();
    for (int i = 0; i + 1 < bvals.size(); i += 2) {
      const double mean = 0.5 * (bvals[i] + bvals[i + 1]);
      bvals[i] = bvals[i + 1] = mean;
    }
    GridFunction b(g, Array(bvals));
    Array avals = bvals;
    for (int i = 1; i + 1 < avals.size(); i += 2) {
      const double mean = 0.5 * (avals[i] + avals[i + 1]);
      avals[i] = avals[i + 1] = mean;
    }
    GridFunction a(g, Array(avals));
    REQUIRE(ordered_or_equal(compare_concentration(a, b, 1e-12).relation));
    REQUIRE(ordered_or_equal(compare_concentration(b, c, 1e-12).relation));
    CHECK(ordered_or_equal(compare_concentration(a, c, 1e-12).relation));
  }
}

TEST_CASE("weighted rearrangement and N = 2 radial machinery") {
  Array values(4), measures(4);
  values << 1.0, 3.0, 2.0, 0.5;
  measures << 0.2, 0.1, 0.4, 0.3;
  StepRearrangement r = weighted_decreasing_rearrangement(values, measures);
  CHECK(r.values[0] == 3.0);
  CHECK(r.measures[0] == 0.1);
  CHECK(r.values[3] == 0.5);
  CHECK(r.total_measure() == doctest::Approx(1.0));
  // mass is preserved: sum v_i mu_i invariant
  CHECK(cumulative_concentration(r, 1.0) ==
        doctest::Approx((values * measures).sum()));

  Grid1D g(2.0, 64);
  GridFunction f(g, [](double x) {
    return std::max(0.0, 1.0 - std::abs(x - 0.5));
  });
  GridFunction f2 = spherical_rearrangement(f, 2);
  const int n = g.n_cells();
  for (int i = 1; i < n / 2; ++i)
    CHECK(f2.values()[n / 2 + i] <= f2.values()[n / 2 + i - 1]);
  CHECK(unit_ball_measure(1) == doctest::Approx(2.0));
  CHECK(unit_ball_measure(2) == doctest::Approx(M_PI));
  CHECK(unit_ball_measure(3) == doctest::Approx(4.0 * M_PI / 3.0));
}
