#include "fracsym/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

namespace fracsym {

ItdSchedule ItdSchedule::uniform(double T, int n_steps, int snapshot_stride) {
  ItdSchedule s;
  s.T = T;
  s.n_steps = n_steps;
  if (snapshot_stride < 1) snapshot_stride = 1;
  for (int k = snapshot_stride; k <= n_steps; k += snapshot_stride)
    s.snapshot_steps.push_back(k);
  if (s.snapshot_steps.empty() || s.snapshot_steps.back() != n_steps)
    s.snapshot_steps.push_back(n_steps);
  s.validate();
  return s;
}

void ItdSchedule::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("ItdSchedule: T must be > 0");
  if (n_steps < 1) throw std::invalid_argument("ItdSchedule: n_steps >= 1");
  int prev = 0;
  for (int k : snapshot_steps) {
    if (k <= prev || k > n_steps)
      throw std::invalid_argument("ItdSchedule: snapshot steps must be "
                                  "increasing and within 1..n_steps");
    prev = k;
  }
}

int max_worker_threads() {
  if (const char* env = std::getenv("FRACSYM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<GridFunction> discretize_source(const SourceTerm& source,
                                            const ItdSchedule& schedule,
                                            const Grid1D& grid) {
  schedule.validate();
  const int n = grid.n_cells();
  std::vector<GridFunction> out;
  out.reserve(schedule.n_steps);
  if (source.is_zero()) {
    for (int k = 0; k < schedule.n_steps; ++k)
      out.emplace_back(grid, Array::Zero(n));
    return out;
  }
  const double h = schedule.h();
  // 3-point Gauss-Legendre nodes on (0,1)
  const double gl = 0.5 * std::sqrt(3.0 / 5.0);
  const double nodes[3] = {0.5 - gl, 0.5, 0.5 + gl};
  const double weights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  for (int k = 1; k <= schedule.n_steps; ++k) {
    const double t0 = (k - 1) * h;
    Array vals = Array::Zero(n);
    for (int q = 0; q < 3; ++q) {
      const double tq = t0 + nodes[q] * h;
      for (int i = 0; i < n; ++i)
        vals[i] += weights[q] * source(grid.node(i), tq);
    }
    out.emplace_back(grid, std::move(vals));
  }
  return out;
}

namespace {

StepDiagnostics make_diagnostics(int k, double t, const GridFunction& u,
                                 int iters, int clamps) {
  StepDiagnostics d;
  d.k = k;
  d.t = t;
  d.mass = integrate(u);
  d.l1 = lp_norm(u, 1.0);
  d.l2 = lp_norm(u, 2.0);
  d.linf = lp_norm(u, std::numeric_limits<double>::infinity());
  d.newton_iters = iters;
  d.clamps = clamps;
  return d;
}

}  // namespace

namespace {

Trajectory evolve_chain(const GridFunction& u0,
                        const std::vector<GridFunction>& fk,
                        const Nonlinearity& nl, const DiscreteOperator& op,
                        const ItdSchedule& schedule, SolverControls controls) {
  const double h = schedule.h();
  Trajectory traj;
  traj.schedule = schedule;
  traj.snapshots.emplace_back(0.0, u0);
  traj.diagnostics.push_back(make_diagnostics(0, 0.0, u0, 0, 0));

  GridFunction u = u0;
  std::size_t next_snap = 0;
  for (int k = 1; k <= schedule.n_steps; ++k) {
    Array rhs = u.values() + h * fk[k - 1].values();
    ResolventProblem prob(op, nl, h, GridFunction(u.grid(), std::move(rhs)),
                          controls);
    ResolventSolution sol = [&] {
      try {
        return solve_resolvent(prob);
      } catch (const std::exception& e) {
        throw std::runtime_error("evolve_itd: step " + std::to_string(k) +
                                 " failed: " + e.what());
      }
    }();
    u = sol.u;
    traj.diagnostics.push_back(
        make_diagnostics(k, k * h, u, sol.iterations, sol.clamp_count));
    if (next_snap < schedule.snapshot_steps.size() &&
        schedule.snapshot_steps[next_snap] == k) {
      traj.snapshots.emplace_back(k * h, u);
      ++next_snap;
    }
  }
  return traj;
}

void check_evolution_inputs(const GridFunction& u0, const DiscreteOperator& op,
                            const std::vector<GridFunction>& fk) {
  if (!(u0.grid() == op.grid()))
    throw std::invalid_argument("evolve_itd: u0 not on operator grid");
  if ((u0.values() < 0.0).any())
    throw std::invalid_argument("evolve_itd: u0 must be nonnegative");
  for (const GridFunction& s : fk)
    if ((s.values() < 0.0).any())
      throw std::invalid_argument("evolve_itd: source must be nonnegative");
}

}  // namespace

Trajectory evolve_itd(const GridFunction& u0, const SourceTerm& source,
                      const Nonlinearity& nl, const DiscreteOperator& op,
                      const ItdSchedule& schedule, SolverControls controls) {
  schedule.validate();
  std::vector<GridFunction> fk = discretize_source(source, schedule, u0.grid());
  check_evolution_inputs(u0, op, fk);
  return evolve_chain(u0, fk, nl, op, schedule, controls);
}

std::pair<Trajectory, Trajectory> evolve_pair_symmetrized(
    const GridFunction& u0, const SourceTerm& source, const Nonlinearity& nl,
    const DiscreteOperator& op, const ItdSchedule& schedule,
    SolverControls controls) {
  schedule.validate();
  std::vector<GridFunction> fk = discretize_source(source, schedule, u0.grid());
  check_evolution_inputs(u0, op, fk);

  GridFunction u0s = spherical_rearrangement(u0);
  std::vector<GridFunction> fks;  // per-step symmetrized source
  fks.reserve(fk.size());
  for (const GridFunction& s : fk) fks.push_back(spherical_rearrangement(s));

  if (max_worker_threads() >= 2) {
    auto fut = std::async(std::launch::async, [&] {
      return evolve_chain(u0s, fks, nl, op, schedule, controls);
    });
    Trajectory plain = evolve_chain(u0, fk, nl, op, schedule, controls);
    return {std::move(plain), fut.get()};
  }
  Trajectory plain = evolve_chain(u0, fk, nl, op, schedule, controls);
  return {std::move(plain), evolve_chain(u0s, fks, nl, op, schedule, controls)};
}

std::vector<TimelineEntry> concentration_timeline(const Trajectory& a,
                                                  const Trajectory& b,
                                                  double tol) {
  if (a.snapshots.size() != b.snapshots.size())
    throw std::invalid_argument("concentration_timeline: schedule mismatch");
  std::vector<TimelineEntry> out;
  out.reserve(a.snapshots.size());
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    if (a.snapshots[k].first != b.snapshots[k].first)
      throw std::invalid_argument("concentration_timeline: snapshot times differ");
    TimelineEntry e;
    e.t = a.snapshots[k].first;
    e.report =
        compare_concentration(a.snapshots[k].second, b.snapshots[k].second, tol);
    const GridFunction& ua = a.snapshots[k].second;
    const GridFunction& ub = b.snapshots[k].second;
    e.lp1_first[0] = lp_norm(ua, 1.0);
    e.lp1_first[1] = lp_norm(ua, 2.0);
    e.lp1_first[2] = lp_norm(ua, inf);
    e.lp1_second[0] = lp_norm(ub, 1.0);
    e.lp1_second[1] = lp_norm(ub, 2.0);
    e.lp1_second[2] = lp_norm(ub, inf);
    out.push_back(std::move(e));
  }
  return out;
}

double m_critical(int N, double sigma) {
  if (N < 1) throw std::invalid_argument("m_critical: N >= 1");
  return (N - sigma) / N;
}

namespace {

double half_mass_radius(const GridFunction& u) {
  const Grid1D& g = u.grid();
  const int n = g.n_cells();
  const double half = 0.5 * u.values().sum() * g.spacing();
  // accumulate by increasing radius (center-out order)
  std::vector<std::pair<double, double>> shells;  // (radius, cell mass)
  for (int i = 0; i < n; ++i)
    shells.emplace_back(std::abs(g.node(i)), u.values()[i] * g.spacing());
  std::sort(shells.begin(), shells.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < shells.size(); ++i) {
    acc += shells[i].second;
    if (acc >= half) {
      // linear interpolation within the final shell
      const double prev = acc - shells[i].second;
      const double frac =
          shells[i].second > 0.0 ? (half - prev) / shells[i].second : 1.0;
      const double r_lo = i > 0 ? shells[i - 1].first : 0.0;
      return r_lo + frac * (shells[i].first - r_lo);
    }
  }
  return shells.empty() ? 0.0 : shells.back().first;
}

}  // namespace

SimilarityFit barenblatt_similarity_check(const Trajectory& traj, double m,
                                          double sigma, double t_min) {
  const int N = 1;
  if (!(m > m_critical(N, sigma)))
    throw std::invalid_argument("barenblatt_similarity_check: need m > m_c");
  SimilarityFit fit;
  fit.beta_pred = 1.0 / (N * (m - 1.0) + sigma);
  fit.alpha_pred = N * fit.beta_pred;

  std::vector<double> lt, la, lr;
  double t_max = 0.0;
  for (const auto& [t, u] : traj.snapshots) t_max = std::max(t_max, t);
  if (t_min < 0.0) t_min = 0.25 * t_max;
  for (const auto& [t, u] : traj.snapshots) {
    if (t < t_min || t <= 0.0) continue;
    const double linf = u.values().abs().maxCoeff();
    const double rh = half_mass_radius(u);
    if (!(linf > 0.0) || !(rh > 0.0)) continue;
    lt.push_back(std::log(t));
    la.push_back(std::log(linf));
    lr.push_back(std::log(rh));
  }
  if (lt.size() < 4)
    throw std::invalid_argument(
        "barenblatt_similarity_check: insufficient late-time snapshots");
  auto slope = [](const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  fit.alpha_fit = -slope(lt, la);
  fit.beta_fit = slope(lt, lr);
  return fit;
}

FpmeScenarioReport fpme_counterexample_scenario(double m, double sigma,
                                                const Grid1D& grid,
                                                const ItdSchedule& schedule,
                                                FpmeScenarioOptions opt) {
  if (!(m > 0.0))
    throw std::invalid_argument("fpme_counterexample_scenario: m > 0");
  FpmeScenarioReport rep;
  rep.m = m;
  rep.sigma = sigma;
  rep.T = schedule.T;
  rep.n_steps = schedule.n_steps;
  rep.fit_t1 = opt.fit_t1;
  rep.fit_t2 = 2.0 * opt.fit_t1;

  auto unit_indicator = [&](double radius) {
    GridFunction raw(grid, [radius](double x) {
      return std::abs(x) < radius ? 1.0 : 0.0;
    });
    const double mass = integrate(raw);
    return GridFunction(grid, Array(raw.values() / mass));
  };
  GridFunction narrow = unit_indicator(opt.narrow_radius);
  GridFunction wide = unit_indicator(opt.wide_radius);
  rep.mass_narrow0 = integrate(narrow);
  rep.mass_wide0 = integrate(wide);

  DiscreteOperator op = assemble(
      OperatorSpec(sigma, OperatorMethod::SingularIntegralTruncated, grid));
  Nonlinearity nl = Nonlinearity::power(m);

  Trajectory tn, tw;
  if (max_worker_threads() >= 2) {
    auto fut = std::async(std::launch::async, [&] {
      return evolve_itd(wide, SourceTerm::zero(), nl, op, schedule,
                        opt.controls);
    });
    tn = evolve_itd(narrow, SourceTerm::zero(), nl, op, schedule, opt.controls);
    tw = fut.get();
  } else {
    tn = evolve_itd(narrow, SourceTerm::zero(), nl, op, schedule, opt.controls);
    tw = evolve_itd(wide, SourceTerm::zero(), nl, op, schedule, opt.controls);
  }

  rep.detection_threshold =
      std::max(1e-6 * rep.mass_narrow0,
               5.0 * schedule.n_steps * opt.controls.newton_tol *
                   rep.mass_narrow0);
  // the theorem side would be wide < narrow at all times; a violation is a
  // cumulative crossing beyond the threshold
  rep.timeline = concentration_timeline(tw, tn, rep.detection_threshold);
  for (std::size_t k = 1; k < rep.timeline.size(); ++k) {
    const TimelineEntry& e = rep.timeline[k];
    rep.max_adverse_gap = std::max(rep.max_adverse_gap, -e.report.min_gap);
    const bool violated = e.report.relation != Relation::FirstLess &&
                          e.report.relation != Relation::Equal;
    if (violated && !rep.first_violation_time) {
      rep.first_violation_time = e.t;
      rep.mass_wide_at_violation = e.lp1_first[0];
      rep.mass_narrow_at_violation = e.lp1_second[0];
    }
  }

  // tail fits on the compact (narrow) run at the two configured times
  auto fit_at = [&](double t) -> std::optional<TailFit> {
    for (const auto& [tk, u] : tn.snapshots) {
      if (std::abs(tk - t) <= 0.5 * schedule.h()) {
        try {
          return tail_fit(u, opt.fit_window_lo, opt.fit_window_hi);
        } catch (const std::exception&) {
          return std::nullopt;
        }
      }
    }
    return std::nullopt;
  };
  rep.tail_narrow_t1 = fit_at(rep.fit_t1);
  rep.tail_narrow_t2 = fit_at(rep.fit_t2);
  rep.narrow = std::move(tn);
  rep.wide = std::move(tw);
  return rep;
}

}  // namespace fracsym
