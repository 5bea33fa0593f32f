#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fracsym/resolvent.hpp"

namespace fracsym {

/// Implicit-time-discretization schedule: t_k = k h, h = T / n_steps.
struct ItdSchedule {
  double T = 1.0;
  int n_steps = 1;
  std::vector<int> snapshot_steps;  // subset of {1..n_steps}; 0 is implicit

  double h() const { return T / n_steps; }
  static ItdSchedule uniform(double T, int n_steps, int snapshot_stride = 1);
  void validate() const;
};

class SourceTerm {
public:
  static SourceTerm zero() { return SourceTerm{}; }
  static SourceTerm of(std::function<double(double, double)> f) {
    SourceTerm s;
    s.fn_ = std::move(f);
    return s;
  }
  bool is_zero() const { return !fn_; }
  double operator()(double x, double t) const { return fn_ ? fn_(x, t) : 0.0; }

private:
  std::function<double(double, double)> fn_;
};

/// Per-step interval averages f_k^{(h)} by 3-point Gauss quadrature in time.
std::vector<GridFunction> discretize_source(const SourceTerm& source,
                                            const ItdSchedule& schedule,
                                            const Grid1D& grid);

struct StepDiagnostics {
  int k = 0;
  double t = 0.0;
  double mass = 0.0, l1 = 0.0, l2 = 0.0, linf = 0.0;
  int newton_iters = 0, clamps = 0;
};

/// Piecewise-constant-in-time chain of resolvent solves; snapshots are the
/// exact ITD iterates at the scheduled steps (step 0 = initial data).
struct Trajectory {
  ItdSchedule schedule;
  std::vector<std::pair<double, GridFunction>> snapshots;
  std::vector<StepDiagnostics> diagnostics;
};

Trajectory evolve_itd(const GridFunction& u0, const SourceTerm& source,
                      const Nonlinearity& nl, const DiscreteOperator& op,
                      const ItdSchedule& schedule, SolverControls controls = {});

/// Runs (u0, f) and (u0#, f# per step); twin runs may execute concurrently
/// (bounded by FRACSYM_THREADS), results are scheduling-independent.
std::pair<Trajectory, Trajectory> evolve_pair_symmetrized(
    const GridFunction& u0, const SourceTerm& source, const Nonlinearity& nl,
    const DiscreteOperator& op, const ItdSchedule& schedule,
    SolverControls controls = {});

struct TimelineEntry {
  double t = 0.0;
  ConcentrationReport report;   // compare_concentration(u1(t), u2(t))
  double lp1_first[3] = {0, 0, 0};   // L1, L2, Linf of the first trajectory
  double lp1_second[3] = {0, 0, 0};  // and of the second
};

/// Per-snapshot concentration comparison of two trajectories on matching
/// schedules; negative tol selects compare_concentration's default.
std::vector<TimelineEntry> concentration_timeline(const Trajectory& a,
                                                  const Trajectory& b,
                                                  double tol = -1.0);

struct SimilarityFit {
  double alpha_fit = 0.0, beta_fit = 0.0;
  double alpha_pred = 0.0, beta_pred = 0.0;
};

/// Fits |u(t)|_inf ~ t^-alpha and the half-mass radius ~ t^beta over the
/// snapshots with t >= t_min (default: last three quarters of the range)
/// and reports the predicted exponents beta = 1/(N(m-1)+sigma), alpha = N beta.
SimilarityFit barenblatt_similarity_check(const Trajectory& traj, double m,
                                          double sigma, double t_min = -1.0);

/// Critical exponent m_c = (N - sigma)/N.
double m_critical(int N, double sigma);

struct FpmeScenarioReport {
  double m = 0.0, sigma = 0.0, T = 0.0;
  int n_steps = 0;
  double detection_threshold = 0.0;
  double mass_narrow0 = 0.0, mass_wide0 = 0.0;
  std::vector<TimelineEntry> timeline;  // compare(wide(t), narrow(t))
  std::optional<double> first_violation_time;
  double mass_narrow_at_violation = 0.0, mass_wide_at_violation = 0.0;
  double max_adverse_gap = 0.0;  // max over snapshots of -min_gap
  std::optional<TailFit> tail_narrow_t1, tail_narrow_t2;  // at the fit times
  double fit_t1 = 0.0, fit_t2 = 0.0;
  Trajectory narrow, wide;
};

struct FpmeScenarioOptions {
  double narrow_radius = 0.5;
  double wide_radius = 4.0;
  int snapshot_stride = 10;
  double fit_window_lo = 20.0, fit_window_hi = 80.0;
  double fit_t1 = 0.05;  // tail fits at fit_t1 and 2*fit_t1 (early-time regime)
  SolverControls controls;
};

/// Two same-mass rearranged data (narrow tall vs wide short indicator,
/// wide less concentrated); reports the first snapshot at which the
/// concentration order fails beyond the detection threshold
/// max(1e-6 * mass, 5 * n_steps * newton_tol * mass).
FpmeScenarioReport fpme_counterexample_scenario(double m, double sigma,
                                                const Grid1D& grid,
                                                const ItdSchedule& schedule,
                                                FpmeScenarioOptions opt = {});

/// Worker-thread cap from FRACSYM_THREADS (>= 1).
int max_worker_threads();

}  // namespace fracsym
