#include "fracsym/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fracsym {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {
std::ofstream open_out(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);  // LF endings on every platform
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}
}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_out(path);
  out << content;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_gridfunction_csv(const std::string& path, const GridFunction& f) {
  std::ofstream out = open_out(path);
  out << "x,value\n";
  for (int i = 0; i < f.size(); ++i)
    out << fmt17(f.grid().node(i)) << "," << fmt17(f.values()[i]) << "\n";
}

GridFunction read_gridfunction_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty CSV: " + path);
  std::vector<double> xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed CSV row in " + path);
    xs.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  const int n = static_cast<int>(xs.size());
  if (n < 2) throw std::runtime_error("too few rows in " + path);
  const double dx = xs[1] - xs[0];
  const double half_width = 0.5 * dx * n;
  Grid1D grid(half_width, n);
  Array vals(n);
  for (int i = 0; i < n; ++i) vals[i] = vs[i];
  return GridFunction(grid, std::move(vals));
}

void write_cumulative_csv(const std::string& path, const GridFunction& f,
                          const GridFunction& g) {
  require_same_grid(f, g, "write_cumulative_csv");
  StepRearrangement rf = decreasing_rearrangement(f);
  StepRearrangement rg = decreasing_rearrangement(g);
  std::ofstream out = open_out(path);
  out << "s,F_cum,G_cum\n";
  const double dx = f.spacing();
  long double af = 0.0L, ag = 0.0L;
  out << "0,0,0\n";
  for (int k = 0; k < f.size(); ++k) {
    af += static_cast<long double>(rf.values[k]) * dx;
    ag += static_cast<long double>(rg.values[k]) * dx;
    out << fmt17((k + 1) * dx) << "," << fmt17(static_cast<double>(af)) << ","
        << fmt17(static_cast<double>(ag)) << "\n";
  }
}

void write_operator_dump_csv(const std::string& path,
                             const DiscreteOperator& op) {
  std::ofstream out = open_out(path);
  out << "i,x,row_sum,exterior_correction\n";
  Array rs = op.row_sums();
  const Array& e = op.exterior_correction();
  for (int i = 0; i < op.grid().n_cells(); ++i)
    out << i << "," << fmt17(op.grid().node(i)) << "," << fmt17(rs[i]) << ","
        << fmt17(e[i]) << "\n";
}

void write_trajectory(const std::string& dir, const Trajectory& traj,
                      const std::string& prefix) {
  std::filesystem::create_directories(dir);
  for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
    const int k = s == 0 ? 0 : traj.schedule.snapshot_steps[s - 1];
    write_gridfunction_csv(dir + "/" + prefix + "_" + std::to_string(k) + ".csv",
                           traj.snapshots[s].second);
  }
  std::ofstream out = open_out(dir + "/diagnostics.csv");
  out << "k,t,mass,l1,l2,linf,newton_iters,clamps\n";
  for (const StepDiagnostics& d : traj.diagnostics)
    out << d.k << "," << fmt17(d.t) << "," << fmt17(d.mass) << ","
        << fmt17(d.l1) << "," << fmt17(d.l2) << "," << fmt17(d.linf) << ","
        << d.newton_iters << "," << d.clamps << "\n";
}

Json to_json(const ConcentrationReport& rep) {
  Json j;
  j["relation"] = to_string(rep.relation);
  j["max_gap"] = rep.max_gap;
  j["min_gap"] = rep.min_gap;
  j["crossings"] = rep.crossing_points;
  j["tolerance"] = rep.tolerance;
  j["symmetrized_both"] = rep.symmetrized_both;
  return j;
}

Json to_json(const TailFit& fit) {
  Json j;
  j["slope"] = fit.slope;
  j["prefactor"] = fit.prefactor;
  j["r_squared"] = fit.r_squared;
  return j;
}

void write_timeline_jsonl(const std::string& path,
                          const std::vector<TimelineEntry>& timeline) {
  std::ofstream out = open_out(path);
  for (const TimelineEntry& e : timeline) {
    Json j;
    j["t"] = e.t;
    j["report"] = to_json(e.report);
    j["lp_first"] = {e.lp1_first[0], e.lp1_first[1], e.lp1_first[2]};
    j["lp_second"] = {e.lp1_second[0], e.lp1_second[1], e.lp1_second[2]};
    out << j.dump() << "\n";
  }
}

}  // namespace fracsym
