#include <algorithm>
#include <filesystem>
#include <sstream>

#include "fracsym/cli.hpp"

namespace fracsym::cli {

namespace fs = std::filesystem;

namespace {

// collect t_<k>.csv files in a directory, sorted by k
std::vector<std::pair<int, std::string>> snapshot_files(const fs::path& dir) {
  std::vector<std::pair<int, std::string>> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("t_", 0) == 0 && name.size() > 6 &&
        name.substr(name.size() - 4) == ".csv") {
      try {
        out.emplace_back(std::stoi(name.substr(2, name.size() - 6)),
                         entry.path().string());
      } catch (const std::exception&) {
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// pick up to four evenly spaced entries, always including the last
template <class T>
std::vector<T> pick_four(const std::vector<T>& v) {
  if (v.size() <= 4) return v;
  std::vector<T> out;
  for (int q = 1; q <= 4; ++q)
    out.push_back(v[(v.size() - 1) * q / 4]);
  return out;
}

}  // namespace

void emit_plot_script(const std::string& run_dir) {
  const fs::path root(run_dir);
  if (!fs::is_directory(root))
    throw std::runtime_error("emit_plot_script: no such directory: " + run_dir);

  auto narrow = snapshot_files(root / "narrow");
  auto wide = snapshot_files(root / "wide");
  auto plain = snapshot_files(root / "plain");
  auto symm = snapshot_files(root / "symmetrized");
  auto single = snapshot_files(root / "traj");
  if (single.empty()) single = snapshot_files(root);

  std::ostringstream gp;
  gp << "# gnuplot script generated by fracsym\n"
     << "set datafile separator ','\n"
     << "set key top right\n";

  auto rel = [&](const std::string& p) {
    return fs::path(p).lexically_relative(root).string();
  };

  const bool paired = !narrow.empty() && !wide.empty();
  const bool twin = !plain.empty() && !symm.empty();
  if (paired || twin) {
    auto& a = paired ? wide : plain;
    auto& b = paired ? narrow : symm;
    const char* name_a = paired ? "wide" : "plain";
    const char* name_b = paired ? "narrow" : "symmetrized";
    std::vector<std::pair<int, std::string>> pa, pb;
    for (const auto& [k, path] : a) {
      auto it = std::find_if(b.begin(), b.end(),
                             [k = k](const auto& e) { return e.first == k; });
      if (it != b.end()) {
        pa.emplace_back(k, path);
        pb.emplace_back(k, it->second);
      }
    }
    if (pa.empty())
      throw std::runtime_error("emit_plot_script: no matching snapshot pairs");
    pa = pick_four(pa);
    pb = pick_four(pb);
    gp << "set terminal pngcairo size 1600,800\n"
       << "set output 'panels.png'\n"
       << "set multiplot layout 2," << pa.size() << "\n";
    for (std::size_t i = 0; i < pa.size(); ++i) {
      gp << "set title 'step " << pa[i].first << "'\n"
         << "set logscale y\nset yrange [1e-12:*]\n"
         << "plot '" << rel(pa[i].second) << "' using 1:2 with lines title '"
         << name_a << "', '" << rel(pb[i].second)
         << "' using 1:2 with lines title '" << name_b << "'\n";
    }
    for (std::size_t i = 0; i < pa.size(); ++i) {
      const fs::path cum = root / ("cum_" + std::to_string(pa[i].first) + ".csv");
      gp << "unset logscale y\nset yrange [*:*]\n"
         << "set title 'cumulative mass, step " << pa[i].first << "'\n";
      if (fs::exists(cum))
        gp << "plot '" << rel(cum.string()) << "' using 1:2 with lines title '"
           << name_a << "', '' using 1:3 with lines title '" << name_b << "'\n";
      else
        gp << "plot '" << rel(pa[i].second)
           << "' using 1:2 smooth cumulative with lines title '" << name_a
           << "', '" << rel(pb[i].second)
           << "' using 1:2 smooth cumulative with lines title '" << name_b
           << "'\n";
    }
    gp << "unset multiplot\n";
  } else if (!single.empty()) {
    auto picks = pick_four(single);
    gp << "set terminal pngcairo size 900,600\n"
       << "set output 'profiles.png'\n"
       << "set title 'evolution snapshots'\n"
       << "plot ";
    for (std::size_t i = 0; i < picks.size(); ++i) {
      if (i) gp << ", ";
      gp << "'" << rel(picks[i].second) << "' using 1:2 with lines title 'step "
         << picks[i].first << "'";
    }
    gp << "\n";
  } else {
    throw std::runtime_error(
        "emit_plot_script: no snapshot CSVs found under " + run_dir);
  }
  write_text_file((root / "plot.gp").string(), gp.str());
}

}  // namespace fracsym::cli
