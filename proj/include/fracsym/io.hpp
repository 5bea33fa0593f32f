#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "fracsym/evolution.hpp"
#include "fracsym/rearrange.hpp"

namespace fracsym {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal with at most 17 significant digits.
std::string fmt17(double v);

/// CSV with header `x,value`, one row per cell.
void write_gridfunction_csv(const std::string& path, const GridFunction& f);
GridFunction read_gridfunction_csv(const std::string& path);

/// CSV `s,F_cum,G_cum` of two cumulative concentration curves.
void write_cumulative_csv(const std::string& path, const GridFunction& f,
                          const GridFunction& g);

/// CSV `i,x,row_sum,exterior_correction` (operator debugging dump).
void write_operator_dump_csv(const std::string& path,
                             const DiscreteOperator& op);

/// Directory of snapshot CSVs `t_<k>.csv` plus `diagnostics.csv`.
void write_trajectory(const std::string& dir, const Trajectory& traj,
                      const std::string& prefix = "t");

Json to_json(const ConcentrationReport& rep);
Json to_json(const TailFit& fit);

/// JSON-lines timeline: one ConcentrationReport (plus norms) per snapshot.
void write_timeline_jsonl(const std::string& path,
                          const std::vector<TimelineEntry>& timeline);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const Json& j);

}  // namespace fracsym
