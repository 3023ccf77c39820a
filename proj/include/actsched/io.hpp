/*
 Copyright 2026 The actsched Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef ACTSCHED_IO_HPP
#define ACTSCHED_IO_HPP

// Problem files, reports, schedules and plot series.
//
//   problem.json   {"A": [[..]], "B": [[..]], "T": 2, "alpha": 2,
//                   "options": {"K": 4096, "tie_tol": 1e-9,
//                               "flat_tol": 1e-3, "drop_zero_columns": false}}
//   schedule.json  {"horizon": T, "actuators": {"1": [[s, e], ...], ...}}
//   profile.csv    t,F
//   rearranged.csv x,Fstar

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "actsched/error.hpp"
#include "actsched/gramian.hpp"
#include "actsched/rearrange.hpp"
#include "actsched/scheduler.hpp"

namespace actsched {

using json = nlohmann::json;

struct ProblemFile {
  LtiSystem system;
  bool drop_zero_columns = false;
  // 1-based column of B behind every actuator of `system`.
  std::vector<int> source_columns;
};

namespace detail {

inline Matrix matrix_from_json(const json& j, const char* name) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(name) + " must be a non-empty array of rows");
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(name) + " rows must be non-empty arrays");
  }
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw Error(ErrorKind::kInvalidArgument,
                  std::string(name) + " is not rectangular");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw Error(ErrorKind::kInvalidArgument,
                    std::string(name) + " has a non-numeric entry");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

inline double number_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string("missing numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidArgument, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kInvalidArgument, path + ": " + e.what());
  }
}

}  // namespace detail

/// Parses a problem. Validation (including zero columns and alpha range)
/// happens after optional zero-column dropping.
inline ProblemFile parse_problem(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorKind::kInvalidArgument, "problem must be a JSON object");
  }
  ProblemFile pf;
  auto& sys = pf.system;
  if (!j.contains("A") || !j.contains("B")) {
    throw Error(ErrorKind::kInvalidArgument, "problem needs both A and B");
  }
  sys.a = detail::matrix_from_json(j["A"], "A");
  sys.b = detail::matrix_from_json(j["B"], "B");
  sys.horizon = detail::number_field(j, "T");
  sys.budget = detail::number_field(j, "alpha");
  if (j.contains("options")) {
    const json& o = j["options"];
    if (!o.is_object()) throw Error(ErrorKind::kInvalidArgument, "options must be an object");
    if (o.contains("K")) {
      if (!o["K"].is_number_integer()) {
        throw Error(ErrorKind::kInvalidArgument, "options.K must be an integer");
      }
      sys.cells = o["K"].get<int>();
    }
    if (o.contains("tie_tol")) sys.tie_tol = detail::number_field(o, "tie_tol");
    if (o.contains("flat_tol")) sys.flat_tol = detail::number_field(o, "flat_tol");
    if (o.contains("drop_zero_columns")) {
      if (!o["drop_zero_columns"].is_boolean()) {
        throw Error(ErrorKind::kInvalidArgument, "options.drop_zero_columns must be a boolean");
      }
      pf.drop_zero_columns = o["drop_zero_columns"].get<bool>();
    }
  }
  return pf;
}

/// Applies zero-column dropping if requested and validates the result.
inline void finalize(ProblemFile& pf) {
  if (pf.drop_zero_columns) {
    if (pf.system.b.rows() != pf.system.a.rows()) validate(pf.system);
    auto [reduced, kept] = drop_zero_columns(pf.system);
    if (kept.empty()) {
      throw Error(ErrorKind::kZeroColumn, "every column of B is zero");
    }
    pf.system = std::move(reduced);
    pf.source_columns = std::move(kept);
  } else {
    pf.source_columns.clear();
    for (int i = 1; i <= pf.system.actuators(); ++i) pf.source_columns.push_back(i);
  }
  validate(pf.system);
}

inline ProblemFile load_problem(const std::string& path) {
  return parse_problem(detail::read_json_file(path));
}

inline json schedule_to_json(const Schedule& s, double horizon,
                             const std::vector<int>& source_columns = {}) {
  json out;
  out["horizon"] = horizon;
  json acts = json::object();
  for (int i = 0; i < s.size(); ++i) {
    json list = json::array();
    for (const auto& iv : s.actuators[static_cast<std::size_t>(i)]) {
      list.push_back(json::array({iv.start, iv.end}));
    }
    acts[std::to_string(i + 1)] = std::move(list);
  }
  out["actuators"] = std::move(acts);
  if (!source_columns.empty()) out["source_columns"] = source_columns;
  return out;
}

/// Reads a schedule for an m-actuator system. Missing actuators are empty.
inline Schedule schedule_from_json(const json& j, int m) {
  if (!j.is_object() || !j.contains("actuators") || !j["actuators"].is_object()) {
    throw Error(ErrorKind::kInvalidArgument, "schedule needs an 'actuators' object");
  }
  Schedule s(m);
  for (const auto& [key, list] : j["actuators"].items()) {
    int idx = 0;
    try {
      idx = std::stoi(key);
    } catch (...) {
      throw Error(ErrorKind::kInvalidArgument, "bad actuator key '" + key + "'");
    }
    if (idx < 1 || idx > m) {
      throw Error(ErrorKind::kInvalidArgument, "actuator " + key + " out of range");
    }
    if (!list.is_array()) throw Error(ErrorKind::kInvalidArgument, "intervals must be an array");
    for (const auto& iv : list) {
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
        throw Error(ErrorKind::kInvalidArgument, "interval must be [start, end]");
      }
      s.actuators[static_cast<std::size_t>(idx - 1)].push_back(
          {iv[0].get<double>(), iv[1].get<double>()});
    }
  }
  return s;
}

inline json report_to_json(const SolutionReport& rep, const LtiSystem& sys) {
  json out;
  out["case"] = std::string(to_string(rep.shape));
  out["threshold"] = rep.threshold;
  out["optimal_cost"] = rep.optimal_cost;
  out["unique"] = rep.unique;
  out["alpha"] = sys.budget;
  out["T"] = sys.horizon;
  out["n"] = sys.states();
  out["m"] = sys.actuators();
  out["K"] = sys.cells;
  out["budget_used"] = budget(rep.canonical);
  out["level_measure_gt"] = rep.level_gt;
  out["level_measure_ge"] = rep.level_ge;
  if (rep.flat_dof) {
    json dof;
    dof["level_sets"] = rep.flat_dof->level_sets;
    dof["free_measure"] = rep.flat_dof->free_measure;
    out["flat_dof"] = std::move(dof);
  } else {
    out["flat_dof"] = nullptr;
  }
  if (rep.flat_interval) {
    out["flat_interval"] = {{"b_left", rep.flat_interval->b_left},
                            {"b_right", rep.flat_interval->b_right},
                            {"value", rep.flat_interval->value}};
  } else {
    out["flat_interval"] = nullptr;
  }
  return out;
}

/// F on [0, mT], one row per node; each junction appears twice so the jump
/// between actuators is visible.
inline void write_profile_csv(std::ostream& os, const SampledProfile& p) {
  os << "t,F\n";
  const double h = p.cell_measure();
  double offset = p.domain_start;
  for (const auto& piece : p.pieces) {
    const int cells = static_cast<int>(piece.size()) - 1;
    for (int k = 0; k <= cells; ++k) {
      const double t = offset + h * k;
      os << detail::format_real(t) << ',' << detail::format_real(piece[static_cast<std::size_t>(k)])
         << '\n';
    }
    offset += h * cells;
  }
}

/// F* as a step function: the start and end of every step.
inline void write_rearranged_csv(std::ostream& os, const RearrangedProfile& r) {
  os << "x,Fstar\n";
  const auto& m = r.cumulative_measure();
  for (std::size_t i = 0; i < r.cells().size(); ++i) {
    const std::string v = detail::format_real(r.cells()[i].value);
    os << detail::format_real(m[i]) << ',' << v << '\n';
    os << detail::format_real(m[i + 1]) << ',' << v << '\n';
  }
}

/// Reads (x, Fstar) rows written by write_rearranged_csv.
inline std::vector<std::pair<double, double>> read_xy_csv(std::istream& is) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "malformed CSV row: " + line);
    }
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return rows;
}

/// Standalone function samples for the `rearrange` command: either JSON
/// {"domain": [a, b], "values": [...]} or a CSV "t,f" on a uniform grid.
inline SampledProfile load_sampled_function(const std::string& path) {
  const bool is_csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  if (!is_csv) {
    const json j = detail::read_json_file(path);
    if (!j.contains("domain") || !j["domain"].is_array() || j["domain"].size() != 2) {
      throw Error(ErrorKind::kInvalidArgument, "function file needs domain [a, b]");
    }
    if (!j.contains("values") || !j["values"].is_array()) {
      throw Error(ErrorKind::kInvalidArgument, "function file needs a values array");
    }
    auto p = SampledProfile::from_values(j["domain"][0].get<double>(),
                                         j["domain"][1].get<double>(),
                                         j["values"].get<std::vector<double>>());
    validate(p);
    return p;
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kInvalidArgument, "cannot open " + path);
  std::vector<std::pair<double, double>> rows;
  try {
    rows = read_xy_csv(in);
  } catch (const std::invalid_argument&) {
    throw Error(ErrorKind::kInvalidArgument, path + ": non-numeric CSV entry");
  }
  if (rows.size() < 2) throw Error(ErrorKind::kInvalidArgument, "need at least two samples");
  const double h = (rows.back().first - rows.front().first) / static_cast<double>(rows.size() - 1);
  std::vector<double> values;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double expected = rows.front().first + h * static_cast<double>(k);
    if (std::abs(rows[k].first - expected) > 1e-9 * std::max(1.0, std::abs(h) * rows.size())) {
      throw Error(ErrorKind::kInvalidArgument, "CSV samples are not uniformly spaced");
    }
    values.push_back(rows[k].second);
  }
  auto p = SampledProfile::from_values(rows.front().first, rows.back().first, std::move(values));
  validate(p);
  return p;
}

}  // namespace actsched

#endif  // ACTSCHED_IO_HPP
