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
// actsched: optimal actuator schedules that maximize Tr(W_V) under a total
// actuation-time budget.
//
//   actsched solve problem.json -o out/
//   actsched rearrange samples.json -o out/
//   actsched oracle problem.json -o out/
//   actsched verify [problem.json] [--schedule schedule.json] --seed 1 --trials 100
//
// Exit codes: 0 success, 1 numeric or property failure, 2 validation failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "actsched/actsched.hpp"
#include "actsched/io.hpp"
#include "actsched/random.hpp"

namespace fs = std::filesystem;
using namespace actsched;

namespace {

constexpr int kExitNumeric = 1;
constexpr int kExitValidation = 2;

struct CommonOptions {
  std::optional<int> cells;
  std::optional<double> tie_tol;
  std::optional<double> flat_tol;
  bool drop_zero_columns = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--k", opt.cells, "Grid cells per actuator (default 4096)");
  cmd->add_option("--tie-tol", opt.tie_tol, "Relative tolerance for equal values");
  cmd->add_option("--flat-tol", opt.flat_tol, "Measure tolerance for flat detection");
  cmd->add_flag("--drop-zero-columns", opt.drop_zero_columns,
                "Delete zero columns of B instead of rejecting them");
  cmd->add_option("--threads", opt.threads, "Threads for profile computation")
      ->check(CLI::PositiveNumber);
}

ProblemFile load(const std::string& path, const CommonOptions& opt) {
  ProblemFile pf = load_problem(path);
  if (opt.cells) pf.system.cells = *opt.cells;
  if (opt.tie_tol) pf.system.tie_tol = *opt.tie_tol;
  if (opt.flat_tol) pf.system.flat_tol = *opt.flat_tol;
  if (opt.drop_zero_columns) pf.drop_zero_columns = true;
  finalize(pf);
  return pf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path.string());
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_solve(const std::string& input, const std::string& outdir, const CommonOptions& opt) {
  const ProblemFile pf = load(input, opt);
  const SolverContext ctx(pf.system, opt.threads);
  const SolutionReport rep = solve(ctx);

  fs::create_directories(outdir);
  json report = report_to_json(rep, pf.system);
  report["canonical_cost"] = trace_cost(ctx.profiles, rep.canonical);
  report["source_columns"] = pf.source_columns;
  write_text(fs::path(outdir) / "report.json", dump(report));
  write_text(fs::path(outdir) / "schedule.json",
             dump(schedule_to_json(rep.canonical, pf.system.horizon, pf.source_columns)));
  {
    std::ostringstream os;
    write_profile_csv(os, ctx.concat);
    write_text(fs::path(outdir) / "profile.csv", os.str());
  }
  {
    std::ostringstream os;
    write_rearranged_csv(os, ctx.rearranged);
    write_text(fs::path(outdir) / "rearranged.csv", os.str());
  }
  std::printf("case=%s threshold=%.17g optimal_cost=%.17g unique=%s\n",
              std::string(to_string(rep.shape)).c_str(), rep.threshold, rep.optimal_cost,
              rep.unique ? "true" : "false");
  return 0;
}

int cmd_rearrange(const std::string& input, const std::string& outdir, const CommonOptions& opt) {
  const SampledProfile p = load_sampled_function(input);
  const auto r = rearrange(p, opt.tie_tol.value_or(1e-9));
  fs::create_directories(outdir);
  std::ostringstream os;
  write_rearranged_csv(os, r);
  write_text(fs::path(outdir) / "rearranged.csv", os.str());
  std::printf("steps=%zu measure=%.17g integral=%.17g\n", r.cells().size(), r.source_measure(),
              r.cumulative_integral().back());
  return 0;
}

int cmd_oracle(const std::string& input, const std::string& outdir, const CommonOptions& opt) {
  const ProblemFile pf = load(input, opt);
  const CellSelection sel = knapsack_solve(pf.system);
  json out;
  out["objective"] = sel.objective;
  out["total_measure"] = sel.total_measure;
  out["fractional_cells"] = sel.fractional_cells;
  out["cutoff_value"] = sel.cutoff_value;
  out["cell_measure"] = sel.cell_measure;
  json per = json::array();
  for (int i = 0; i < sel.actuators; ++i) {
    double measure = 0.0;
    for (int k = 0; k < sel.cells; ++k) measure += sel.weight(i, k) * sel.cell_measure;
    per.push_back(measure);
  }
  out["selected_measure"] = std::move(per);
  fs::create_directories(outdir);
  write_text(fs::path(outdir) / "oracle.json", dump(out));
  std::printf("objective=%.17g total_measure=%.17g\n", sel.objective, sel.total_measure);
  return 0;
}

struct Check {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

void add_system_checks(std::vector<Check>& checks, const std::string& tag,
                       const LtiSystem& sys) {
  const SolverContext ctx(sys);
  const SolutionReport rep = solve(ctx);
  const OracleComparison cmp = compare(sys, rep);
  const double spent = budget(rep.canonical);
  const double cost = trace_cost(ctx.profiles, rep.canonical);
  const double flat_tol = sys.flat_tolerance();
  const double identity = std::abs(cost - rep.optimal_cost) / std::max(rep.optimal_cost, 1e-300);
  checks.push_back({tag + " oracle residual", cmp.residual, 1e-4, cmp.residual <= 1e-4});
  checks.push_back({tag + " oracle cell agreement", cmp.symmetric_difference,
                    cmp.allowed_difference, cmp.sets_agree});
  checks.push_back({tag + " budget", std::abs(spent - sys.budget), flat_tol,
                    std::abs(spent - sys.budget) <= flat_tol});
  checks.push_back({tag + " cost identity", identity, 1e-6, identity <= 1e-6});
}

int cmd_verify(const std::optional<std::string>& input,
               const std::optional<std::string>& schedule_path, unsigned seed, int trials,
               const CommonOptions& opt) {
  std::vector<Check> checks;

  Rng rng(seed);
  double l1 = 0.0, level = 0.0, hl = 0.0;
  int mono = 0, bounded = 0;
  for (int t = 0; t < trials; ++t) {
    const auto [f, g] = random_profile_pair(rng, 1024);
    const auto rep = check_propositions(f, g, opt.tie_tol.value_or(1e-9));
    l1 = std::max({l1, rep.l1_residual_f, rep.l1_residual_g});
    level = std::max(level, rep.level_set_discrepancy);
    hl = std::max(hl, rep.hardy_littlewood_gap / std::max(1.0, rep.hardy_littlewood_rhs));
    mono += rep.monotonicity_violations;
    bounded += rep.bounded_violations;
  }
  checks.push_back({"L1 conservation", l1, 1e-12, l1 <= 1e-12});
  checks.push_back({"level-set measures", level, 0.0, level == 0.0});
  checks.push_back({"Hardy-Littlewood", hl, 1e-9, hl <= 1e-9});
  checks.push_back({"monotonicity", static_cast<double>(mono), 0.0, mono == 0});
  checks.push_back({"bounded by one", static_cast<double>(bounded), 0.0, bounded == 0});

  RandomSystemOptions sys_opt;
  sys_opt.cells = opt.cells.value_or(4096);
  double worst_residual = 0.0, worst_identity = 0.0;
  int disagreements = 0, over_budget = 0;
  for (int t = 0; t < trials; ++t) {
    LtiSystem sys = random_system(rng, sys_opt);
    if (opt.tie_tol) sys.tie_tol = *opt.tie_tol;
    if (opt.flat_tol) sys.flat_tol = *opt.flat_tol;
    std::vector<Check> local;
    add_system_checks(local, "random", sys);
    worst_residual = std::max(worst_residual, local[0].value);
    disagreements += local[1].pass ? 0 : 1;
    over_budget += local[2].pass ? 0 : 1;
    worst_identity = std::max(worst_identity, local[3].value);
  }
  if (trials > 0) {
    checks.push_back({"random systems oracle residual", worst_residual, 1e-4,
                      worst_residual <= 1e-4});
    checks.push_back({"random systems cell agreement", static_cast<double>(disagreements), 0.0,
                      disagreements == 0});
    checks.push_back({"random systems budget", static_cast<double>(over_budget), 0.0,
                      over_budget == 0});
    checks.push_back({"random systems cost identity", worst_identity, 1e-6,
                      worst_identity <= 1e-6});
  }

  if (input) {
    const ProblemFile pf = load(*input, opt);
    add_system_checks(checks, "problem", pf.system);
    if (schedule_path) {
      const double slack = pf.system.tie_tol * pf.system.total_measure();
      try {
        const Schedule s =
            schedule_from_json(detail::read_json_file(*schedule_path), pf.system.actuators());
        validate(s, pf.system.horizon);
        const double spent = budget(s);
        checks.push_back({"schedule feasibility violation", spent - pf.system.budget, slack,
                          spent <= pf.system.budget + slack});
      } catch (const Error& e) {
        std::fprintf(stderr, "schedule: %s\n", e.what());
        checks.push_back({"schedule feasibility violation",
                          std::numeric_limits<double>::quiet_NaN(), slack, false});
      }
    }
  } else if (schedule_path) {
    throw Error(ErrorKind::kInvalidArgument, "--schedule needs a problem file");
  }

  std::printf("%-36s %-24s %-12s %s\n", "property", "value", "tolerance", "status");
  const Check* first_failure = nullptr;
  for (const auto& c : checks) {
    std::printf("%-36s %-24.17g %-12.3g %s\n", c.name.c_str(), c.value, c.tolerance,
                c.pass ? "PASS" : "FAIL");
    if (!c.pass && first_failure == nullptr) first_failure = &c;
  }
  if (first_failure != nullptr) {
    std::fprintf(stderr, "verify failed: %s\n", first_failure->name.c_str());
    return kExitNumeric;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal time-varying actuator schedules via decreasing rearrangement"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string input;
  std::string outdir = ".";
  std::optional<std::string> verify_input;
  std::optional<std::string> schedule_path;
  unsigned seed = 1;
  int trials = 100;

  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
  solve_cmd->add_option("input", input, "Problem JSON")->required();
  solve_cmd->add_option("-o,--output", outdir, "Output directory");
  add_common(solve_cmd, common);

  auto* rearrange_cmd =
      app.add_subcommand("rearrange", "Decreasing rearrangement of sampled function");
  rearrange_cmd->add_option("input", input, "Samples (.json or .csv)")->required();
  rearrange_cmd->add_option("-o,--output", outdir, "Output directory");
  rearrange_cmd->add_option("--tie-tol", common.tie_tol, "Relative tolerance for equal values");

  auto* oracle_cmd = app.add_subcommand("oracle", "Discretized knapsack optimum");
  oracle_cmd->add_option("input", input, "Problem JSON")->required();
  oracle_cmd->add_option("-o,--output", outdir, "Output directory");
  add_common(oracle_cmd, common);

  auto* verify_cmd = app.add_subcommand("verify", "Property suite and oracle comparison");
  verify_cmd->add_option("input", verify_input, "Problem JSON (optional)");
  verify_cmd->add_option("--schedule", schedule_path, "Schedule JSON to check for feasibility");
  verify_cmd->add_option("--seed", seed, "Random seed");
  verify_cmd->add_option("--trials", trials, "Random trials")->check(CLI::NonNegativeNumber);
  add_common(verify_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*solve_cmd) return cmd_solve(input, outdir, common);
    if (*rearrange_cmd) return cmd_rearrange(input, outdir, common);
    if (*oracle_cmd) return cmd_oracle(input, outdir, common);
    if (*verify_cmd) return cmd_verify(verify_input, schedule_path, seed, trials, common);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.is_validation() ? kExitValidation : kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumeric;
  }
  return 0;
}
