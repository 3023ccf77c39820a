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
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "actsched/io.hpp"

namespace actsched {
namespace {

json example_json(double gamma2) {
  const double g = std::sqrt(gamma2);
  return json{{"A", {{0, 0, 0}, {0, 0, 0}, {0, 0, 1}}},
              {"B", {{g, 0, 1}, {0, g, 1}, {0, 0, 1}}},
              {"T", 2.0},
              {"alpha", 2.0}};
}

TEST(ParseProblem, ReadsFieldsAndOptions) {
  json j = example_json(1.0);
  j["options"] = {{"K", 512}, {"tie_tol", 1e-8}, {"flat_tol", 0.01}};
  ProblemFile pf = parse_problem(j);
  finalize(pf);
  EXPECT_EQ(pf.system.states(), 3);
  EXPECT_EQ(pf.system.actuators(), 3);
  EXPECT_EQ(pf.system.cells, 512);
  EXPECT_EQ(pf.system.tie_tol, 1e-8);
  EXPECT_EQ(pf.system.flat_tolerance(), 0.01);
  EXPECT_EQ(pf.source_columns, (std::vector<int>{1, 2, 3}));
}

TEST(ParseProblem, RejectsMalformed) {
  json j = example_json(1.0);
  j["A"] = {{0, 0}, {0, 0, 0}};
  EXPECT_THROW(parse_problem(j), Error);
  j = example_json(1.0);
  j.erase("T");
  EXPECT_THROW(parse_problem(j), Error);
  j = example_json(1.0);
  j["options"] = {{"K", 10.5}};
  EXPECT_THROW(parse_problem(j), Error);
}

TEST(ParseProblem, ZeroColumnRejectedUnlessDropped) {
  ProblemFile pf = parse_problem(example_json(0.0));
  try {
    finalize(pf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kZeroColumn);
    EXPECT_TRUE(e.is_validation());
  }
  // Dropping leaves one actuator, and alpha = 2 = mT is then out of range.
  pf = parse_problem(example_json(0.0));
  pf.drop_zero_columns = true;
  EXPECT_THROW(finalize(pf), Error);
  json j = example_json(0.0);
  j["alpha"] = 1.0;
  pf = parse_problem(j);
  pf.drop_zero_columns = true;
  finalize(pf);
  EXPECT_EQ(pf.system.actuators(), 1);
  EXPECT_EQ(pf.source_columns, std::vector<int>{3});
}

TEST(ScheduleJson, RoundTripIsLossless) {
  Schedule s(3);
  s.actuators[0] = {{0.0, 0.1 + 0.2}, {1.0 / 3.0, std::log(6.0) / 2.0}};
  s.actuators[2] = {{std::nextafter(1.0, 2.0), 2.0}};
  const json j = schedule_to_json(s, 2.0);
  const Schedule back = schedule_from_json(json::parse(j.dump()), 3);
  EXPECT_EQ(back.actuators, s.actuators);
}

TEST(ScheduleJson, RejectsBadActuator) {
  const json j = {{"actuators", {{"4", json::array({json::array({0.0, 1.0})})}}}};
  EXPECT_THROW(schedule_from_json(j, 3), Error);
}

TEST(ScheduleJson, SolvedScheduleReproducesCost) {
  ProblemFile pf = parse_problem(example_json(8.0));
  finalize(pf);
  const SolverContext ctx(pf.system);
  const auto rep = solve(ctx);
  const double before = trace_cost(ctx.profiles, rep.canonical);
  const Schedule back =
      schedule_from_json(json::parse(schedule_to_json(rep.canonical, 2.0).dump()), 3);
  const double after = trace_cost(ctx.profiles, back);
  EXPECT_NEAR(after, before, 1e-9 * before);
  EXPECT_NEAR(after, rep.optimal_cost, 1e-6 * rep.optimal_cost);
}

TEST(ReportJson, Fields) {
  ProblemFile pf = parse_problem(example_json(8.0));
  finalize(pf);
  const auto rep = solve(pf.system);
  const json j = report_to_json(rep, pf.system);
  EXPECT_EQ(j["case"], "flat");
  EXPECT_EQ(j["unique"], false);
  EXPECT_NEAR(j["flat_dof"]["free_measure"].get<double>(), std::log(6.0) / 2.0, 1e-3);
  EXPECT_NEAR(j["flat_interval"]["b_left"].get<double>(), 1.1041, 1e-3);
  EXPECT_EQ(j["threshold"].get<double>(), rep.threshold);

  ProblemFile one = parse_problem(example_json(1.0));
  finalize(one);
  const json k = report_to_json(solve(one.system), one.system);
  EXPECT_EQ(k["case"], "strict_both");
  EXPECT_TRUE(k["flat_dof"].is_null());
}

TEST(Csv, ProfileDuplicatesJunctions) {
  const auto p = SampledProfile{0.0, 2.0, {{1.0, 1.0, 1.0}, {3.0, 4.0, 5.0}}, std::nullopt};
  std::ostringstream os;
  write_profile_csv(os, p);
  EXPECT_EQ(os.str(), "t,F\n0,1\n0.5,1\n1,1\n1,3\n1.5,4\n2,5\n");
}

TEST(Csv, RearrangedRoundTrip) {
  const auto p = SampledProfile::from_values(0.0, 1.0, {0.0, 0.1, 0.7, 0.3});
  const auto r = rearrange(p);
  std::stringstream ss;
  write_rearranged_csv(ss, r);
  EXPECT_EQ(ss.str().substr(0, 8), "x,Fstar\n");
  const auto rows = read_xy_csv(ss);
  ASSERT_EQ(rows.size(), 2 * r.cells().size());
  for (std::size_t i = 0; i < r.cells().size(); ++i) {
    EXPECT_EQ(rows[2 * i].second, r.cells()[i].value);
    EXPECT_EQ(rows[2 * i + 1].first, r.cumulative_measure()[i + 1]);
  }
}

TEST(FormatReal, SeventeenDigits) {
  EXPECT_EQ(detail::format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(detail::format_real(std::log(6.0))), std::log(6.0));
}

}  // namespace
}  // namespace actsched
