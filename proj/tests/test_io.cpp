#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

#include "helpers.hpp"
#include "uavnet/bcd.hpp"
#include "uavnet/io.hpp"

using namespace uavnet;

namespace {

Scenario sample_scenario() {
  Scenario sc;
  sc.uavs = 2;
  sc.slots = 12;
  sc.period_s = 12.0;
  sc.seed = 0x9e3779b97f4a7c15ull;  // exercises full 64-bit seed round trip
  sc.users = random_users(5, sc.area_w_m, sc.area_h_m, 77);
  sc.validate();
  return sc;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("scenario json round trip is exact", "[io]") {
  const Scenario sc = sample_scenario();
  const Scenario back = scenario_from_json(scenario_to_json(sc));
  CHECK(back.users == sc.users);
  CHECK(back.uavs == sc.uavs);
  CHECK(back.slots == sc.slots);
  CHECK(back.period_s == sc.period_s);
  CHECK(back.altitude_m == sc.altitude_m);
  CHECK(back.vmax_mps == sc.vmax_mps);
  CHECK(back.dmin_m == sc.dmin_m);
  CHECK(back.pmax_w == sc.pmax_w);
  CHECK(back.rho0 == sc.rho0);
  CHECK(back.sigma2_w == sc.sigma2_w);
  CHECK(back.area_w_m == sc.area_w_m);
  CHECK(back.area_h_m == sc.area_h_m);
  CHECK(back.seed == sc.seed);
}

TEST_CASE("scenario file round trip is exact", "[io]") {
  const Scenario sc = sample_scenario();
  const auto path = temp_file("uavnet_io_scenario.json");
  save_scenario(sc, path);
  const Scenario back = load_scenario(path);
  CHECK(back.users == sc.users);
  CHECK(back.seed == sc.seed);
  std::filesystem::remove(path);
}

TEST_CASE("scenario json rejects malformed input", "[io]") {
  const Scenario sc = sample_scenario();

  json extra = scenario_to_json(sc);
  extra["surprise"] = 1;
  CHECK_THROWS_AS(scenario_from_json(extra), std::invalid_argument);

  json missing = scenario_to_json(sc);
  missing.erase("uavs");
  CHECK_THROWS_AS(scenario_from_json(missing), std::invalid_argument);

  json bad_version = scenario_to_json(sc);
  bad_version["schema_version"] = 99;
  CHECK_THROWS_AS(scenario_from_json(bad_version), std::invalid_argument);

  json bad_user = scenario_to_json(sc);
  bad_user["users"][0] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(scenario_from_json(bad_user), std::invalid_argument);

  json invalid_domain = scenario_to_json(sc);
  invalid_domain["slots"] = 1;  // scenario validation still applies
  CHECK_THROWS_AS(scenario_from_json(invalid_domain), std::invalid_argument);

  CHECK_THROWS_AS(scenario_from_json(json::parse("[1,2,3]")), std::invalid_argument);
}

TEST_CASE("solution json round trip is exact", "[io]") {
  const Scenario sc = sample_scenario();
  BcdOptions opt;
  opt.max_outer = 2;
  auto [sol, trace] = solve(sc, opt);

  auto [back, back_trace] = solution_from_json(solution_to_json(sol, trace));
  CHECK(back.traj == sol.traj);
  CHECK(back.power == sol.power);
  CHECK(back.schedule == sol.schedule);
  CHECK(back.objective == sol.objective);
  CHECK(back.objective_kind == sol.objective_kind);
  CHECK(back.feasibility.feasible() == sol.feasibility.feasible());
  CHECK(back_trace.init_objective == trace.init_objective);
  REQUIRE(back_trace.iterations.size() == trace.iterations.size());
  for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
    CHECK(back_trace.iterations[i].after_schedule == trace.iterations[i].after_schedule);
    CHECK(back_trace.iterations[i].after_trajectory == trace.iterations[i].after_trajectory);
    CHECK(back_trace.iterations[i].after_power == trace.iterations[i].after_power);
  }

  const auto path = temp_file("uavnet_io_solution.json");
  save_solution(sol, trace, path);
  auto [from_file, file_trace] = load_solution(path);
  CHECK(from_file.traj == sol.traj);
  CHECK(from_file.objective == sol.objective);
  std::filesystem::remove(path);
}

TEST_CASE("solution json carries violations and checks the feasible flag", "[io]") {
  Solution sol;
  sol.schedule = Schedule(1, 2);
  sol.traj = Trajectory(1, 2);
  sol.power = PowerProfile(1, 2, 0.05);
  sol.objective = 1.25;
  sol.feasibility.violations.push_back({ConstraintKind::Speed, 0, -1, 1, 2.5});
  IterationTrace trace;

  json j = solution_to_json(sol, trace);
  CHECK(j["feasible"] == false);
  auto [back, back_trace] = solution_from_json(j);
  REQUIRE(back.feasibility.violations.size() == 1);
  CHECK(back.feasibility.violations[0].kind == ConstraintKind::Speed);
  CHECK(back.feasibility.violations[0].slot == 1);
  CHECK(back.feasibility.violations[0].magnitude == 2.5);

  j["feasible"] = true;  // now contradicts the violation list
  CHECK_THROWS_AS(solution_from_json(j), std::invalid_argument);

  json ragged = solution_to_json(sol, trace);
  ragged["powers_w"][0].push_back(0.1);
  CHECK_THROWS_AS(solution_from_json(ragged), std::invalid_argument);
}

TEST_CASE("csv output matches the expected table", "[io]") {
  Solution sol;
  sol.schedule = Schedule(1, 2);
  sol.schedule.serve(0, 0) = 3;
  sol.traj = Trajectory(1, 2);
  sol.traj.q(0, 0) = {1.5, 2.25};
  sol.traj.q(0, 1) = {100.0, 0.125};
  sol.power = PowerProfile(1, 2, 0.1);
  const std::string expected =
      "m,n,x_m,y_m,p_m,served_user\n"
      "0,0,1.5,2.25,0.1,3\n"
      "0,1,100,0.125,0.1,-1\n";
  CHECK(solution_to_csv(sol) == expected);
}

TEST_CASE("svg render is deterministic and well formed", "[io]") {
  const Scenario sc = sample_scenario();
  BcdOptions opt;
  opt.max_outer = 1;
  auto [sol, trace] = solve(sc, opt);

  const std::string svg = render_svg(sc, sol);
  CHECK(svg == render_svg(sc, sol));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("objective_bps_hz=") != std::string::npos);
  std::size_t polygons = 0;
  for (std::size_t pos = svg.find("<polygon"); pos != std::string::npos;
       pos = svg.find("<polygon", pos + 1)) {
    ++polygons;
  }
  CHECK(polygons == static_cast<std::size_t>(sc.uavs));
  std::size_t circles = 0;
  for (std::size_t pos = svg.find("<circle"); pos != std::string::npos;
       pos = svg.find("<circle", pos + 1)) {
    ++circles;
  }
  CHECK(circles == sc.users.size() + static_cast<std::size_t>(sc.uavs));
}

TEST_CASE("file loaders report missing files", "[io]") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/dir/scenario.json"), std::runtime_error);
  CHECK_THROWS_AS(load_solution("/nonexistent/dir/solution.json"), std::runtime_error);
}

TEST_CASE("serialization is byte-stable across calls", "[io]") {
  const Scenario sc = sample_scenario();
  CHECK(scenario_to_json(sc).dump(2) == scenario_to_json(sc).dump(2));
  BcdOptions opt;
  opt.max_outer = 1;
  auto [sol, trace] = solve(sc, opt);
  CHECK(solution_to_json(sol, trace).dump(2) == solution_to_json(sol, trace).dump(2));
}
