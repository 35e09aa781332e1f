#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "uavnet/bcd.hpp"
#include "uavnet/model.hpp"
#include "uavnet/types.hpp"

namespace uavnet {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

// Strict object shape: every listed key present, nothing else. Typos in
// hand-edited files fail loudly instead of silently using defaults.
inline void require_keys(const json& j, std::initializer_list<const char*> keys,
                         const char* what) {
  if (!j.is_object()) {
    throw std::invalid_argument(std::string(what) + ": expected a JSON object");
  }
  std::set<std::string> expected;
  for (const char* k : keys) expected.insert(k);
  for (const auto& item : j.items()) {
    if (!expected.count(item.key())) {
      throw std::invalid_argument(std::string(what) + ": unknown key '" + item.key() + "'");
    }
  }
  for (const std::string& k : expected) {
    if (!j.contains(k)) {
      throw std::invalid_argument(std::string(what) + ": missing key '" + k + "'");
    }
  }
}

inline void require_schema_version(const json& j, const char* what) {
  if (!j.at("schema_version").is_number_integer() ||
      j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::invalid_argument(std::string(what) + ": unsupported schema_version");
  }
}

inline Vec2 vec2_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw std::invalid_argument(std::string(what) + ": expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Shortest decimal string that parses back to exactly v.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

inline json scenario_to_json(const Scenario& sc) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = sc.seed;
  j["area_m"] = {sc.area_w_m, sc.area_h_m};
  json users = json::array();
  for (const Vec2& u : sc.users) users.push_back({u.x, u.y});
  j["users"] = std::move(users);
  j["uavs"] = sc.uavs;
  j["period_s"] = sc.period_s;
  j["slots"] = sc.slots;
  j["altitude_m"] = sc.altitude_m;
  j["vmax_mps"] = sc.vmax_mps;
  j["dmin_m"] = sc.dmin_m;
  j["pmax_w"] = sc.pmax_w;
  j["rho0"] = sc.rho0;
  j["sigma2_w"] = sc.sigma2_w;
  return j;
}

inline Scenario scenario_from_json(const json& j) {
  detail::require_keys(j,
                       {"schema_version", "seed", "area_m", "users", "uavs", "period_s",
                        "slots", "altitude_m", "vmax_mps", "dmin_m", "pmax_w", "rho0",
                        "sigma2_w"},
                       "scenario");
  detail::require_schema_version(j, "scenario");
  Scenario sc;
  sc.seed = j.at("seed").get<std::uint64_t>();
  const json& area = j.at("area_m");
  if (!area.is_array() || area.size() != 2) {
    throw std::invalid_argument("scenario: area_m must be [width, height]");
  }
  sc.area_w_m = area[0].get<double>();
  sc.area_h_m = area[1].get<double>();
  sc.users.clear();
  for (const json& u : j.at("users")) {
    sc.users.push_back(detail::vec2_from_json(u, "scenario users"));
  }
  sc.uavs = j.at("uavs").get<int>();
  sc.period_s = j.at("period_s").get<double>();
  sc.slots = j.at("slots").get<int>();
  sc.altitude_m = j.at("altitude_m").get<double>();
  sc.vmax_mps = j.at("vmax_mps").get<double>();
  sc.dmin_m = j.at("dmin_m").get<double>();
  sc.pmax_w = j.at("pmax_w").get<double>();
  sc.rho0 = j.at("rho0").get<double>();
  sc.sigma2_w = j.at("sigma2_w").get<double>();
  sc.validate();
  return sc;
}

inline void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
  detail::write_text_file(path, scenario_to_json(sc).dump(2) + "\n");
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(json::parse(detail::read_text_file(path)));
}

inline json solution_to_json(const Solution& sol, const IterationTrace& trace) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["objective_kind"] = to_string(sol.objective_kind);
  j["objective_bps_hz"] = sol.objective;
  const int M = sol.traj.uavs();
  const int N = sol.traj.slots();
  json trajs = json::array();
  json powers = json::array();
  json sched = json::array();
  for (int m = 0; m < M; ++m) {
    json row = json::array();
    json prow = json::array();
    json srow = json::array();
    for (int n = 0; n < N; ++n) {
      row.push_back({sol.traj.q(m, n).x, sol.traj.q(m, n).y});
      prow.push_back(sol.power.p(m, n));
      srow.push_back(sol.schedule.serve(m, n));
    }
    trajs.push_back(std::move(row));
    powers.push_back(std::move(prow));
    sched.push_back(std::move(srow));
  }
  j["trajectories_m"] = std::move(trajs);
  j["powers_w"] = std::move(powers);
  j["schedule"] = std::move(sched);
  json jt;
  jt["init_objective"] = trace.init_objective;
  json iters = json::array();
  for (const IterationRecord& rec : trace.iterations) {
    json r;
    r["after_schedule"] = rec.after_schedule;
    r["after_trajectory"] = rec.after_trajectory;
    r["after_power"] = rec.after_power;
    iters.push_back(std::move(r));
  }
  jt["iterations"] = std::move(iters);
  j["trace"] = std::move(jt);
  j["feasible"] = sol.feasibility.feasible();
  json viols = json::array();
  for (const Violation& v : sol.feasibility.violations) {
    json vj;
    vj["kind"] = to_string(v.kind);
    vj["uav"] = v.uav;
    vj["other"] = v.other;
    vj["slot"] = v.slot;
    vj["magnitude"] = v.magnitude;
    viols.push_back(std::move(vj));
  }
  j["violations"] = std::move(viols);
  return j;
}

inline std::pair<Solution, IterationTrace> solution_from_json(const json& j) {
  detail::require_keys(j,
                       {"schema_version", "objective_kind", "objective_bps_hz",
                        "trajectories_m", "powers_w", "schedule", "trace", "feasible",
                        "violations"},
                       "solution");
  detail::require_schema_version(j, "solution");
  Solution sol;
  sol.objective_kind = objective_kind_from_string(j.at("objective_kind").get<std::string>());
  sol.objective = j.at("objective_bps_hz").get<double>();

  const json& trajs = j.at("trajectories_m");
  const json& powers = j.at("powers_w");
  const json& sched = j.at("schedule");
  if (!trajs.is_array() || trajs.empty()) {
    throw std::invalid_argument("solution: trajectories_m must be a non-empty array");
  }
  const int M = static_cast<int>(trajs.size());
  if (static_cast<int>(powers.size()) != M || static_cast<int>(sched.size()) != M) {
    throw std::invalid_argument("solution: trajectories/powers/schedule row mismatch");
  }
  if (!trajs[0].is_array() || trajs[0].empty()) {
    throw std::invalid_argument("solution: trajectory rows must be non-empty arrays");
  }
  const int N = static_cast<int>(trajs[0].size());
  sol.traj = Trajectory(M, N);
  sol.power = PowerProfile(M, N);
  sol.schedule = Schedule(M, N);
  for (int m = 0; m < M; ++m) {
    const json& row = trajs[static_cast<std::size_t>(m)];
    const json& prow = powers[static_cast<std::size_t>(m)];
    const json& srow = sched[static_cast<std::size_t>(m)];
    if (static_cast<int>(row.size()) != N || static_cast<int>(prow.size()) != N ||
        static_cast<int>(srow.size()) != N) {
      throw std::invalid_argument("solution: ragged rows");
    }
    for (int n = 0; n < N; ++n) {
      sol.traj.q(m, n) = detail::vec2_from_json(row[static_cast<std::size_t>(n)],
                                                "solution trajectory");
      sol.power.p(m, n) = prow[static_cast<std::size_t>(n)].get<double>();
      sol.schedule.serve(m, n) = srow[static_cast<std::size_t>(n)].get<int>();
    }
  }

  const json& jt = j.at("trace");
  detail::require_keys(jt, {"init_objective", "iterations"}, "solution trace");
  IterationTrace trace;
  trace.init_objective = jt.at("init_objective").get<double>();
  for (const json& r : jt.at("iterations")) {
    detail::require_keys(r, {"after_schedule", "after_trajectory", "after_power"},
                         "solution trace iteration");
    IterationRecord rec;
    rec.after_schedule = r.at("after_schedule").get<double>();
    rec.after_trajectory = r.at("after_trajectory").get<double>();
    rec.after_power = r.at("after_power").get<double>();
    trace.iterations.push_back(rec);
  }

  for (const json& vj : j.at("violations")) {
    detail::require_keys(vj, {"kind", "uav", "other", "slot", "magnitude"},
                         "solution violation");
    Violation v;
    v.kind = constraint_kind_from_string(vj.at("kind").get<std::string>());
    v.uav = vj.at("uav").get<int>();
    v.other = vj.at("other").get<int>();
    v.slot = vj.at("slot").get<int>();
    v.magnitude = vj.at("magnitude").get<double>();
    sol.feasibility.violations.push_back(v);
  }
  if (j.at("feasible").get<bool>() != sol.feasibility.feasible()) {
    throw std::invalid_argument("solution: feasible flag contradicts violations list");
  }
  return {std::move(sol), std::move(trace)};
}

inline void save_solution(const Solution& sol, const IterationTrace& trace,
                          const std::filesystem::path& path) {
  detail::write_text_file(path, solution_to_json(sol, trace).dump(2) + "\n");
}

inline std::pair<Solution, IterationTrace> load_solution(const std::filesystem::path& path) {
  return solution_from_json(json::parse(detail::read_text_file(path)));
}

// Flat per-(uav, slot) table, convenient for spreadsheets and plotting tools.
inline std::string solution_to_csv(const Solution& sol) {
  std::string out = "m,n,x_m,y_m,p_m,served_user\n";
  for (int m = 0; m < sol.traj.uavs(); ++m) {
    for (int n = 0; n < sol.traj.slots(); ++n) {
      out += std::to_string(m);
      out += ',';
      out += std::to_string(n);
      out += ',';
      out += detail::format_double(sol.traj.q(m, n).x);
      out += ',';
      out += detail::format_double(sol.traj.q(m, n).y);
      out += ',';
      out += detail::format_double(sol.power.p(m, n));
      out += ',';
      out += std::to_string(sol.schedule.serve(m, n));
      out += '\n';
    }
  }
  return out;
}

namespace detail {

inline std::string svg_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace detail

// Standalone SVG: users as filled dots, each UAV's cyclic path as a closed
// colored polygon with a marker on waypoint 0.
inline std::string render_svg(const Scenario& sc, const Solution& sol) {
  static const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
  constexpr int kPaletteSize = 6;
  const double size = 800.0;
  const double sx = size / sc.area_w_m;
  const double sy = size / sc.area_h_m;
  // SVG y grows downward; flip so north stays up.
  auto X = [&](double x) { return detail::svg_coord(x * sx); };
  auto Y = [&](double y) { return detail::svg_coord(size - y * sy); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
         "viewBox=\"0 0 800 800\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"white\" "
         "stroke=\"black\"/>\n";
  for (const Vec2& u : sc.users) {
    svg += "  <circle cx=\"" + X(u.x) + "\" cy=\"" + Y(u.y) +
           "\" r=\"5\" fill=\"black\"/>\n";
  }
  for (int m = 0; m < sol.traj.uavs(); ++m) {
    const char* color = kPalette[m % kPaletteSize];
    std::string points;
    for (int n = 0; n < sol.traj.slots(); ++n) {
      if (n) points += ' ';
      points += X(sol.traj.q(m, n).x) + "," + Y(sol.traj.q(m, n).y);
    }
    svg += "  <polygon points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    svg += "  <circle cx=\"" + X(sol.traj.q(m, 0).x) + "\" cy=\"" +
           Y(sol.traj.q(m, 0).y) + "\" r=\"4\" fill=\"" + color + "\"/>\n";
  }
  svg += "  <text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">";
  svg += std::string(to_string(sol.objective_kind)) +
         " objective_bps_hz=" + detail::format_double(sol.objective);
  svg += "</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace uavnet
