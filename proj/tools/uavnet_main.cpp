// Command-line front end: scenario generation, solving, baselines, evaluation
// and plotting. Every command is a pure function of its arguments and input
// files; repeated runs produce byte-identical outputs.
//
// Exit codes: 0 success, 2 invalid arguments or input files, 3 solver failure,
// 4 infeasible solution (eval only).

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uavnet/uavnet.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitSolverError = 3;
constexpr int kExitInfeasible = 4;

struct GenerateArgs {
  int users = 0;
  int uavs = 0;
  std::uint64_t seed = 1;
  double period = 210.0;
  int slots = 0;  // 0: one-second slots (slots = round(period))
  std::vector<double> area;
  double altitude = 100.0;
  double vmax = 50.0;
  double dmin = 50.0;
  double pmax = 0.1;
  double rho0 = 1e-6;
  double sigma2 = 1e-14;
  std::string out;
};

struct SolveArgs {
  std::string scenario;
  std::string out;
  std::string objective = "mean";
  double tol = 1e-3;
  int max_outer = 30;
  bool no_power_opt = false;
  bool no_kmeans_init = false;
};

struct BaselineArgs {
  std::string scenario;
  std::string kind;
  std::string out;
  std::string objective = "mean";
  double tol = 1e-3;
  int max_outer = 30;
  bool no_power_opt = false;
};

struct EvalArgs {
  std::string scenario;
  std::string solution;
};

struct PlotArgs {
  std::string scenario;
  std::string solution;
  std::string out;
};

uavnet::BcdOptions options_from(const std::string& objective, double tol, int max_outer,
                                bool no_power_opt, bool no_kmeans_init,
                                std::uint64_t seed) {
  uavnet::BcdOptions opt;
  opt.objective = uavnet::objective_kind_from_string(objective);
  opt.rel_gain_tol = tol;
  opt.max_outer = max_outer;
  opt.use_power_opt = !no_power_opt;
  opt.use_kmeans_init = !no_kmeans_init;
  opt.seed = seed;
  return opt;
}

int run_generate(const GenerateArgs& a) {
  uavnet::Scenario sc;
  sc.seed = a.seed;
  sc.uavs = a.uavs;
  sc.period_s = a.period;
  sc.slots = a.slots > 0 ? a.slots : static_cast<int>(std::llround(a.period));
  if (!a.area.empty()) {
    sc.area_w_m = a.area[0];
    sc.area_h_m = a.area[1];
  }
  sc.altitude_m = a.altitude;
  sc.vmax_mps = a.vmax;
  sc.dmin_m = a.dmin;
  sc.pmax_w = a.pmax;
  sc.rho0 = a.rho0;
  sc.sigma2_w = a.sigma2;
  sc.users = uavnet::random_users(a.users, sc.area_w_m, sc.area_h_m, sc.seed);
  sc.validate();
  uavnet::save_scenario(sc, a.out);
  return kExitOk;
}

void report_solution(const uavnet::Solution& sol, const uavnet::IterationTrace& trace) {
  std::cout << "objective_bps_hz=" << uavnet::detail::format_double(sol.objective)
            << "\n";
  std::cout << "iterations=" << trace.iterations.size() << "\n";
  std::cout << "feasible=" << (sol.feasibility.feasible() ? "true" : "false") << "\n";
}

int run_solve(const SolveArgs& a) {
  const uavnet::Scenario sc = uavnet::load_scenario(a.scenario);
  const uavnet::BcdOptions opt = options_from(a.objective, a.tol, a.max_outer,
                                              a.no_power_opt, a.no_kmeans_init, sc.seed);
  auto [sol, trace] = uavnet::solve(sc, opt);
  uavnet::save_solution(sol, trace, a.out);
  report_solution(sol, trace);
  return kExitOk;
}

int run_baseline(const BaselineArgs& a) {
  const uavnet::Scenario sc = uavnet::load_scenario(a.scenario);
  const uavnet::BcdOptions opt =
      options_from(a.objective, a.tol, a.max_outer, a.no_power_opt, false, sc.seed);
  std::pair<uavnet::Solution, uavnet::IterationTrace> result;
  if (a.kind == "static") {
    result = uavnet::static_deployment(sc, opt);
  } else if (a.kind == "circular") {
    result = uavnet::circular_trajectories(sc, opt);
  } else {
    throw std::invalid_argument("baseline: --kind must be static or circular");
  }
  uavnet::save_solution(result.first, result.second, a.out);
  report_solution(result.first, result.second);
  return kExitOk;
}

int run_eval(const EvalArgs& a) {
  const uavnet::Scenario sc = uavnet::load_scenario(a.scenario);
  auto [sol, trace] = uavnet::load_solution(a.solution);
  (void)trace;

  const uavnet::RateTensor rates = uavnet::rate_tensor(sol.traj, sol.power, sc);
  const std::vector<double> user_rates = uavnet::per_user_mean_rates(sol.schedule, rates);
  const uavnet::FeasibilityReport report = uavnet::check_feasibility(sol, sc);

  std::cout << "stored_objective_kind=" << uavnet::to_string(sol.objective_kind) << "\n";
  std::cout << "stored_objective_bps_hz="
            << uavnet::detail::format_double(sol.objective) << "\n";
  std::cout << "objective_mean_bps_hz="
            << uavnet::detail::format_double(uavnet::objective_mean(sol.schedule, rates))
            << "\n";
  std::cout << "objective_min_bps_hz="
            << uavnet::detail::format_double(uavnet::objective_min(sol.schedule, rates))
            << "\n";
  std::cout << "objective_logw="
            << uavnet::detail::format_double(
                   uavnet::objective_logweighted(sol.schedule, rates))
            << "\n";
  for (std::size_t k = 0; k < user_rates.size(); ++k) {
    std::cout << "user_rate[" << k
              << "]=" << uavnet::detail::format_double(user_rates[k]) << "\n";
  }
  std::cout << "feasible=" << (report.feasible() ? "true" : "false") << "\n";
  std::cout << "max_violation=" << uavnet::detail::format_double(report.max_magnitude())
            << "\n";
  for (const uavnet::Violation& v : report.violations) {
    std::cout << "violation: " << v.describe() << "\n";
  }
  return report.feasible() ? kExitOk : kExitInfeasible;
}

int run_plot(const PlotArgs& a) {
  const uavnet::Scenario sc = uavnet::load_scenario(a.scenario);
  auto [sol, trace] = uavnet::load_solution(a.solution);
  (void)trace;
  uavnet::detail::write_text_file(a.out, uavnet::render_svg(sc, sol));
  std::filesystem::path csv_path(a.out);
  csv_path.replace_extension(".csv");
  uavnet::detail::write_text_file(csv_path, uavnet::solution_to_csv(sol));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-UAV downlink planner: joint scheduling, trajectory and "
               "power optimization"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("generate", "Write a random scenario file");
  cmd_gen->add_option("--users", gen.users, "Number of ground users")->required();
  cmd_gen->add_option("--uavs", gen.uavs, "Number of UAVs")->required();
  cmd_gen->add_option("--seed", gen.seed, "Random seed for user placement");
  cmd_gen->add_option("--period", gen.period, "Flight period T in seconds");
  cmd_gen->add_option("--slots", gen.slots,
                      "Time slots N (default: one-second slots, N = round(T))");
  cmd_gen->add_option("--area", gen.area, "Area width and height in meters")
      ->expected(2);
  cmd_gen->add_option("--altitude", gen.altitude, "UAV altitude in meters");
  cmd_gen->add_option("--vmax", gen.vmax, "Maximum UAV speed in m/s");
  cmd_gen->add_option("--dmin", gen.dmin, "Minimum inter-UAV distance in meters");
  cmd_gen->add_option("--pmax", gen.pmax, "Maximum transmit power in watts");
  cmd_gen->add_option("--rho0", gen.rho0, "Channel gain at 1 m reference distance");
  cmd_gen->add_option("--sigma2", gen.sigma2, "Noise power in watts");
  cmd_gen->add_option("--out", gen.out, "Output scenario path")->required();

  SolveArgs solve_args;
  CLI::App* cmd_solve = app.add_subcommand("solve", "Optimize scheduling, trajectories and power");
  cmd_solve->add_option("scenario", solve_args.scenario, "Scenario file")->required();
  cmd_solve->add_option("--out", solve_args.out, "Output solution path")->required();
  cmd_solve->add_option("--objective", solve_args.objective,
                        "Objective: mean, min, or logw");
  cmd_solve->add_option("--tol", solve_args.tol, "Relative gain stopping tolerance");
  cmd_solve->add_option("--max-outer", solve_args.max_outer, "Maximum outer rounds");
  cmd_solve->add_flag("--no-power-opt", solve_args.no_power_opt,
                      "Keep transmit power fixed at pmax");
  cmd_solve->add_flag("--no-kmeans-init", solve_args.no_kmeans_init,
                      "Use a random user partition instead of k-means");

  BaselineArgs base;
  CLI::App* cmd_base = app.add_subcommand("baseline", "Run a reference scheme");
  cmd_base->add_option("scenario", base.scenario, "Scenario file")->required();
  cmd_base->add_option("--kind", base.kind, "static or circular")->required();
  cmd_base->add_option("--out", base.out, "Output solution path")->required();
  cmd_base->add_option("--objective", base.objective, "Objective: mean, min, or logw");
  cmd_base->add_option("--tol", base.tol, "Relative gain stopping tolerance");
  cmd_base->add_option("--max-outer", base.max_outer, "Maximum refinement rounds");
  cmd_base->add_flag("--no-power-opt", base.no_power_opt,
                     "Keep transmit power fixed at pmax");

  EvalArgs eval_args;
  CLI::App* cmd_eval = app.add_subcommand("eval", "Recompute metrics for a solution");
  cmd_eval->add_option("scenario", eval_args.scenario, "Scenario file")->required();
  cmd_eval->add_option("solution", eval_args.solution, "Solution file")->required();

  PlotArgs plot_args;
  CLI::App* cmd_plot = app.add_subcommand("plot", "Render a solution as SVG + CSV");
  cmd_plot->add_option("scenario", plot_args.scenario, "Scenario file")->required();
  cmd_plot->add_option("solution", plot_args.solution, "Solution file")->required();
  cmd_plot->add_option("--out", plot_args.out, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (cmd_gen->parsed()) return run_generate(gen);
    if (cmd_solve->parsed()) return run_solve(solve_args);
    if (cmd_base->parsed()) return run_baseline(base);
    if (cmd_eval->parsed()) return run_eval(eval_args);
    if (cmd_plot->parsed()) return run_plot(plot_args);
  } catch (const uavnet::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    for (const uavnet::Violation& v : e.report().violations) {
      std::cerr << "violation: " << v.describe() << "\n";
    }
    return kExitSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
