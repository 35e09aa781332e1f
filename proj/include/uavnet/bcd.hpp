#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uavnet/kmeans.hpp"
#include "uavnet/model.hpp"
#include "uavnet/power_opt.hpp"
#include "uavnet/scheduling.hpp"
#include "uavnet/tour.hpp"
#include "uavnet/trajectory_opt.hpp"
#include "uavnet/types.hpp"

namespace uavnet {

// Seed streams, so that e.g. clustering draws never shift the GA draws.
namespace seed_stream {
inline constexpr std::uint64_t kPartition = 1;
inline constexpr std::uint64_t kGaTour = 2;
}  // namespace seed_stream

struct BcdOptions {
  int max_outer = 30;
  double rel_gain_tol = 1e-3;   // stop when one outer round gains less
  ObjectiveKind objective = ObjectiveKind::Mean;
  double eps = 0.01;            // log-weighted objective offset
  bool use_kmeans_init = true;  // false: random user partition (ablation)
  bool use_power_opt = true;    // false: keep transmit powers at pmax
  AscentOptions traj_opts = trajectory_ascent_defaults();
  std::optional<AscentOptions> power_opts;  // nullopt: power_ascent_defaults(sc)
  GaParams ga;                  // per-cluster tour search (seed is derived)
  int kmeans_max_iter = 100;
  std::uint64_t seed = 1;

  void validate() const {
    auto fail = [](const char* msg) {
      throw std::invalid_argument(std::string("BcdOptions: ") + msg);
    };
    if (max_outer < 1) fail("max_outer must be >= 1");
    if (rel_gain_tol < 0.0) fail("rel_gain_tol must be non-negative");
    if (!(eps > 0.0)) fail("eps must be positive");
    if (kmeans_max_iter < 1) fail("kmeans_max_iter must be >= 1");
    traj_opts.validate();
    if (power_opts) power_opts->validate();
    ga.validate();
  }
};

// Objective after each stage of one outer round.
struct IterationRecord {
  double after_schedule = 0.0;
  double after_trajectory = 0.0;
  double after_power = 0.0;
  double wall_seconds = 0.0;  // not serialized; outputs stay byte-stable
};

struct IterationTrace {
  double init_objective = 0.0;
  std::vector<IterationRecord> iterations;
};

namespace detail {

// Translates whole waypoint rows apart until every UAV pair keeps dmin
// separation in every slot. Translation preserves step lengths exactly, so
// speed feasibility survives. Throws SolverError when rounds run out.
inline void separate_rows(Trajectory& traj, const Scenario& sc) {
  const int M = traj.uavs();
  const int N = traj.slots();
  if (M < 2 || sc.dmin_m <= 0.0) return;
  for (int round = 0; round < 10; ++round) {
    bool any = false;
    for (int m = 0; m < M; ++m) {
      for (int j = m + 1; j < M; ++j) {
        double worst = std::numeric_limits<double>::infinity();
        int worst_n = 0;
        for (int n = 0; n < N; ++n) {
          const double d = dist(traj.q(m, n), traj.q(j, n));
          if (d < worst) {
            worst = d;
            worst_n = n;
          }
        }
        if (worst >= sc.dmin_m) continue;
        any = true;
        const Vec2 v = traj.q(m, worst_n) - traj.q(j, worst_n);
        const double d = norm(v);
        // Coincident rows get a deterministic direction per pair.
        const double angle = 2.0 * std::numbers::pi *
                             static_cast<double>(m * M + j) /
                             static_cast<double>(M * M + 1);
        const Vec2 dir = d > 0.0 ? v * (1.0 / d) : Vec2{std::cos(angle), std::sin(angle)};
        const double shift = (sc.dmin_m - worst) / 2.0 + 0.5;
        for (int n = 0; n < N; ++n) {
          traj.q(m, n) += shift * dir;
          traj.q(j, n) -= shift * dir;
        }
      }
    }
    if (!any) return;
  }
  // Still colliding after the push rounds: report instead of looping forever.
  FeasibilityReport report;
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) {
      for (int j = m + 1; j < M; ++j) {
        const double d = dist(traj.q(m, n), traj.q(j, n));
        if (d < sc.dmin_m) {
          report.violations.push_back({ConstraintKind::Collision, m, j, n, sc.dmin_m - d});
        }
      }
    }
  }
  throw SolverError("init: could not separate UAV trajectories", report);
}

inline double relative_gain(double now, double before) {
  return (now - before) / std::max(std::abs(before), 1e-9);
}

}  // namespace detail

// Builds the starting operating point: cluster users, fly a discretized
// shortest-tour loop over each cluster (speed-scaled and separated), transmit
// at full power, and match users optimally for the resulting rates.
inline Solution init_solution(const Scenario& sc, const BcdOptions& opt) {
  sc.validate();
  opt.validate();
  if (sc.user_count() < sc.uavs) {
    throw std::invalid_argument("init_solution: needs at least one user per UAV");
  }
  const int M = sc.uavs;
  const int N = sc.slots;

  const std::uint64_t part_seed = derive_seed(opt.seed, seed_stream::kPartition);
  const Clustering clustering =
      opt.use_kmeans_init
          ? kmeans_partition(sc.users, M, part_seed, opt.kmeans_max_iter)
          : random_partition(sc.users, M, part_seed);

  Trajectory traj(M, N);
  for (int c = 0; c < M; ++c) {
    std::vector<Vec2> members;
    for (std::size_t i = 0; i < sc.users.size(); ++i) {
      if (clustering.assignment[i] == c) members.push_back(sc.users[i]);
    }
    GaParams ga = opt.ga;
    ga.seed = derive_seed(opt.seed, seed_stream::kGaTour, static_cast<std::uint64_t>(c));
    const Tour tour = ga_tour(members, ga);
    std::vector<Vec2> row = discretize_tour(
        members, tour.order, clustering.centroids[static_cast<std::size_t>(c)], N);
    row = scale_to_feasible(row, sc.vmax_mps, sc.dt());
    for (int n = 0; n < N; ++n) traj.q(c, n) = row[static_cast<std::size_t>(n)];
  }
  detail::separate_rows(traj, sc);

  Solution sol;
  sol.traj = std::move(traj);
  sol.power = PowerProfile(M, N, sc.pmax_w);
  const RateTensor rates = rate_tensor(sol.traj, sol.power, sc);
  sol.schedule = optimal_schedule(rates);
  sol.objective_kind = opt.objective;
  sol.objective = objective_value(opt.objective, sol.schedule, rates, opt.eps);
  sol.feasibility = check_feasibility(sol, sc);
  if (!sol.feasibility.feasible()) {
    throw SolverError("init_solution: infeasible starting point", sol.feasibility);
  }
  return sol;
}

// Block-coordinate ascent: per round, re-match the schedule (exact per slot),
// improve the trajectories (penalized gradient ascent), then the powers
// (projected per-slot ascent). Every stage is monotone in the chosen
// objective, so the trace never decreases; stops when one full round improves
// the objective by less than rel_gain_tol (relative).
inline std::pair<Solution, IterationTrace> solve(const Scenario& sc, const BcdOptions& opt) {
  Solution sol = init_solution(sc, opt);
  const AscentOptions power_opts =
      opt.power_opts ? *opt.power_opts : power_ascent_defaults(sc);

  IterationTrace trace;
  trace.init_objective = sol.objective;
  double prev = sol.objective;
  for (int it = 0; it < opt.max_outer; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    IterationRecord rec;

    RateTensor rates = rate_tensor(sol.traj, sol.power, sc);
    sol.schedule = optimize_schedule(opt.objective, rates, opt.eps, &sol.schedule);
    rec.after_schedule = objective_value(opt.objective, sol.schedule, rates, opt.eps);

    sol.traj = trajectory_ascent(sol.schedule, sol.traj, sol.power, sc, opt.traj_opts,
                                 opt.objective, opt.eps);
    rec.after_trajectory = objective_value(
        opt.objective, sol.schedule, rate_tensor(sol.traj, sol.power, sc), opt.eps);

    if (opt.use_power_opt) {
      sol.power = power_ascent(sol.schedule, sol.traj, sol.power, sc, power_opts,
                               opt.objective, opt.eps);
      rec.after_power = objective_value(
          opt.objective, sol.schedule, rate_tensor(sol.traj, sol.power, sc), opt.eps);
    } else {
      rec.after_power = rec.after_trajectory;
    }

    rec.wall_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    trace.iterations.push_back(rec);

    const double gain = detail::relative_gain(rec.after_power, prev);
    prev = rec.after_power;
    if (gain < opt.rel_gain_tol) break;
  }

  sol.objective = prev;
  sol.feasibility = check_feasibility(sol, sc);
  if (!sol.feasibility.feasible()) {
    throw SolverError("solve: final operating point infeasible", sol.feasibility);
  }
  return {std::move(sol), std::move(trace)};
}

}  // namespace uavnet
