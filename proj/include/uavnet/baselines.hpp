#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uavnet/bcd.hpp"
#include "uavnet/kmeans.hpp"
#include "uavnet/model.hpp"
#include "uavnet/power_opt.hpp"
#include "uavnet/scheduling.hpp"
#include "uavnet/types.hpp"

namespace uavnet {

struct CirclePacking {
  std::vector<Vec2> centers;
  double radius = 0.0;
};

// Largest equal circles that fit a w x h rectangle without overlap, in closed
// form for 1..3 circles. For 3 circles the packing is computed in the centered
// min(w,h) square (optimal for squares, merely valid for other rectangles).
inline CirclePacking pack_circles(double width, double height, int count) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw std::invalid_argument("pack_circles: area must be positive");
  }
  CirclePacking out;
  switch (count) {
    case 1: {
      out.radius = std::min(width, height) / 2.0;
      out.centers = {{width / 2.0, height / 2.0}};
      return out;
    }
    case 2: {
      const double lo = std::min(width, height);
      const double hi = std::max(width, height);
      if (hi <= 2.0 * lo) {
        // Diagonal placement, circles tangent to each other and two walls.
        const double r = (width + height - std::sqrt(2.0 * width * height)) / 2.0;
        out.radius = r;
        out.centers = {{r, r}, {width - r, height - r}};
      } else {
        // Long rectangle: two side-by-side half-height circles.
        const double r = lo / 2.0;
        out.radius = r;
        if (width >= height) {
          out.centers = {{r, height / 2.0}, {width - r, height / 2.0}};
        } else {
          out.centers = {{width / 2.0, r}, {width / 2.0, height - r}};
        }
      }
      return out;
    }
    case 3: {
      // Optimal square packing: unit positions {(0,0), (1, 2-sqrt(3)),
      // (2-sqrt(3), 1)} have min pairwise distance m0 = sqrt(6)-sqrt(2);
      // r = s*m0 / (2 + 2*m0) makes the scaled circles mutually tangent.
      const double s = std::min(width, height);
      const double m0 = std::sqrt(6.0) - std::sqrt(2.0);
      const double r = s * m0 / (2.0 + 2.0 * m0);
      const double scale = s - 2.0 * r;
      const Vec2 offset{(width - s) / 2.0 + r, (height - s) / 2.0 + r};
      const double t = 2.0 - std::sqrt(3.0);
      out.radius = r;
      out.centers = {offset + scale * Vec2{0.0, 0.0},
                     offset + scale * Vec2{1.0, t},
                     offset + scale * Vec2{t, 1.0}};
      return out;
    }
    default:
      throw std::invalid_argument("pack_circles: only 1 to 3 circles supported");
  }
}

namespace detail {

// Alternates exact rescheduling with per-slot power ascent on a fixed
// trajectory; same stopping rule as the full solver. The trajectory stage is
// absent, so after_trajectory repeats after_schedule in each record.
inline IterationTrace refine_schedule_power(Solution& sol, const Scenario& sc,
                                            const BcdOptions& opt) {
  const AscentOptions power_opts =
      opt.power_opts ? *opt.power_opts : power_ascent_defaults(sc);

  IterationTrace trace;
  {
    const RateTensor rates = rate_tensor(sol.traj, sol.power, sc);
    trace.init_objective =
        objective_value(opt.objective, sol.schedule, rates, opt.eps);
  }
  double prev = trace.init_objective;
  for (int it = 0; it < opt.max_outer; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    IterationRecord rec;

    RateTensor rates = rate_tensor(sol.traj, sol.power, sc);
    sol.schedule = optimize_schedule(opt.objective, rates, opt.eps, &sol.schedule);
    rec.after_schedule = objective_value(opt.objective, sol.schedule, rates, opt.eps);
    rec.after_trajectory = rec.after_schedule;

    if (opt.use_power_opt) {
      sol.power = power_ascent(sol.schedule, sol.traj, sol.power, sc, power_opts,
                               opt.objective, opt.eps);
      rec.after_power = objective_value(
          opt.objective, sol.schedule, rate_tensor(sol.traj, sol.power, sc), opt.eps);
    } else {
      rec.after_power = rec.after_schedule;
    }

    rec.wall_seconds = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    trace.iterations.push_back(rec);

    const double gain = relative_gain(rec.after_power, prev);
    prev = rec.after_power;
    if (gain < opt.rel_gain_tol) break;
  }
  sol.objective = prev;
  sol.objective_kind = opt.objective;
  return trace;
}

}  // namespace detail

// Baseline: one fixed hover point per UAV at the (separation-repaired) k-means
// centroid of its user cluster; schedule and power are still optimized. The
// per-slot problem is identical in every slot, so it is solved once on a
// two-slot copy of the scenario and the result is replicated across the
// period. The reported objective comes from that fixed-size computation and
// therefore does not depend on the period length.
inline std::pair<Solution, IterationTrace> static_deployment(const Scenario& sc,
                                                             const BcdOptions& opt) {
  sc.validate();
  opt.validate();
  const int M = sc.uavs;
  const int N = sc.slots;

  const Clustering clustering =
      kmeans_partition(sc.users, M, derive_seed(opt.seed, seed_stream::kPartition),
                       opt.kmeans_max_iter);
  Trajectory centers(M, 1);
  for (int m = 0; m < M; ++m) {
    centers.q(m, 0) = clustering.centroids[static_cast<std::size_t>(m)];
  }
  detail::separate_rows(centers, sc);

  Scenario sub = sc;
  sub.slots = 2;
  sub.period_s = 2.0 * sc.dt();
  Solution work;
  work.traj = Trajectory(M, 2);
  for (int m = 0; m < M; ++m) {
    work.traj.q(m, 0) = centers.q(m, 0);
    work.traj.q(m, 1) = centers.q(m, 0);
  }
  work.power = PowerProfile(M, 2, sc.pmax_w);
  work.schedule = Schedule(M, 2);
  const IterationTrace trace = detail::refine_schedule_power(work, sub, opt);

  // A static deployment only replicates cleanly if the schedule is the same
  // in every slot. The fairness objectives may time-share users across the
  // two probe slots; collapse to the better constant column then. (The mean
  // objective never time-shares: identical slots get identical matchings.)
  bool constant = true;
  for (int m = 0; m < M; ++m) {
    if (work.schedule.serve(m, 0) != work.schedule.serve(m, 1)) constant = false;
  }
  if (!constant) {
    const RateTensor sub_rates = rate_tensor(work.traj, work.power, sub);
    Schedule best;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int col = 0; col < 2; ++col) {
      Schedule cand(M, 2);
      for (int m = 0; m < M; ++m) {
        cand.serve(m, 0) = work.schedule.serve(m, col);
        cand.serve(m, 1) = work.schedule.serve(m, col);
      }
      const double value = objective_value(opt.objective, cand, sub_rates, opt.eps);
      if (value > best_value) {
        best_value = value;
        best = cand;
      }
    }
    work.schedule = best;
    work.objective = best_value;
  }

  // Identical slots get identical matchings and powers; replicate slot 0.
  Solution sol;
  sol.schedule = Schedule(M, N);
  sol.traj = Trajectory(M, N);
  sol.power = PowerProfile(M, N);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      sol.schedule.serve(m, n) = work.schedule.serve(m, 0);
      sol.traj.q(m, n) = work.traj.q(m, 0);
      sol.power.p(m, n) = work.power.p(m, 0);
    }
  }
  sol.objective_kind = opt.objective;
  sol.objective = work.objective;
  sol.feasibility = check_feasibility(sol, sc);
  if (!sol.feasibility.feasible()) {
    throw SolverError("static_deployment: infeasible deployment", sol.feasibility);
  }
  return {std::move(sol), trace};
}

// Baseline: UAVs fly maximal concentric circles from a 1..3-circle packing of
// the area, phase-shifted by 2*pi*m/M, with optimized schedule and power. The
// flight radius is capped by the speed limit and, for multiple UAVs, by the
// minimum separation between packing centers.
inline std::pair<Solution, IterationTrace> circular_trajectories(const Scenario& sc,
                                                                 const BcdOptions& opt) {
  sc.validate();
  opt.validate();
  const int M = sc.uavs;
  const int N = sc.slots;
  const CirclePacking pack = pack_circles(sc.area_w_m, sc.area_h_m, M);

  double r_fly = std::min(pack.radius,
                          sc.vmax_mps * sc.period_s / (2.0 * std::numbers::pi));
  if (M > 1) {
    double min_center_dist = std::numeric_limits<double>::infinity();
    for (int m = 0; m < M; ++m) {
      for (int j = m + 1; j < M; ++j) {
        min_center_dist = std::min(
            min_center_dist, dist(pack.centers[static_cast<std::size_t>(m)],
                                  pack.centers[static_cast<std::size_t>(j)]));
      }
    }
    r_fly = std::min(r_fly, (min_center_dist - sc.dmin_m) / 2.0);
  }
  r_fly = std::max(r_fly, 0.0);

  Solution sol;
  sol.traj = Trajectory(M, N);
  for (int m = 0; m < M; ++m) {
    const Vec2 c = pack.centers[static_cast<std::size_t>(m)];
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(m) /
                         static_cast<double>(M);
    for (int n = 0; n < N; ++n) {
      const double theta =
          2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(N) +
          phase;
      sol.traj.q(m, n) = c + r_fly * Vec2{std::cos(theta), std::sin(theta)};
    }
  }
  sol.power = PowerProfile(M, N, sc.pmax_w);
  sol.schedule = Schedule(M, N);
  const IterationTrace trace = detail::refine_schedule_power(sol, sc, opt);
  sol.feasibility = check_feasibility(sol, sc);
  if (!sol.feasibility.feasible()) {
    throw SolverError("circular_trajectories: infeasible construction",
                      sol.feasibility);
  }
  return {std::move(sol), trace};
}

}  // namespace uavnet
