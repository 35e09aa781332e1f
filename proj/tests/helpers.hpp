#pragma once

#include <cmath>
#include <numbers>

#include "uavnet/model.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/scheduling.hpp"
#include "uavnet/types.hpp"

namespace uavnet::testing {

// Feasible-by-construction random operating point: every UAV flies a small
// circle whose chord fits the speed cap, powers sit strictly inside the box,
// and the schedule is the optimal matching for the resulting rates.
struct Setup {
  Scenario sc;
  Trajectory traj;
  PowerProfile power;
  Schedule schedule;
};

inline Setup random_setup(int K, int M, int N, std::uint64_t seed,
                          bool integer_coords = false) {
  Setup s;
  s.sc.users = random_users(K, 2000.0, 2000.0, seed);
  if (integer_coords) {
    for (Vec2& u : s.sc.users) {
      u.x = std::floor(u.x);
      u.y = std::floor(u.y);
    }
  }
  s.sc.uavs = M;
  s.sc.period_s = static_cast<double>(N);
  s.sc.slots = N;

  Rng rng(derive_seed(seed, 99));
  const double cap = s.sc.vmax_mps * s.sc.dt();
  const double radius = 0.9 * cap * static_cast<double>(N) / (2.0 * std::numbers::pi);
  s.traj = Trajectory(M, N);
  for (int m = 0; m < M; ++m) {
    Vec2 center{rng.next_double(300.0, 1700.0), rng.next_double(300.0, 1700.0)};
    if (integer_coords) center = {std::floor(center.x), std::floor(center.y)};
    for (int n = 0; n < N; ++n) {
      const double th = 2.0 * std::numbers::pi * n / N;
      Vec2 p = center + radius * Vec2{std::cos(th), std::sin(th)};
      if (integer_coords) p = {std::floor(p.x), std::floor(p.y)};
      s.traj.q(m, n) = p;
    }
  }
  s.power = PowerProfile(M, N);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      s.power.p(m, n) = rng.next_double(0.2, 0.9) * s.sc.pmax_w;
    }
  }
  s.schedule = optimal_schedule(rate_tensor(s.traj, s.power, s.sc));
  return s;
}

inline double scalar_objective(const Setup& s, const Trajectory& traj,
                               ObjectiveKind kind, double eps = 0.01) {
  return objective_value(kind, s.schedule, rate_tensor(traj, s.power, s.sc), eps);
}

inline double scalar_objective(const Setup& s, const PowerProfile& power,
                               ObjectiveKind kind, double eps = 0.01) {
  return objective_value(kind, s.schedule, rate_tensor(s.traj, power, s.sc), eps);
}

}  // namespace uavnet::testing
