#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "uavnet/types.hpp"
#include "uavnet/vec2.hpp"

namespace uavnet {

// 3-d distance between a UAV at horizontal position q (altitude h) and a
// ground user at w.
inline double distance(const Vec2& q, const Vec2& w, double altitude_m) {
  if (!is_finite(q) || !is_finite(w) || !std::isfinite(altitude_m)) {
    throw std::invalid_argument("distance: non-finite input");
  }
  return std::sqrt(altitude_m * altitude_m + dist_sq(q, w));
}

// Free-space channel gain rho0 / d^2.
inline double channel_gain(const Vec2& q, const Vec2& w, double altitude_m, double rho0) {
  if (!is_finite(q) || !is_finite(w) || !std::isfinite(altitude_m) || !(rho0 > 0.0)) {
    throw std::invalid_argument("channel_gain: bad input");
  }
  return rho0 / (altitude_m * altitude_m + dist_sq(q, w));
}

inline double channel_gain(const Vec2& q, const Vec2& w, const Scenario& sc) {
  return channel_gain(q, w, sc.altitude_m, sc.rho0);
}

namespace detail {

inline void require_consistent(const Trajectory& traj, const PowerProfile& power,
                               const Scenario& sc) {
  if (traj.uavs() != sc.uavs || traj.slots() != sc.slots) {
    throw std::invalid_argument("trajectory shape does not match scenario");
  }
  if (power.uavs() != sc.uavs || power.slots() != sc.slots) {
    throw std::invalid_argument("power profile shape does not match scenario");
  }
}

inline void require_consistent(const Schedule& schedule, const RateTensor& rates) {
  if (schedule.uavs() != rates.uavs() || schedule.slots() != rates.slots()) {
    throw std::invalid_argument("schedule shape does not match rate tensor");
  }
}

}  // namespace detail

// SINR of user k when served by UAV m in slot n; every other UAV interferes.
inline double sinr(int k, int m, int n, const Trajectory& traj,
                   const PowerProfile& power, const Scenario& sc) {
  detail::require_consistent(traj, power, sc);
  if (k < 0 || k >= sc.user_count() || m < 0 || m >= sc.uavs || n < 0 || n >= sc.slots) {
    throw std::invalid_argument("sinr: index out of range");
  }
  const Vec2& w = sc.users[static_cast<std::size_t>(k)];
  double interference = 0.0;
  for (int j = 0; j < sc.uavs; ++j) {
    if (j == m) continue;
    interference += channel_gain(traj.q(j, n), w, sc) * power.p(j, n);
  }
  const double signal = channel_gain(traj.q(m, n), w, sc) * power.p(m, n);
  return signal / (interference + sc.sigma2_w);
}

inline double rate_from_sinr(double gamma) { return std::log2(1.0 + gamma); }

// Achievable rate of every (user, uav, slot) triple under the current
// trajectories and powers.
inline RateTensor rate_tensor(const Trajectory& traj, const PowerProfile& power,
                              const Scenario& sc) {
  detail::require_consistent(traj, power, sc);
  const int K = sc.user_count();
  const int M = sc.uavs;
  const int N = sc.slots;
  RateTensor rates(K, M, N);
  std::vector<double> hp(static_cast<std::size_t>(M));
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < K; ++k) {
      const Vec2& w = sc.users[static_cast<std::size_t>(k)];
      double total = 0.0;
      for (int m = 0; m < M; ++m) {
        hp[static_cast<std::size_t>(m)] = channel_gain(traj.q(m, n), w, sc) * power.p(m, n);
        total += hp[static_cast<std::size_t>(m)];
      }
      for (int m = 0; m < M; ++m) {
        const double signal = hp[static_cast<std::size_t>(m)];
        const double gamma = signal / (total - signal + sc.sigma2_w);
        rates.at(k, m, n) = rate_from_sinr(gamma);
      }
    }
  }
  return rates;
}

// Mean served rate of each user across the period: sum of the rates in the
// slots where some UAV serves the user, divided by the number of slots.
inline std::vector<double> per_user_mean_rates(const Schedule& schedule,
                                               const RateTensor& rates) {
  detail::require_consistent(schedule, rates);
  const int K = rates.users();
  const int M = rates.uavs();
  const int N = rates.slots();
  std::vector<double> sums(static_cast<std::size_t>(K), 0.0);
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) {
      const int k = schedule.serve(m, n);
      if (k == kNoUser) continue;
      if (k < 0 || k >= K) throw std::invalid_argument("schedule: user index out of range");
      sums[static_cast<std::size_t>(k)] += rates.at(k, m, n);
    }
  }
  for (double& s : sums) s /= static_cast<double>(N);
  return sums;
}

inline double objective_mean(const Schedule& schedule, const RateTensor& rates) {
  const std::vector<double> r = per_user_mean_rates(schedule, rates);
  double sum = 0.0;
  for (double v : r) sum += v;
  return sum;
}

inline double objective_min(const Schedule& schedule, const RateTensor& rates) {
  const std::vector<double> r = per_user_mean_rates(schedule, rates);
  return *std::min_element(r.begin(), r.end());
}

// Proportional-fair style surrogate: sum_k ln(eps + mean rate of user k).
inline double objective_logweighted(const Schedule& schedule, const RateTensor& rates,
                                    double eps = 0.01) {
  if (!(eps > 0.0)) throw std::invalid_argument("objective_logweighted: eps must be > 0");
  const std::vector<double> r = per_user_mean_rates(schedule, rates);
  double sum = 0.0;
  for (double v : r) sum += std::log(eps + v);
  return sum;
}

inline double objective_value(ObjectiveKind kind, const Schedule& schedule,
                              const RateTensor& rates, double eps = 0.01) {
  switch (kind) {
    case ObjectiveKind::Mean: return objective_mean(schedule, rates);
    case ObjectiveKind::MinRate: return objective_min(schedule, rates);
    case ObjectiveKind::LogWeighted: return objective_logweighted(schedule, rates, eps);
  }
  throw std::invalid_argument("objective_value: unknown kind");
}

// Checks every constraint of an operating point and reports each violation.
// Geometric slack of geom_tol (meters) absorbs float noise in speed/collision
// checks; power bounds use power_tol (watts). Infeasibility is data here, not
// an error: the report lists everything that is wrong.
inline FeasibilityReport check_feasibility(const Solution& sol, const Scenario& sc,
                                           double geom_tol = 1e-6,
                                           double power_tol = 1e-12) {
  detail::require_consistent(sol.traj, sol.power, sc);
  if (sol.schedule.uavs() != sc.uavs || sol.schedule.slots() != sc.slots) {
    throw std::invalid_argument("schedule shape does not match scenario");
  }
  const int K = sc.user_count();
  const int M = sc.uavs;
  const int N = sc.slots;
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      if (!is_finite(sol.traj.q(m, n))) {
        throw std::invalid_argument("trajectory has non-finite coordinates");
      }
      if (!std::isfinite(sol.power.p(m, n))) {
        throw std::invalid_argument("power profile has non-finite entries");
      }
    }
  }

  FeasibilityReport report;
  const double step_max = sc.vmax_mps * sc.dt();
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const int next = (n + 1 == N) ? 0 : n + 1;  // closing step wraps
      const double step = dist(sol.traj.q(m, n), sol.traj.q(m, next));
      if (step > step_max + geom_tol) {
        report.violations.push_back(
            {ConstraintKind::Speed, m, -1, n, step - step_max});
      }
    }
  }
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) {
      for (int j = m + 1; j < M; ++j) {
        const double d = dist(sol.traj.q(m, n), sol.traj.q(j, n));
        if (d < sc.dmin_m - geom_tol) {
          report.violations.push_back(
              {ConstraintKind::Collision, m, j, n, sc.dmin_m - d});
        }
      }
    }
  }
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const double p = sol.power.p(m, n);
      if (p < -power_tol) {
        report.violations.push_back({ConstraintKind::PowerBounds, m, -1, n, -p});
      } else if (p > sc.pmax_w + power_tol) {
        report.violations.push_back(
            {ConstraintKind::PowerBounds, m, -1, n, p - sc.pmax_w});
      }
    }
  }
  std::vector<int> served_by(static_cast<std::size_t>(K));
  for (int n = 0; n < N; ++n) {
    std::fill(served_by.begin(), served_by.end(), -1);
    for (int m = 0; m < M; ++m) {
      const int k = sol.schedule.serve(m, n);
      if (k == kNoUser) continue;
      if (k < 0 || k >= K) throw std::invalid_argument("schedule: user index out of range");
      if (served_by[static_cast<std::size_t>(k)] >= 0) {
        report.violations.push_back({ConstraintKind::DuplicateUser, m, k, n, 1.0});
      } else {
        served_by[static_cast<std::size_t>(k)] = m;
      }
    }
  }
  return report;
}

}  // namespace uavnet
