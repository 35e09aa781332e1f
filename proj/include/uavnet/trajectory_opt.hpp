#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uavnet/model.hpp"
#include "uavnet/types.hpp"

namespace uavnet {

// Shared knob set for the projected/penalized ascent loops. Trajectory and
// power stages use different defaults (see the factories below).
struct AscentOptions {
  int max_iters = 500;
  double step0 = 1.0;
  double backtrack = 0.5;
  double penalty0 = 10.0;        // initial weight of the quadratic penalties
  double penalty_growth = 5.0;   // multiplied in every penalty_interval iters
  int penalty_interval = 50;
  double tol_rel = 1e-5;         // stop when a backtracked step gains less
  double grad_tol = 1e-10;       // stop when the gradient is numerically zero

  void validate() const {
    auto fail = [](const char* msg) {
      throw std::invalid_argument(std::string("AscentOptions: ") + msg);
    };
    if (max_iters < 1) fail("max_iters must be >= 1");
    if (!(step0 > 0.0)) fail("step0 must be positive");
    if (!(backtrack > 0.0) || !(backtrack < 1.0)) fail("backtrack must be in (0, 1)");
    if (penalty0 < 0.0) fail("penalty0 must be non-negative");
    if (!(penalty_growth >= 1.0)) fail("penalty_growth must be >= 1");
    if (penalty_interval < 1) fail("penalty_interval must be >= 1");
    if (tol_rel < 0.0) fail("tol_rel must be non-negative");
    if (grad_tol < 0.0) fail("grad_tol must be non-negative");
  }
};

inline AscentOptions trajectory_ascent_defaults() { return AscentOptions{}; }

// Diagnostics of one ascent run: one entry for the start plus one per accepted
// step. `penalized` is objective - mu * penalty with the mu in force when the
// step was accepted; it increases strictly within one `epoch` (mu escalation
// resets the scale).
struct AscentTrace {
  std::vector<double> objective;
  std::vector<double> penalized;
  std::vector<int> epoch;
};

inline AscentOptions power_ascent_defaults(const Scenario& sc) {
  AscentOptions o;
  o.max_iters = 300;
  o.step0 = sc.pmax_w / 10.0;
  o.tol_rel = 1e-6;
  return o;
}

namespace detail {

// (uav, user) pairs actually served in each slot; fixed for a whole ascent.
inline std::vector<std::vector<std::pair<int, int>>> served_pairs(const Schedule& schedule,
                                                                  int users) {
  std::vector<std::vector<std::pair<int, int>>> served(
      static_cast<std::size_t>(schedule.slots()));
  for (int n = 0; n < schedule.slots(); ++n) {
    for (int m = 0; m < schedule.uavs(); ++m) {
      const int k = schedule.serve(m, n);
      if (k == kNoUser) continue;
      if (k < 0 || k >= users) {
        throw std::invalid_argument("schedule: user index out of range");
      }
      served[static_cast<std::size_t>(n)].push_back({m, k});
    }
  }
  return served;
}

inline std::vector<double> served_mean_rates(
    const std::vector<std::vector<std::pair<int, int>>>& served, const Trajectory& traj,
    const PowerProfile& power, const Scenario& sc) {
  const int M = sc.uavs;
  const int N = sc.slots;
  std::vector<double> sums(static_cast<std::size_t>(sc.user_count()), 0.0);
  std::vector<double> hp(static_cast<std::size_t>(M));
  for (int n = 0; n < N; ++n) {
    for (const auto& [m, k] : served[static_cast<std::size_t>(n)]) {
      const Vec2& w = sc.users[static_cast<std::size_t>(k)];
      double total = 0.0;
      for (int i = 0; i < M; ++i) {
        hp[static_cast<std::size_t>(i)] = channel_gain(traj.q(i, n), w, sc) * power.p(i, n);
        total += hp[static_cast<std::size_t>(i)];
      }
      const double signal = hp[static_cast<std::size_t>(m)];
      sums[static_cast<std::size_t>(k)] += std::log2(1.0 + signal / (total - signal + sc.sigma2_w));
    }
  }
  for (double& s : sums) s /= static_cast<double>(N);
  return sums;
}

inline double scalarize(ObjectiveKind kind, const std::vector<double>& mean_rates,
                        double eps) {
  switch (kind) {
    case ObjectiveKind::Mean: {
      double sum = 0.0;
      for (double v : mean_rates) sum += v;
      return sum;
    }
    case ObjectiveKind::MinRate:
      return *std::min_element(mean_rates.begin(), mean_rates.end());
    case ObjectiveKind::LogWeighted: {
      double sum = 0.0;
      for (double v : mean_rates) sum += std::log(eps + v);
      return sum;
    }
  }
  throw std::invalid_argument("scalarize: unknown kind");
}

// dG/d(mean rate of user k) at the current point; the chain-rule weight for
// each user's served-rate terms.
inline std::vector<double> user_weights(ObjectiveKind kind,
                                        const std::vector<double>& mean_rates, double eps) {
  std::vector<double> w(mean_rates.size(), 0.0);
  switch (kind) {
    case ObjectiveKind::Mean:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case ObjectiveKind::MinRate: {
      // Subgradient: all weight on the first worst user.
      std::size_t arg = 0;
      for (std::size_t k = 1; k < mean_rates.size(); ++k) {
        if (mean_rates[k] < mean_rates[arg]) arg = k;
      }
      w[arg] = 1.0;
      break;
    }
    case ObjectiveKind::LogWeighted:
      for (std::size_t k = 0; k < w.size(); ++k) w[k] = 1.0 / (eps + mean_rates[k]);
      break;
  }
  return w;
}

// Sum of squared constraint excesses: speed steps above vmax*dt (closing step
// included) and pairwise separations below dmin.
inline double trajectory_penalty(const Trajectory& traj, const Scenario& sc) {
  const int M = traj.uavs();
  const int N = traj.slots();
  const double cap = sc.vmax_mps * sc.dt();
  double pen = 0.0;
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const int next = (n + 1 == N) ? 0 : n + 1;
      const double over = dist(traj.q(m, n), traj.q(m, next)) - cap;
      if (over > 0.0) pen += over * over;
    }
  }
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) {
      for (int j = m + 1; j < M; ++j) {
        const double under = sc.dmin_m - dist(traj.q(m, n), traj.q(j, n));
        if (under > 0.0) pen += under * under;
      }
    }
  }
  return pen;
}

// Largest speed excess / separation shortfall, for cheap feasibility gating.
inline double trajectory_worst_violation(const Trajectory& traj, const Scenario& sc) {
  const int M = traj.uavs();
  const int N = traj.slots();
  const double cap = sc.vmax_mps * sc.dt();
  double worst = 0.0;
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const int next = (n + 1 == N) ? 0 : n + 1;
      worst = std::max(worst, dist(traj.q(m, n), traj.q(m, next)) - cap);
    }
  }
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) {
      for (int j = m + 1; j < M; ++j) {
        worst = std::max(worst, sc.dmin_m - dist(traj.q(m, n), traj.q(j, n)));
      }
    }
  }
  return worst;
}

inline void add_penalty_gradient(const Trajectory& traj, const Scenario& sc, double mu,
                                 Grid<Vec2>& grad) {
  if (mu == 0.0) return;
  const int M = traj.uavs();
  const int N = traj.slots();
  const double cap = sc.vmax_mps * sc.dt();
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const int next = (n + 1 == N) ? 0 : n + 1;
      const Vec2 v = traj.q(m, next) - traj.q(m, n);
      const double len = norm(v);
      const double over = len - cap;
      if (over <= 0.0 || len == 0.0) continue;
      // Ascent on G - mu * pen: subtract mu * d(pen)/dq.
      const Vec2 dir = v * (1.0 / len);
      const Vec2 push = (2.0 * mu * over) * dir;
      grad(m, next) -= push;
      grad(m, n) += push;
    }
  }
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) {
      for (int j = m + 1; j < M; ++j) {
        const Vec2 v = traj.q(m, n) - traj.q(j, n);
        const double d = norm(v);
        const double under = sc.dmin_m - d;
        if (under <= 0.0) continue;
        // Degenerate coincident positions get a fixed separation direction.
        const Vec2 dir = d > 0.0 ? v * (1.0 / d) : Vec2{1.0, 0.0};
        const Vec2 push = (2.0 * mu * under) * dir;
        grad(m, n) += push;
        grad(j, n) -= push;
      }
    }
  }
}

// Gradient of the scalarized objective with the user weights evaluated at the
// current point, plus (optionally) the penalty gradient.
inline Grid<Vec2> trajectory_objective_gradient(
    const std::vector<std::vector<std::pair<int, int>>>& served, const Trajectory& traj,
    const PowerProfile& power, const Scenario& sc, const std::vector<double>& weights) {
  const int M = sc.uavs;
  const int N = sc.slots;
  const double inv_nlog2 = 1.0 / (static_cast<double>(N) * std::numbers::ln2);
  Grid<Vec2> grad(M, N);
  std::vector<double> h(static_cast<std::size_t>(M));
  for (int n = 0; n < N; ++n) {
    for (const auto& [m, k] : served[static_cast<std::size_t>(n)]) {
      const double u = weights[static_cast<std::size_t>(k)];
      if (u == 0.0) continue;
      const Vec2& w = sc.users[static_cast<std::size_t>(k)];
      double interf = sc.sigma2_w;
      for (int i = 0; i < M; ++i) {
        h[static_cast<std::size_t>(i)] = channel_gain(traj.q(i, n), w, sc);
        if (i != m) interf += h[static_cast<std::size_t>(i)] * power.p(i, n);
      }
      const double signal = h[static_cast<std::size_t>(m)] * power.p(m, n);
      const double total = signal + interf;
      const double c = u * inv_nlog2;
      for (int i = 0; i < M; ++i) {
        // dh/dq = -(2 h^2 / rho0) (q - w)
        const Vec2 dh = (-2.0 * h[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)] /
                         sc.rho0) *
                        (traj.q(i, n) - w);
        if (i == m) {
          grad(i, n) += (c * power.p(i, n) / total) * dh;
        } else {
          grad(i, n) += (c * power.p(i, n) * (1.0 / total - 1.0 / interf)) * dh;
        }
      }
    }
  }
  return grad;
}

}  // namespace detail

// Gradient of the scalarized objective with respect to every waypoint.
inline Grid<Vec2> trajectory_gradient(const Schedule& schedule, const Trajectory& traj,
                                      const PowerProfile& power, const Scenario& sc,
                                      ObjectiveKind kind = ObjectiveKind::Mean,
                                      double eps = 0.01) {
  detail::require_consistent(traj, power, sc);
  const auto served = detail::served_pairs(schedule, sc.user_count());
  const std::vector<double> mean_rates = detail::served_mean_rates(served, traj, power, sc);
  const std::vector<double> weights = detail::user_weights(kind, mean_rates, eps);
  return detail::trajectory_objective_gradient(served, traj, power, sc, weights);
}

// Penalized gradient ascent over all waypoints with backtracking line search.
// Speed and collision constraints enter as quadratic penalties whose weight
// escalates on a fixed schedule; the best feasible iterate seen (including the
// start, when it is feasible) is returned, so a feasible start can only
// improve. Throws SolverError if no feasible iterate was ever observed.
inline Trajectory trajectory_ascent(const Schedule& schedule, const Trajectory& start,
                                    const PowerProfile& power, const Scenario& sc,
                                    const AscentOptions& opt,
                                    ObjectiveKind kind = ObjectiveKind::Mean,
                                    double eps = 0.01, AscentTrace* trace = nullptr) {
  opt.validate();
  sc.validate();
  detail::require_consistent(start, power, sc);
  if (!(eps > 0.0)) throw std::invalid_argument("trajectory_ascent: eps must be > 0");
  const double geom_tol = 1e-6;
  {
    // The start must respect the speed budget; collisions are repairable by
    // the penalty, so they are tolerated here.
    const double cap = sc.vmax_mps * sc.dt();
    for (int m = 0; m < start.uavs(); ++m) {
      for (int n = 0; n < start.slots(); ++n) {
        const int next = (n + 1 == start.slots()) ? 0 : n + 1;
        if (dist(start.q(m, n), start.q(m, next)) > cap + geom_tol) {
          throw std::invalid_argument("trajectory_ascent: start violates the speed cap");
        }
      }
    }
  }

  const auto served = detail::served_pairs(schedule, sc.user_count());
  auto objective_of = [&](const Trajectory& t) {
    return detail::scalarize(kind, detail::served_mean_rates(served, t, power, sc), eps);
  };

  Trajectory cur = start;
  double cur_obj = objective_of(cur);
  double cur_pen = detail::trajectory_penalty(cur, sc);
  double mu = opt.penalty0;

  Trajectory best = start;
  double best_obj = -std::numeric_limits<double>::infinity();
  if (detail::trajectory_worst_violation(start, sc) <= geom_tol) best_obj = cur_obj;
  int epoch = 0;
  if (trace) {
    trace->objective.push_back(cur_obj);
    trace->penalized.push_back(cur_obj - mu * cur_pen);
    trace->epoch.push_back(epoch);
  }

  double eta = opt.step0;
  const int M = sc.uavs;
  const int N = sc.slots;
  Trajectory trial(M, N);
  for (int iter = 1; iter <= opt.max_iters; ++iter) {
    if (iter % opt.penalty_interval == 0) {
      mu *= opt.penalty_growth;
      ++epoch;
    }

    const std::vector<double> mean_rates =
        detail::served_mean_rates(served, cur, power, sc);
    const std::vector<double> weights = detail::user_weights(kind, mean_rates, eps);
    Grid<Vec2> grad =
        detail::trajectory_objective_gradient(served, cur, power, sc, weights);
    detail::add_penalty_gradient(cur, sc, mu, grad);

    double grad_max = 0.0;
    double grad_sq = 0.0;
    for (const Vec2& g : grad) {
      grad_max = std::max(grad_max, norm(g));
      grad_sq += norm_sq(g);
    }
    if (grad_max < opt.grad_tol) break;

    const double phi = cur_obj - mu * cur_pen;
    bool accepted = false;
    bool backtracked = false;
    double trial_obj = 0.0;
    double trial_pen = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      for (int m = 0; m < M; ++m) {
        for (int n = 0; n < N; ++n) trial.q(m, n) = cur.q(m, n) + eta * grad(m, n);
      }
      trial_obj = objective_of(trial);
      trial_pen = detail::trajectory_penalty(trial, sc);
      if (trial_obj - mu * trial_pen > phi + 1e-4 * eta * grad_sq) {
        accepted = true;
        break;
      }
      eta *= opt.backtrack;
      backtracked = true;
    }
    if (!accepted) break;

    const double gain = (trial_obj - mu * trial_pen) - phi;
    cur = trial;
    cur_obj = trial_obj;
    cur_pen = trial_pen;
    if (trace) {
      trace->objective.push_back(cur_obj);
      trace->penalized.push_back(cur_obj - mu * cur_pen);
      trace->epoch.push_back(epoch);
    }
    if (cur_obj > best_obj &&
        detail::trajectory_worst_violation(cur, sc) <= geom_tol) {
      best = cur;
      best_obj = cur_obj;
    }
    if (backtracked) {
      // The step size is at its natural scale; a tiny gain now means the
      // penalized objective has flattened out.
      if (gain < opt.tol_rel * std::max(1.0, std::abs(phi))) break;
    } else {
      eta *= 2.0;  // clean accept: probe a larger step next time
    }
  }

  if (best_obj == -std::numeric_limits<double>::infinity()) {
    Solution probe;
    probe.schedule = schedule;
    probe.traj = cur;
    probe.power = power;
    throw SolverError("trajectory_ascent: no feasible iterate found",
                      check_feasibility(probe, sc, geom_tol));
  }
  return best;
}

}  // namespace uavnet
