#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uavnet/model.hpp"
#include "uavnet/trajectory_opt.hpp"
#include "uavnet/types.hpp"

namespace uavnet {

// Gradient of the scalarized objective with respect to every transmit power.
inline Grid<double> power_gradient(const Schedule& schedule, const Trajectory& traj,
                                   const PowerProfile& power, const Scenario& sc,
                                   ObjectiveKind kind = ObjectiveKind::Mean,
                                   double eps = 0.01) {
  detail::require_consistent(traj, power, sc);
  const auto served = detail::served_pairs(schedule, sc.user_count());
  const std::vector<double> mean_rates = detail::served_mean_rates(served, traj, power, sc);
  const std::vector<double> weights = detail::user_weights(kind, mean_rates, eps);

  const int M = sc.uavs;
  const int N = sc.slots;
  const double inv_nlog2 = 1.0 / (static_cast<double>(N) * std::numbers::ln2);
  Grid<double> grad(M, N);
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
      const double total = h[static_cast<std::size_t>(m)] * power.p(m, n) + interf;
      const double c = u * inv_nlog2;
      for (int i = 0; i < M; ++i) {
        if (i == m) {
          grad(i, n) += c * h[static_cast<std::size_t>(i)] / total;
        } else {
          grad(i, n) += c * h[static_cast<std::size_t>(i)] * (1.0 / total - 1.0 / interf);
        }
      }
    }
  }
  return grad;
}

namespace detail {

// One slot's data, precomputed: for each served (uav m, user k), the channel
// gains from every UAV to user k.
struct SlotContext {
  std::vector<std::pair<int, int>> served;       // (m, k)
  std::vector<std::vector<double>> gains;        // gains[s][i]: UAV i -> user of pair s
  std::vector<double> weight;                    // chain-rule weight of pair s
  double sigma2 = 0.0;
  int uavs = 0;
};

inline double slot_value(const SlotContext& ctx, const std::vector<double>& p) {
  double value = 0.0;
  for (std::size_t s = 0; s < ctx.served.size(); ++s) {
    const int m = ctx.served[s].first;
    double interf = ctx.sigma2;
    for (int i = 0; i < ctx.uavs; ++i) {
      if (i != m) interf += ctx.gains[s][static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
    }
    const double signal = ctx.gains[s][static_cast<std::size_t>(m)] * p[static_cast<std::size_t>(m)];
    value += ctx.weight[s] * std::log2(1.0 + signal / interf);
  }
  return value;
}

inline void slot_gradient(const SlotContext& ctx, const std::vector<double>& p,
                          std::vector<double>& grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t s = 0; s < ctx.served.size(); ++s) {
    const int m = ctx.served[s].first;
    double interf = ctx.sigma2;
    for (int i = 0; i < ctx.uavs; ++i) {
      if (i != m) interf += ctx.gains[s][static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
    }
    const double total = ctx.gains[s][static_cast<std::size_t>(m)] * p[static_cast<std::size_t>(m)] + interf;
    const double c = ctx.weight[s] / std::numbers::ln2;
    for (int i = 0; i < ctx.uavs; ++i) {
      if (i == m) {
        grad[static_cast<std::size_t>(i)] += c * ctx.gains[s][static_cast<std::size_t>(i)] / total;
      } else {
        grad[static_cast<std::size_t>(i)] +=
            c * ctx.gains[s][static_cast<std::size_t>(i)] * (1.0 / total - 1.0 / interf);
      }
    }
  }
}

// Projected gradient ascent of one slot's weighted sum-rate over [0, pmax]^M.
inline std::vector<double> ascend_slot(const SlotContext& ctx, std::vector<double> p,
                                       double pmax, const AscentOptions& opt) {
  if (ctx.served.empty()) return p;  // constant objective: untouched
  const int M = ctx.uavs;
  std::vector<double> grad(static_cast<std::size_t>(M));
  std::vector<double> trial(static_cast<std::size_t>(M));
  double value = slot_value(ctx, p);
  double eta = opt.step0;
  for (int iter = 0; iter < opt.max_iters; ++iter) {
    slot_gradient(ctx, p, grad);
    bool accepted = false;
    bool backtracked = false;
    double trial_value = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      bool moved = false;
      for (int i = 0; i < M; ++i) {
        trial[static_cast<std::size_t>(i)] =
            std::clamp(p[static_cast<std::size_t>(i)] + eta * grad[static_cast<std::size_t>(i)], 0.0, pmax);
        if (trial[static_cast<std::size_t>(i)] != p[static_cast<std::size_t>(i)]) moved = true;
      }
      if (!moved) break;  // projected-stationary at this step size
      trial_value = slot_value(ctx, trial);
      if (trial_value > value) {
        accepted = true;
        break;
      }
      eta *= opt.backtrack;
      backtracked = true;
    }
    if (!accepted) break;
    const double gain = trial_value - value;
    p = trial;
    value = trial_value;
    if (backtracked) {
      if (gain < opt.tol_rel * std::max(1.0, std::abs(value))) break;
    } else {
      eta *= 2.0;
    }
  }
  return p;
}

}  // namespace detail

// Per-slot projected gradient ascent of the transmit powers inside [0, pmax].
// Slots decouple because the objective is a sum of per-slot terms (for min and
// log-weighted objectives the coupling is linearized with chain-rule weights
// taken at the start, and the result is only kept if it truly improves).
// Each slot is optimized from several starts: the incumbent column, all-pmax,
// and each single-UAV corner; the best column wins.
inline PowerProfile power_ascent(const Schedule& schedule, const Trajectory& traj,
                                 const PowerProfile& start, const Scenario& sc,
                                 const AscentOptions& opt,
                                 ObjectiveKind kind = ObjectiveKind::Mean,
                                 double eps = 0.01) {
  opt.validate();
  sc.validate();
  detail::require_consistent(traj, start, sc);
  const int M = sc.uavs;
  const int N = sc.slots;
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < N; ++n) {
      const double p = start.p(m, n);
      if (!(p >= 0.0) || !(p <= sc.pmax_w + 1e-12)) {
        throw std::invalid_argument("power_ascent: start outside the power box");
      }
    }
  }

  const auto served = detail::served_pairs(schedule, sc.user_count());
  const std::vector<double> mean_rates =
      detail::served_mean_rates(served, traj, start, sc);
  const std::vector<double> weights = detail::user_weights(kind, mean_rates, eps);

  PowerProfile out = start;
  const double inv_n = 1.0 / static_cast<double>(N);
  std::vector<double> column(static_cast<std::size_t>(M));
  for (int n = 0; n < N; ++n) {
    detail::SlotContext ctx;
    ctx.sigma2 = sc.sigma2_w;
    ctx.uavs = M;
    ctx.served = served[static_cast<std::size_t>(n)];
    ctx.gains.resize(ctx.served.size());
    ctx.weight.resize(ctx.served.size());
    for (std::size_t s = 0; s < ctx.served.size(); ++s) {
      const Vec2& w = sc.users[static_cast<std::size_t>(ctx.served[s].second)];
      ctx.gains[s].resize(static_cast<std::size_t>(M));
      for (int i = 0; i < M; ++i) ctx.gains[s][static_cast<std::size_t>(i)] = channel_gain(traj.q(i, n), w, sc);
      ctx.weight[s] = weights[static_cast<std::size_t>(ctx.served[s].second)] * inv_n;
    }
    if (ctx.served.empty()) continue;  // nothing served: leave the column alone

    // Multi-start: incumbent column, all-pmax, and one-hot corners.
    std::vector<std::vector<double>> starts;
    for (int i = 0; i < M; ++i) column[static_cast<std::size_t>(i)] = start.p(i, n);
    starts.push_back(column);
    starts.push_back(std::vector<double>(static_cast<std::size_t>(M), sc.pmax_w));
    for (int hot = 0; hot < M && M > 1; ++hot) {
      std::vector<double> corner(static_cast<std::size_t>(M), 0.0);
      corner[static_cast<std::size_t>(hot)] = sc.pmax_w;
      starts.push_back(std::move(corner));
    }

    std::vector<double> best_col = starts[0];
    double best_val = detail::slot_value(ctx, best_col);
    for (const std::vector<double>& s0 : starts) {
      const std::vector<double> cand = detail::ascend_slot(ctx, s0, sc.pmax_w, opt);
      const double val = detail::slot_value(ctx, cand);
      if (val > best_val) {
        best_val = val;
        best_col = cand;
      }
    }
    for (int i = 0; i < M; ++i) out.p(i, n) = best_col[static_cast<std::size_t>(i)];
  }

  // Keep the result only if the true objective did not regress (the per-slot
  // view is a linearization for non-mean objectives, and even for the mean
  // rounding could nick off an ulp).
  const double before = detail::scalarize(kind, mean_rates, eps);
  const double after =
      detail::scalarize(kind, detail::served_mean_rates(served, traj, out, sc), eps);
  if (after >= before) return out;
  return start;
}

}  // namespace uavnet
