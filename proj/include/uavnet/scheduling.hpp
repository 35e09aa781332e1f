#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "uavnet/hungarian.hpp"
#include "uavnet/model.hpp"
#include "uavnet/types.hpp"

namespace uavnet {

namespace detail {

// Fills one schedule column with the lexicographically smallest optimal
// matching for the given (uav x user) weight matrix: the optimal value is
// computed once, then each UAV in turn takes the lowest-index user (idling
// last) that still allows completing an optimal matching. `tol` absorbs float
// noise between separately computed optima.
inline void lex_smallest_optimal_column(const Grid<double>& w, Schedule& schedule, int slot) {
  const int M = w.rows();
  const int K = w.cols();
  const double best = max_weight_assignment(w).value;
  const double tol = 1e-12 * std::max(1.0, std::abs(best));

  std::vector<char> used(static_cast<std::size_t>(K), 0);
  double fixed_sum = 0.0;
  for (int m = 0; m < M; ++m) {
    int pick = kNoUser;
    for (int cand = 0; cand <= K; ++cand) {
      const bool idle = (cand == K);
      if (!idle && used[static_cast<std::size_t>(cand)]) continue;
      // Optimal completion over the remaining UAVs and users.
      std::vector<int> free_cols;
      for (int k = 0; k < K; ++k) {
        if (!used[static_cast<std::size_t>(k)] && (idle || k != cand)) free_cols.push_back(k);
      }
      Grid<double> sub(M - m - 1, static_cast<int>(free_cols.size()));
      for (int r = 0; r < sub.rows(); ++r) {
        for (int c = 0; c < sub.cols(); ++c) {
          sub(r, c) = w(m + 1 + r, free_cols[static_cast<std::size_t>(c)]);
        }
      }
      const double rest = (sub.rows() == 0 || sub.cols() == 0)
                              ? 0.0
                              : max_weight_assignment(sub).value;
      const double achievable = fixed_sum + (idle ? 0.0 : w(m, cand)) + rest;
      if (achievable >= best - tol) {
        pick = idle ? kNoUser : cand;
        break;
      }
    }
    if (pick != kNoUser) {
      used[static_cast<std::size_t>(pick)] = 1;
      fixed_sum += w(m, pick);
    }
    schedule.serve(m, slot) = pick;
  }
}

inline Grid<double> slot_weights(const RateTensor& rates, int n,
                                 const std::vector<double>* user_weights) {
  Grid<double> w(rates.uavs(), rates.users());
  for (int m = 0; m < rates.uavs(); ++m) {
    for (int k = 0; k < rates.users(); ++k) {
      const double u = user_weights ? (*user_weights)[static_cast<std::size_t>(k)] : 1.0;
      w(m, k) = u * rates.at(k, m, n);
    }
  }
  return w;
}

inline Schedule weighted_optimal_schedule(const RateTensor& rates,
                                          const std::vector<double>* user_weights) {
  Schedule schedule(rates.uavs(), rates.slots());
  for (int n = 0; n < rates.slots(); ++n) {
    lex_smallest_optimal_column(slot_weights(rates, n, user_weights), schedule, n);
  }
  return schedule;
}

}  // namespace detail

// Per-slot maximum-weight matching of UAVs to users; exact for the mean-rate
// objective because slots decouple. Ties break to the lexicographically
// smallest schedule (UAV 0 first; lower user index first; idle last).
inline Schedule optimal_schedule(const RateTensor& rates) {
  return detail::weighted_optimal_schedule(rates, nullptr);
}

// Exhaustive per-slot enumeration; reference implementation for small
// instances only.
inline Schedule brute_force_schedule(const RateTensor& rates) {
  const int K = rates.users();
  const int M = rates.uavs();
  const int N = rates.slots();
  if (K > 5 || M > 4 || N > 6) {
    throw std::invalid_argument("brute_force_schedule: instance too large");
  }
  Schedule schedule(M, N);
  std::vector<int> cur(static_cast<std::size_t>(M), kNoUser);
  std::vector<int> best(static_cast<std::size_t>(M), kNoUser);
  std::vector<char> used(static_cast<std::size_t>(K), 0);
  for (int n = 0; n < N; ++n) {
    double best_sum = -1.0;
    // Enumerates candidates in lexicographic order (user 0, 1, ..., idle), so
    // the first optimum found is the lexicographically smallest one.
    auto enumerate = [&](auto&& self, int m, double sum) -> void {
      if (m == M) {
        if (sum > best_sum) {
          best_sum = sum;
          best = cur;
        }
        return;
      }
      for (int k = 0; k < K; ++k) {
        if (used[static_cast<std::size_t>(k)]) continue;
        used[static_cast<std::size_t>(k)] = 1;
        cur[static_cast<std::size_t>(m)] = k;
        self(self, m + 1, sum + rates.at(k, m, n));
        used[static_cast<std::size_t>(k)] = 0;
      }
      cur[static_cast<std::size_t>(m)] = kNoUser;
      self(self, m + 1, sum);
    };
    enumerate(enumerate, 0, 0.0);
    for (int m = 0; m < M; ++m) schedule.serve(m, n) = best[static_cast<std::size_t>(m)];
  }
  return schedule;
}

namespace detail {

// One forward pass over the slots, matching each slot greedily with user
// weights that favor users whose accumulated rate is still low. Used as a
// candidate generator for the min-rate and log-weighted objectives.
inline Schedule greedy_fairness_schedule(const RateTensor& rates, double eps) {
  const int K = rates.users();
  const int N = rates.slots();
  Schedule schedule(rates.uavs(), N);
  std::vector<double> served(static_cast<std::size_t>(K), 0.0);
  std::vector<double> weights(static_cast<std::size_t>(K), 0.0);
  for (int n = 0; n < N; ++n) {
    for (int k = 0; k < K; ++k) {
      weights[static_cast<std::size_t>(k)] =
          1.0 / (eps + served[static_cast<std::size_t>(k)] / static_cast<double>(N));
    }
    lex_smallest_optimal_column(slot_weights(rates, n, &weights), schedule, n);
    for (int m = 0; m < rates.uavs(); ++m) {
      const int k = schedule.serve(m, n);
      if (k != kNoUser) served[static_cast<std::size_t>(k)] += rates.at(k, m, n);
    }
  }
  return schedule;
}

}  // namespace detail

// Best schedule for the requested objective. Mean is solved exactly; min-rate
// and log-weighted use fairness-reweighted matchings (greedy pass plus
// fixed-point reweighting) and never return anything worse than `incumbent`.
inline Schedule optimize_schedule(ObjectiveKind kind, const RateTensor& rates,
                                  double eps = 0.01, const Schedule* incumbent = nullptr) {
  if (incumbent) detail::require_consistent(*incumbent, rates);

  std::vector<Schedule> candidates;
  if (incumbent) candidates.push_back(*incumbent);
  candidates.push_back(optimal_schedule(rates));
  if (kind != ObjectiveKind::Mean) {
    candidates.push_back(detail::greedy_fairness_schedule(rates, eps));
  }

  std::size_t best_i = 0;
  double best_obj = objective_value(kind, candidates[0], rates, eps);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double obj = objective_value(kind, candidates[i], rates, eps);
    if (obj > best_obj) {
      best_obj = obj;
      best_i = i;
    }
  }
  Schedule best = candidates[best_i];

  if (kind != ObjectiveKind::Mean) {
    // Fixed-point polish: rematch all slots under weights from the current
    // per-user rates; keep iterating only while it strictly improves.
    std::vector<double> weights(static_cast<std::size_t>(rates.users()));
    for (int round = 0; round < 10; ++round) {
      const std::vector<double> mean_rates = per_user_mean_rates(best, rates);
      for (std::size_t k = 0; k < weights.size(); ++k) {
        weights[k] = 1.0 / (eps + mean_rates[k]);
      }
      const Schedule cand = detail::weighted_optimal_schedule(rates, &weights);
      const double obj = objective_value(kind, cand, rates, eps);
      if (obj > best_obj + 1e-12 * std::max(1.0, std::abs(best_obj))) {
        best_obj = obj;
        best = cand;
      } else {
        break;
      }
    }
  }
  return best;
}

}  // namespace uavnet
