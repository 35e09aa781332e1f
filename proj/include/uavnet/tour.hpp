#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "uavnet/rng.hpp"
#include "uavnet/vec2.hpp"

namespace uavnet {

struct Tour {
  std::vector<int> order;  // visiting order, a permutation of [0, n)
  double length = 0.0;     // closed-tour length
};

struct GaParams {
  int population = 60;
  int generations = 300;
  int elite = 2;
  double crossover_rate = 0.9;
  double mutation_rate = 0.25;
  int tournament = 3;
  std::uint64_t seed = 1;

  void validate() const {
    auto fail = [](const char* msg) { throw std::invalid_argument(std::string("GaParams: ") + msg); };
    if (population < 2) fail("population must be >= 2");
    if (generations < 1) fail("generations must be >= 1");
    if (elite < 0 || elite >= population) fail("elite must be in [0, population)");
    if (crossover_rate < 0.0 || crossover_rate > 1.0) fail("crossover_rate must be in [0, 1]");
    if (mutation_rate < 0.0 || mutation_rate > 1.0) fail("mutation_rate must be in [0, 1]");
    if (tournament < 1) fail("tournament must be >= 1");
  }
};

namespace detail {

inline void require_permutation(const std::vector<int>& order, std::size_t n) {
  if (order.size() != n) throw std::invalid_argument("tour order has wrong size");
  std::vector<bool> seen(n, false);
  for (int v : order) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || seen[static_cast<std::size_t>(v)]) {
      throw std::invalid_argument("tour order is not a permutation");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

}  // namespace detail

// Length of the closed tour visiting points in `order` and returning to the
// start.
inline double tour_length(const std::vector<Vec2>& points, const std::vector<int>& order) {
  detail::require_permutation(order, points.size());
  if (points.size() < 2) return 0.0;
  double len = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t j = (i + 1 == order.size()) ? 0 : i + 1;
    len += dist(points[static_cast<std::size_t>(order[i])],
                points[static_cast<std::size_t>(order[j])]);
  }
  return len;
}

// Greedy seed: start at point 0, repeatedly hop to the nearest unvisited point
// (ties to the lowest index).
inline std::vector<int> nearest_neighbor_order(const std::vector<Vec2>& points) {
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("nearest_neighbor_order: no points");
  std::vector<int> order;
  order.reserve(n);
  std::vector<bool> visited(n, false);
  std::size_t cur = 0;
  order.push_back(0);
  visited[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    double best_d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (visited[i]) continue;
      const double d = dist_sq(points[cur], points[i]);
      if (best == n || d < best_d) {
        best = i;
        best_d = d;
      }
    }
    visited[best] = true;
    order.push_back(static_cast<int>(best));
    cur = best;
  }
  return order;
}

// Exhaustive optimum for small n (reference implementation; used to gauge the
// GA). Fixes the first city to 0, so it explores (n-1)! orders.
inline Tour brute_force_tour(const std::vector<Vec2>& points) {
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("brute_force_tour: no points");
  if (n > 10) throw std::invalid_argument("brute_force_tour: too many points");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Tour best{perm, tour_length(points, perm)};
  if (n < 4) return best;
  // Permute positions 1..n-1 in lexicographic order; first optimum wins ties.
  while (std::next_permutation(perm.begin() + 1, perm.end())) {
    const double len = tour_length(points, perm);
    if (len < best.length) {
      best.order = perm;
      best.length = len;
    }
  }
  return best;
}

namespace detail {

// Order crossover (OX): child copies a[i..j] and fills the rest with b's
// cities in b's order, starting after j.
inline std::vector<int> ox_crossover(const std::vector<int>& a, const std::vector<int>& b,
                                     Rng& rng) {
  const std::size_t n = a.size();
  std::size_t i = rng.next_below(n);
  std::size_t j = rng.next_below(n);
  if (i > j) std::swap(i, j);
  std::vector<int> child(n, -1);
  std::vector<bool> used(n, false);
  for (std::size_t t = i; t <= j; ++t) {
    child[t] = a[t];
    used[static_cast<std::size_t>(a[t])] = true;
  }
  std::size_t fill = (j + 1) % n;
  for (std::size_t t = 0; t < n; ++t) {
    const int city = b[(j + 1 + t) % n];
    if (used[static_cast<std::size_t>(city)]) continue;
    child[fill] = city;
    used[static_cast<std::size_t>(city)] = true;
    fill = (fill + 1) % n;
  }
  return child;
}

inline std::size_t tournament_select(const std::vector<double>& lengths, int rounds,
                                     Rng& rng) {
  std::size_t best = rng.next_below(lengths.size());
  for (int t = 1; t < rounds; ++t) {
    const std::size_t c = rng.next_below(lengths.size());
    if (lengths[c] < lengths[best]) best = c;
  }
  return best;
}

}  // namespace detail

// Generational GA over closed tours: nearest-neighbor seeded population,
// elitism, tournament selection, OX crossover and segment-reversal mutation.
// `best_history` (optional) records the best length after seeding and after
// every generation; it is non-increasing.
inline Tour ga_tour(const std::vector<Vec2>& points, const GaParams& params,
                    std::vector<double>* best_history = nullptr) {
  params.validate();
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("ga_tour: no points");
  if (n <= 3) {
    // Any order is optimal for up to 3 points.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Tour t{order, tour_length(points, order)};
    if (best_history) best_history->push_back(t.length);
    return t;
  }

  Rng rng(params.seed);
  const std::size_t pop_size = static_cast<std::size_t>(params.population);
  std::vector<std::vector<int>> population(pop_size);
  population[0] = nearest_neighbor_order(points);
  std::vector<int> base(n);
  std::iota(base.begin(), base.end(), 0);
  for (std::size_t i = 1; i < pop_size; ++i) {
    population[i] = base;
    rng.shuffle(population[i]);
  }
  std::vector<double> lengths(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) lengths[i] = tour_length(points, population[i]);

  std::size_t best_i = 0;
  for (std::size_t i = 1; i < pop_size; ++i) {
    if (lengths[i] < lengths[best_i]) best_i = i;
  }
  Tour best{population[best_i], lengths[best_i]};
  if (best_history) best_history->push_back(best.length);

  std::vector<std::size_t> rank(pop_size);
  for (int gen = 0; gen < params.generations; ++gen) {
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });

    std::vector<std::vector<int>> next;
    next.reserve(pop_size);
    for (int e = 0; e < params.elite; ++e) {
      next.push_back(population[rank[static_cast<std::size_t>(e)]]);
    }
    while (next.size() < pop_size) {
      const std::size_t pa = detail::tournament_select(lengths, params.tournament, rng);
      const std::size_t pb = detail::tournament_select(lengths, params.tournament, rng);
      std::vector<int> child;
      if (rng.next_double() < params.crossover_rate) {
        child = detail::ox_crossover(population[pa], population[pb], rng);
      } else {
        child = population[pa];
      }
      if (rng.next_double() < params.mutation_rate) {
        std::size_t i = rng.next_below(n);
        std::size_t j = rng.next_below(n);
        if (i > j) std::swap(i, j);
        std::reverse(child.begin() + static_cast<std::ptrdiff_t>(i),
                     child.begin() + static_cast<std::ptrdiff_t>(j) + 1);
      }
      next.push_back(std::move(child));
    }
    population = std::move(next);
    for (std::size_t i = 0; i < pop_size; ++i) lengths[i] = tour_length(points, population[i]);
    for (std::size_t i = 0; i < pop_size; ++i) {
      if (lengths[i] < best.length) {
        best.order = population[i];
        best.length = lengths[i];
      }
    }
    if (best_history) best_history->push_back(best.length);
  }
  return best;
}

// Places `slots` waypoints at equal arc-length spacing along the closed
// polyline through `points` in visiting order, starting at the first point of
// the order. Degenerate inputs (no points, one point, zero-length tour) hover:
// every waypoint is the single point, or `fallback` when there are no points.
inline std::vector<Vec2> discretize_tour(const std::vector<Vec2>& points,
                                         const std::vector<int>& order,
                                         const Vec2& fallback, int slots) {
  if (slots < 1) throw std::invalid_argument("discretize_tour: slots must be >= 1");
  detail::require_permutation(order, points.size());
  const std::size_t n = points.size();
  if (n == 0) return std::vector<Vec2>(static_cast<std::size_t>(slots), fallback);

  std::vector<Vec2> route(n);
  for (std::size_t i = 0; i < n; ++i) route[i] = points[static_cast<std::size_t>(order[i])];

  std::vector<double> seg_len(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    seg_len[i] = dist(route[i], route[(i + 1) % n]);
    total += seg_len[i];
  }
  if (total == 0.0) return std::vector<Vec2>(static_cast<std::size_t>(slots), route[0]);

  std::vector<Vec2> out(static_cast<std::size_t>(slots));
  std::size_t seg = 0;
  double seg_start = 0.0;
  for (int k = 0; k < slots; ++k) {
    const double s = total * static_cast<double>(k) / static_cast<double>(slots);
    while (seg + 1 < n && s >= seg_start + seg_len[seg]) {
      seg_start += seg_len[seg];
      ++seg;
    }
    const Vec2& a = route[seg];
    const Vec2& b = route[(seg + 1) % n];
    const double t = seg_len[seg] > 0.0 ? (s - seg_start) / seg_len[seg] : 0.0;
    out[static_cast<std::size_t>(k)] = a + t * (b - a);
  }
  return out;
}

// Shrinks a cyclic waypoint row about its centroid until every step (including
// the closing one) fits within vmax * dt. Feasible rows are returned unchanged.
inline std::vector<Vec2> scale_to_feasible(std::vector<Vec2> row, double vmax, double dt) {
  if (row.empty()) throw std::invalid_argument("scale_to_feasible: empty row");
  if (!(vmax > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("scale_to_feasible: vmax and dt must be positive");
  }
  const double cap = vmax * dt;
  double max_step = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    max_step = std::max(max_step, dist(row[i], row[(i + 1) % row.size()]));
  }
  if (max_step <= cap) return row;

  Vec2 sum{};
  for (const Vec2& p : row) sum += p;
  const Vec2 centroid = sum * (1.0 / static_cast<double>(row.size()));
  const double s = cap / max_step;
  for (Vec2& p : row) p = centroid + s * (p - centroid);
  return row;
}

}  // namespace uavnet
