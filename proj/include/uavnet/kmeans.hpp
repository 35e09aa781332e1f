#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "uavnet/rng.hpp"
#include "uavnet/types.hpp"
#include "uavnet/vec2.hpp"

namespace uavnet {

struct Clustering {
  std::vector<int> assignment;  // cluster index per point
  std::vector<Vec2> centroids;
  double sse = 0.0;
};

inline double clustering_sse(const std::vector<Vec2>& points,
                             const std::vector<int>& assignment,
                             const std::vector<Vec2>& centroids) {
  if (assignment.size() != points.size()) {
    throw std::invalid_argument("clustering_sse: assignment size mismatch");
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int c = assignment[i];
    if (c < 0 || static_cast<std::size_t>(c) >= centroids.size()) {
      throw std::invalid_argument("clustering_sse: cluster index out of range");
    }
    sse += dist_sq(points[i], centroids[static_cast<std::size_t>(c)]);
  }
  return sse;
}

namespace detail {

// Nearest centroid; ties go to the lowest cluster index.
inline int nearest_centroid(const Vec2& p, const std::vector<Vec2>& centroids) {
  int best = 0;
  double best_d = dist_sq(p, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = dist_sq(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

// Mean of each cluster's points; clusters without points keep their previous
// centroid.
inline void recompute_centroids(const std::vector<Vec2>& points,
                                const std::vector<int>& assignment,
                                std::vector<Vec2>& centroids) {
  std::vector<Vec2> sums(centroids.size());
  std::vector<int> counts(centroids.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    sums[static_cast<std::size_t>(assignment[i])] += points[i];
    ++counts[static_cast<std::size_t>(assignment[i])];
  }
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] > 0) centroids[c] = sums[c] * (1.0 / static_cast<double>(counts[c]));
  }
}

inline std::vector<int> cluster_sizes(const std::vector<int>& assignment, int clusters) {
  std::vector<int> sizes(static_cast<std::size_t>(clusters), 0);
  for (int a : assignment) ++sizes[static_cast<std::size_t>(a)];
  return sizes;
}

// k-means++ seeding: first centroid uniform, then squared-distance weighted.
inline std::vector<Vec2> seed_centroids(const std::vector<Vec2>& points, int clusters,
                                        Rng& rng) {
  const std::size_t n = points.size();
  std::vector<std::size_t> chosen;
  std::vector<bool> picked(n, false);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  std::size_t first = rng.next_below(n);
  chosen.push_back(first);
  picked[first] = true;
  for (std::size_t i = 0; i < n; ++i) d2[i] = dist_sq(points[i], points[first]);

  while (chosen.size() < static_cast<std::size_t>(clusters)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!picked[i]) total += d2[i];
    }
    std::size_t next = n;
    if (total > 0.0) {
      const double r = rng.next_double() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (picked[i]) continue;
        acc += d2[i];
        if (acc > r) {
          next = i;
          break;
        }
      }
      if (next == n) {  // float underrun: take the last unpicked point
        for (std::size_t i = n; i-- > 0;) {
          if (!picked[i]) {
            next = i;
            break;
          }
        }
      }
    } else {
      // All remaining points coincide with a chosen centroid: pick uniformly
      // among the unpicked indices so centroids stay one-per-point.
      std::vector<std::size_t> unpicked;
      for (std::size_t i = 0; i < n; ++i) {
        if (!picked[i]) unpicked.push_back(i);
      }
      next = unpicked[rng.next_below(unpicked.size())];
    }
    chosen.push_back(next);
    picked[next] = true;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], dist_sq(points[i], points[next]));
    }
  }

  std::vector<Vec2> centroids;
  centroids.reserve(chosen.size());
  for (std::size_t idx : chosen) centroids.push_back(points[idx]);
  return centroids;
}

}  // namespace detail

// Moves points into empty clusters so every cluster ends non-empty. A no-op
// when nothing is empty. Donor points are taken farthest-first from clusters
// that can spare one; a final Lloyd step is applied only if it keeps all
// clusters non-empty (with duplicate points it could re-collapse them).
inline Clustering repair_empty_clusters(Clustering c, const std::vector<Vec2>& points) {
  const int clusters = static_cast<int>(c.centroids.size());
  if (points.size() < static_cast<std::size_t>(clusters)) {
    throw std::invalid_argument("repair_empty_clusters: fewer points than clusters");
  }
  std::vector<int> sizes = detail::cluster_sizes(c.assignment, clusters);
  if (std::all_of(sizes.begin(), sizes.end(), [](int s) { return s > 0; })) {
    return c;  // identity on already-valid clusterings
  }

  for (int round = 0; round < clusters; ++round) {
    bool any_empty = false;
    for (int e = 0; e < clusters; ++e) {
      if (sizes[static_cast<std::size_t>(e)] > 0) continue;
      any_empty = true;
      // Farthest point from its own centroid among clusters of size >= 2.
      std::size_t donor = points.size();
      double worst = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const int a = c.assignment[i];
        if (sizes[static_cast<std::size_t>(a)] < 2) continue;
        const double d = dist_sq(points[i], c.centroids[static_cast<std::size_t>(a)]);
        if (d > worst) {
          worst = d;
          donor = i;
        }
      }
      if (donor == points.size()) break;  // no donor available
      --sizes[static_cast<std::size_t>(c.assignment[donor])];
      c.assignment[donor] = e;
      ++sizes[static_cast<std::size_t>(e)];
      c.centroids[static_cast<std::size_t>(e)] = points[donor];
    }
    if (!any_empty) break;
    detail::recompute_centroids(points, c.assignment, c.centroids);
  }

  sizes = detail::cluster_sizes(c.assignment, clusters);
  if (std::any_of(sizes.begin(), sizes.end(), [](int s) { return s == 0; })) {
    throw std::logic_error("repair_empty_clusters: could not fill every cluster");
  }

  // Guarded Lloyd step.
  std::vector<int> trial(c.assignment.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    trial[i] = detail::nearest_centroid(points[i], c.centroids);
  }
  const std::vector<int> trial_sizes = detail::cluster_sizes(trial, clusters);
  if (std::all_of(trial_sizes.begin(), trial_sizes.end(), [](int s) { return s > 0; })) {
    c.assignment = std::move(trial);
    detail::recompute_centroids(points, c.assignment, c.centroids);
  }
  c.sse = clustering_sse(points, c.assignment, c.centroids);
  return c;
}

// k-means++ seeding followed by Lloyd iterations; result always has every
// cluster non-empty. `sse_history` (optional) records the SSE after each Lloyd
// iteration.
inline Clustering kmeans_partition(const std::vector<Vec2>& points, int clusters,
                                   std::uint64_t seed, int max_iter = 100,
                                   std::vector<double>* sse_history = nullptr) {
  if (clusters < 1) throw std::invalid_argument("kmeans_partition: clusters must be >= 1");
  if (points.size() < static_cast<std::size_t>(clusters)) {
    throw std::invalid_argument("kmeans_partition: fewer points than clusters");
  }
  if (max_iter < 1) throw std::invalid_argument("kmeans_partition: max_iter must be >= 1");

  Rng rng(seed);
  Clustering c;
  c.centroids = detail::seed_centroids(points, clusters, rng);
  c.assignment.assign(points.size(), 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int a = detail::nearest_centroid(points[i], c.centroids);
      if (a != c.assignment[i]) {
        c.assignment[i] = a;
        changed = true;
      }
    }
    detail::recompute_centroids(points, c.assignment, c.centroids);
    if (sse_history) {
      sse_history->push_back(clustering_sse(points, c.assignment, c.centroids));
    }
    if (!changed && iter > 0) break;
  }
  c.sse = clustering_sse(points, c.assignment, c.centroids);

  const std::vector<int> sizes = detail::cluster_sizes(c.assignment, clusters);
  if (std::any_of(sizes.begin(), sizes.end(), [](int s) { return s == 0; })) {
    c = repair_empty_clusters(std::move(c), points);
  }
  return c;
}

// Uniform random partition that still guarantees non-empty clusters: the first
// `clusters` slots of a shuffled point order get one cluster each, the rest are
// assigned uniformly.
inline Clustering random_partition(const std::vector<Vec2>& points, int clusters,
                                   std::uint64_t seed) {
  if (clusters < 1) throw std::invalid_argument("random_partition: clusters must be >= 1");
  if (points.size() < static_cast<std::size_t>(clusters)) {
    throw std::invalid_argument("random_partition: fewer points than clusters");
  }
  Rng rng(seed);
  std::vector<int> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  rng.shuffle(order);

  Clustering c;
  c.assignment.assign(points.size(), 0);
  for (int i = 0; i < clusters; ++i) {
    c.assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
  }
  for (std::size_t i = static_cast<std::size_t>(clusters); i < order.size(); ++i) {
    c.assignment[static_cast<std::size_t>(order[i])] =
        static_cast<int>(rng.next_below(static_cast<std::uint64_t>(clusters)));
  }
  c.centroids.assign(static_cast<std::size_t>(clusters), Vec2{});
  detail::recompute_centroids(points, c.assignment, c.centroids);
  c.sse = clustering_sse(points, c.assignment, c.centroids);
  return c;
}

}  // namespace uavnet
