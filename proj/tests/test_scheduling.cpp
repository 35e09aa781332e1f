#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "uavnet/hungarian.hpp"
#include "uavnet/model.hpp"
#include "uavnet/rng.hpp"
#include "uavnet/scheduling.hpp"
#include "uavnet/types.hpp"

using namespace uavnet;
using Catch::Matchers::WithinAbs;

namespace {

Grid<double> make_weights(std::initializer_list<std::initializer_list<double>> rows) {
  const int r = static_cast<int>(rows.size());
  const int c = static_cast<int>(rows.begin()->size());
  Grid<double> w(r, c);
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (double v : row) w(i, j++) = v;
    ++i;
  }
  return w;
}

RateTensor random_rates(int K, int M, int N, std::uint64_t seed) {
  Rng rng(seed);
  RateTensor rates(K, M, N);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      for (int n = 0; n < N; ++n) rates.at(k, m, n) = rng.next_double(0.0, 10.0);
    }
  }
  return rates;
}

bool no_duplicate_users(const Schedule& s) {
  for (int n = 0; n < s.slots(); ++n) {
    std::vector<int> seen;
    for (int m = 0; m < s.uavs(); ++m) {
      const int k = s.serve(m, n);
      if (k == kNoUser) continue;
      for (int other : seen) {
        if (other == k) return false;
      }
      seen.push_back(k);
    }
  }
  return true;
}

}  // namespace

TEST_CASE("assignment solves a hand-checked square instance", "[scheduling]") {
  // [[3,1],[2,4]]: picking the diagonal gives 3 + 4 = 7.
  const AssignmentResult res = max_weight_assignment(make_weights({{3.0, 1.0}, {2.0, 4.0}}));
  CHECK(res.value == 7.0);
  CHECK(res.row_to_col == std::vector<int>{0, 1});
}

TEST_CASE("assignment handles more columns than rows", "[scheduling]") {
  // Rows pick col 1 (9) and col 0 (5): 14 beats any alternative.
  const AssignmentResult res =
      max_weight_assignment(make_weights({{1.0, 9.0, 2.0}, {5.0, 8.0, 3.0}}));
  CHECK(res.value == 14.0);
  CHECK(res.row_to_col == std::vector<int>{1, 0});
}

TEST_CASE("assignment leaves surplus rows unmatched", "[scheduling]") {
  // Three rows, two columns: row 0 idles; rows 1 and 2 take 9 and 8.
  const AssignmentResult res =
      max_weight_assignment(make_weights({{5.0, 1.0}, {9.0, 2.0}, {4.0, 8.0}}));
  CHECK(res.value == 17.0);
  CHECK(res.row_to_col == std::vector<int>{-1, 0, 1});
}

TEST_CASE("assignment rejects negative or non-finite weights", "[scheduling]") {
  CHECK_THROWS_AS(max_weight_assignment(make_weights({{1.0, -0.5}})), std::invalid_argument);
  CHECK_THROWS_AS(max_weight_assignment(make_weights({{1.0, 1.0 / 0.0}})),
                  std::invalid_argument);
}

TEST_CASE("per-slot matching equals exhaustive enumeration", "[scheduling]") {
  Rng dims(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int K = dims.next_int(1, 6);
    const int M = dims.next_int(1, 5);
    const int N = dims.next_int(1, 7);
    const RateTensor rates = random_rates(K, M, N, 9000 + static_cast<std::uint64_t>(trial));
    const Schedule fast = optimal_schedule(rates);
    const Schedule slow = brute_force_schedule(rates);
    REQUIRE(objective_mean(fast, rates) == objective_mean(slow, rates));
    REQUIRE(fast.serve == slow.serve);  // identical lexicographic tie-breaking
  }
}

TEST_CASE("matching breaks ties toward low user indices", "[scheduling]") {
  // All-zero rates: every matching is optimal; UAV m should take user m.
  RateTensor rates(4, 2, 3);
  const Schedule s = optimal_schedule(rates);
  for (int n = 0; n < 3; ++n) {
    CHECK(s.serve(0, n) == 0);
    CHECK(s.serve(1, n) == 1);
  }
}

TEST_CASE("surplus UAVs idle when there are fewer users", "[scheduling]") {
  const RateTensor rates = random_rates(2, 3, 4, 5);
  const Schedule s = optimal_schedule(rates);
  CHECK(no_duplicate_users(s));
  for (int n = 0; n < 4; ++n) {
    int idle = 0;
    for (int m = 0; m < 3; ++m) {
      if (s.serve(m, n) == kNoUser) ++idle;
    }
    CHECK(idle == 1);  // exactly one UAV has no user to serve
  }
}

TEST_CASE("brute force guards against oversized instances", "[scheduling]") {
  CHECK_THROWS_AS(brute_force_schedule(RateTensor(6, 2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_schedule(RateTensor(2, 5, 2)), std::invalid_argument);
  CHECK_THROWS_AS(brute_force_schedule(RateTensor(2, 2, 7)), std::invalid_argument);
}

TEST_CASE("mean objective scheduling is the plain optimal matching", "[scheduling]") {
  const RateTensor rates = random_rates(4, 2, 5, 77);
  const Schedule a = optimize_schedule(ObjectiveKind::Mean, rates);
  const Schedule b = optimal_schedule(rates);
  CHECK(a.serve == b.serve);
}

TEST_CASE("min-rate scheduling trades mean for fairness", "[scheduling]") {
  // One UAV, two users: user 0 is fast (10), user 1 slow (1). Serving only
  // user 0 maximizes the mean but leaves user 1 at zero.
  RateTensor rates(2, 1, 2);
  for (int n = 0; n < 2; ++n) {
    rates.at(0, 0, n) = 10.0;
    rates.at(1, 0, n) = 1.0;
  }
  const Schedule mean_s = optimize_schedule(ObjectiveKind::Mean, rates);
  CHECK(objective_min(mean_s, rates) == 0.0);
  const Schedule min_s = optimize_schedule(ObjectiveKind::MinRate, rates);
  CHECK_THAT(objective_min(min_s, rates), WithinAbs(0.5, 1e-12));  // (10/2, 1/2)
  CHECK(no_duplicate_users(min_s));

  const Schedule logw_s = optimize_schedule(ObjectiveKind::LogWeighted, rates);
  CHECK(objective_logweighted(logw_s, rates) > objective_logweighted(mean_s, rates));
}

TEST_CASE("an incumbent schedule is never lost", "[scheduling]") {
  const RateTensor rates = random_rates(3, 2, 4, 11);
  for (ObjectiveKind kind :
       {ObjectiveKind::Mean, ObjectiveKind::MinRate, ObjectiveKind::LogWeighted}) {
    const Schedule base = optimize_schedule(kind, rates);
    const double base_obj = objective_value(kind, base, rates);
    const Schedule again = optimize_schedule(kind, rates, 0.01, &base);
    CHECK(objective_value(kind, again, rates) >= base_obj);
  }
  // Even a deliberately bad incumbent cannot drag the result down.
  Schedule bad(2, 4);  // all idle
  const Schedule improved = optimize_schedule(ObjectiveKind::Mean, rates, 0.01, &bad);
  CHECK(objective_mean(improved, rates) > 0.0);
}

TEST_CASE("scheduling is deterministic", "[scheduling]") {
  const RateTensor rates = random_rates(5, 3, 6, 123);
  const Schedule a = optimize_schedule(ObjectiveKind::MinRate, rates);
  const Schedule b = optimize_schedule(ObjectiveKind::MinRate, rates);
  CHECK(a.serve == b.serve);
}
