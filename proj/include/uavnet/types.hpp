#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "uavnet/rng.hpp"
#include "uavnet/vec2.hpp"

namespace uavnet {

inline constexpr int kNoUser = -1;  // schedule entry for an idle UAV

// Dense row-major rows x cols container used for per-(uav, slot) data.
template <class T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T init = T{})
      : rows_(rows), cols_(cols),
        v_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), init) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Grid: negative shape");
  }

  T& operator()(int r, int c) { return v_[index(r, c)]; }
  const T& operator()(int r, int c) const { return v_[index(r, c)]; }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return v_.empty(); }
  bool same_shape(const Grid& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> v_;
};

// Problem instance: K ground users served by M UAVs flying a periodic
// trajectory of N slots over period_s seconds at fixed altitude.
struct Scenario {
  std::vector<Vec2> users;    // positions in the area rectangle
  int uavs = 1;               // M
  double period_s = 210.0;    // T
  int slots = 210;            // N
  double altitude_m = 100.0;  // H
  double vmax_mps = 50.0;
  double dmin_m = 50.0;       // minimum inter-UAV separation
  double pmax_w = 0.1;
  double rho0 = 1e-6;         // channel gain at 1 m reference distance
  double sigma2_w = 1e-14;    // noise power
  double area_w_m = 2000.0;
  double area_h_m = 2000.0;
  std::uint64_t seed = 1;

  int user_count() const { return static_cast<int>(users.size()); }
  double dt() const { return period_s / static_cast<double>(slots); }

  void validate() const {
    auto fail = [](const std::string& msg) {
      throw std::invalid_argument("Scenario: " + msg);
    };
    if (users.empty()) fail("needs at least one user");
    if (uavs < 1) fail("needs at least one UAV");
    if (slots < 2) fail("needs at least two slots");
    if (!(period_s > 0.0)) fail("period must be positive");
    if (!(altitude_m > 0.0)) fail("altitude must be positive");
    if (!(vmax_mps > 0.0)) fail("vmax must be positive");
    if (!(dmin_m >= 0.0)) fail("dmin must be non-negative");
    if (!(pmax_w > 0.0)) fail("pmax must be positive");
    if (!(rho0 > 0.0)) fail("rho0 must be positive");
    if (!(sigma2_w > 0.0)) fail("noise power must be positive");
    if (!(area_w_m > 0.0) || !(area_h_m > 0.0)) fail("area must be positive");
    for (const Vec2& u : users) {
      if (!is_finite(u)) fail("user position must be finite");
      if (u.x < 0.0 || u.x > area_w_m || u.y < 0.0 || u.y > area_h_m) {
        fail("user position outside area");
      }
    }
  }
};

// Users drawn uniformly over the area; shared by the CLI generator and tests.
inline std::vector<Vec2> random_users(int count, double area_w, double area_h,
                                      std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("random_users: count must be >= 1");
  Rng rng(derive_seed(seed, /*stream=*/0x75736572));  // "user"
  std::vector<Vec2> users(static_cast<std::size_t>(count));
  for (Vec2& u : users) {
    u.x = rng.next_double(0.0, area_w);
    u.y = rng.next_double(0.0, area_h);
  }
  return users;
}

// Cyclic trajectory: q(m, n) is UAV m's position in slot n; the closing step
// wraps from slot N-1 back to slot 0, which encodes periodicity structurally.
struct Trajectory {
  Grid<Vec2> q;

  Trajectory() = default;
  Trajectory(int uavs, int slots) : q(uavs, slots) {}

  int uavs() const { return q.rows(); }
  int slots() const { return q.cols(); }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct PowerProfile {
  Grid<double> p;  // transmit power in watts per (uav, slot)

  PowerProfile() = default;
  PowerProfile(int uavs, int slots, double init = 0.0) : p(uavs, slots, init) {}

  int uavs() const { return p.rows(); }
  int slots() const { return p.cols(); }

  friend bool operator==(const PowerProfile&, const PowerProfile&) = default;
};

struct Schedule {
  Grid<int> serve;  // user index served by (uav, slot), or kNoUser

  Schedule() = default;
  Schedule(int uavs, int slots) : serve(uavs, slots, kNoUser) {}

  int uavs() const { return serve.rows(); }
  int slots() const { return serve.cols(); }

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

// r(k, m, n): achievable rate of user k if served by UAV m in slot n.
class RateTensor {
 public:
  RateTensor() = default;
  RateTensor(int users, int uavs, int slots)
      : users_(users), uavs_(uavs), slots_(slots),
        r_(static_cast<std::size_t>(users) * uavs * slots, 0.0) {
    if (users < 1 || uavs < 1 || slots < 1) {
      throw std::invalid_argument("RateTensor: empty dimension");
    }
  }

  double& at(int k, int m, int n) { return r_[index(k, m, n)]; }
  double at(int k, int m, int n) const { return r_[index(k, m, n)]; }

  int users() const { return users_; }
  int uavs() const { return uavs_; }
  int slots() const { return slots_; }

 private:
  std::size_t index(int k, int m, int n) const {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(uavs_) +
            static_cast<std::size_t>(m)) *
               static_cast<std::size_t>(slots_) +
           static_cast<std::size_t>(n);
  }

  int users_ = 0;
  int uavs_ = 0;
  int slots_ = 0;
  std::vector<double> r_;
};

enum class ConstraintKind { Speed, Collision, PowerBounds, DuplicateUser };

inline const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::Speed: return "speed";
    case ConstraintKind::Collision: return "collision";
    case ConstraintKind::PowerBounds: return "power_bounds";
    case ConstraintKind::DuplicateUser: return "duplicate_user";
  }
  return "unknown";
}

inline ConstraintKind constraint_kind_from_string(const std::string& s) {
  if (s == "speed") return ConstraintKind::Speed;
  if (s == "collision") return ConstraintKind::Collision;
  if (s == "power_bounds") return ConstraintKind::PowerBounds;
  if (s == "duplicate_user") return ConstraintKind::DuplicateUser;
  throw std::invalid_argument("unknown constraint kind: " + s);
}

// One violated constraint instance. |magnitude| is the violation amount in the
// constraint's own units (meters for speed/collision, watts for power bounds).
struct Violation {
  ConstraintKind kind = ConstraintKind::Speed;
  int uav = -1;
  int other = -1;  // second UAV (collision) or user index (duplicate)
  int slot = -1;
  double magnitude = 0.0;

  std::string describe() const {
    std::string s = to_string(kind);
    s += " uav=" + std::to_string(uav);
    if (other >= 0) s += " other=" + std::to_string(other);
    s += " slot=" + std::to_string(slot);
    s += " magnitude=" + std::to_string(magnitude);
    return s;
  }
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  double max_magnitude() const {
    double m = 0.0;
    for (const Violation& v : violations) m = std::max(m, v.magnitude);
    return m;
  }
};

enum class ObjectiveKind { Mean, MinRate, LogWeighted };

inline const char* to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::Mean: return "mean";
    case ObjectiveKind::MinRate: return "min";
    case ObjectiveKind::LogWeighted: return "logw";
  }
  return "unknown";
}

inline ObjectiveKind objective_kind_from_string(const std::string& s) {
  if (s == "mean") return ObjectiveKind::Mean;
  if (s == "min") return ObjectiveKind::MinRate;
  if (s == "logw") return ObjectiveKind::LogWeighted;
  throw std::invalid_argument("unknown objective kind: " + s);
}

// Complete operating point. `objective` is the value of `objective_kind` at
// (schedule, traj, power); `feasibility` is the last computed constraint check.
struct Solution {
  Schedule schedule;
  Trajectory traj;
  PowerProfile power;
  ObjectiveKind objective_kind = ObjectiveKind::Mean;
  double objective = 0.0;
  FeasibilityReport feasibility;
};

// Raised when a solver cannot produce a feasible iterate; carries the report
// describing what was violated, so callers can distinguish this from bad input.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, FeasibilityReport report)
      : std::runtime_error(what), report_(std::move(report)) {}

  const FeasibilityReport& report() const { return report_; }

 private:
  FeasibilityReport report_;
};

}  // namespace uavnet
