#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ssqp/problems.hpp"
#include "ssqp/solver.hpp"

namespace ssqp {

/// An iterate is sufficiently feasible when ||c_k||_inf <= kFeasibleFraction * max{1, ||c_0||_inf}.
inline constexpr double kFeasibleFraction = 1e-6;

struct BestIterate {
  std::size_t index = 0;
  double feas_err = 0.0;
  double stat_err = 0.0;
  bool sufficiently_feasible = false;
};

/// Last sufficiently feasible iterate, else the least infeasible one (first
/// on ties). Non-finite feasibility values never win.
BestIterate best_iterate(const std::vector<IterateStats>& iterates, double c0_inf);

/// Ranking used to pick among tuned runs: sufficiently feasible runs first,
/// ordered by stationarity then feasibility; the rest by feasibility then
/// stationarity.
bool better(const BestIterate& a, const BestIterate& b);

/// Streams iterates through the selection rule while keeping only the two
/// candidate points, so stationarity is evaluated once at the end.
class BestIterateTracker {
 public:
  void observe(const ProblemInstance& problem, const Vec& x);
  std::size_t count() const { return count_; }
  double c0_inf() const { return c0_inf_; }
  /// Requires at least one observation.
  BestIterate finish(const ProblemInstance& problem) const;

 private:
  std::size_t count_ = 0;
  double c0_inf_ = 0.0;
  double threshold_ = 0.0;
  std::optional<std::size_t> last_feasible_;
  Vec last_feasible_x_;
  double last_feasible_err_ = 0.0;
  std::size_t least_index_ = 0;
  Vec least_x_;
  double least_err_ = kInf;
};

}  // namespace ssqp
