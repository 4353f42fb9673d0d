#pragma once

#include <cstdint>
#include <vector>

#include "ssqp/problems.hpp"
#include "ssqp/types.hpp"

namespace ssqp {

struct StepRecord;

/// What the iteration would have produced with grad f(x) in place of g.
struct TrueStep {
  Vec u_true;
  Vec d_true;
  double tau_trial_true = kInf;
};

TrueStep true_step(const ProblemInstance& problem, const SymmetricOperator& H, const Mat& J, const Vec& v,
                   const Vec& x, double sigma = 0.5, double tol = 1e-9);

struct StationarityResiduals {
  double kkt_res = 0.0;          // min_y ||grad f + J^T y||_inf
  double feas_res = 0.0;         // ||c||_inf
  double infeas_stat_res = 0.0;  // ||J^T c||_2
};

StationarityResiduals stationarity_residuals(const ProblemInstance& problem, const Vec& x);

struct MeritEventTally {
  long total_iters = 0;
  long decrease_count = 0;     // tau_k < tau_{k-1}
  long trial_below_count = 0;  // tau_trial_true < tau_{k-1}
  bool tail_window_ok = true;

  /// Fraction of iterations with tau_{k-1} <= tau_trial_true.
  double rate() const {
    return total_iters == 0 ? 1.0 : 1.0 - static_cast<double>(trial_below_count) / static_cast<double>(total_iters);
  }
};

inline constexpr long kTailWindow = 50;

/// Tallies over records that carry tau_trial_true. The tail window is the
/// last `tail_window` such records (pass an epoch length to check the final epoch).
MeritEventTally merit_event_monitor(const std::vector<StepRecord>& history, long tail_window = kTailWindow);

/// ceil(log(tau_trial_min / tau_init) / log(1 - eps_tau)).
long sbar(double tau_trial_min, double tau_init, double eps_tau);

struct ChernoffResult {
  double empirical = 0.0;
  double bound = 0.0;
  double std_error = 0.0;  // Monte Carlo standard error of `empirical`
};

/// exp(-(p (J-1) / 2)(1 - s_max / (p (J-1)))^2).
double chernoff_bound(double p_tau, long J, long s_max);

/// Monte Carlo estimate of P[sum_{j<J} Z_j <= s_max] for iid Bernoulli(p_tau)
/// Z_j, next to the multiplicative Chernoff bound.
ChernoffResult chernoff_mc(double p_tau, long J, long s_max, long trials, std::uint64_t seed);

}  // namespace ssqp
