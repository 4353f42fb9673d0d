#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssqp/config.hpp"
#include "ssqp/merit.hpp"
#include "ssqp/problems.hpp"

namespace ssqp {

enum class Termination { None, InfeasibleStationary, DkZeroKkt };

std::string to_string(Termination t);

/// Mutable per-run state. tau, zeta, xi only decrease and chi only increases.
struct SolverState {
  long k = 0;
  Vec x;
  double tau = 1.0;
  double chi = 1e-3;
  double zeta = 1e3;
  double xi = 1.0;
  long beta_index = 0;  // j in beta_hat_j
  double lambda = 1.0;  // reset-schedule scale

  static SolverState initial(const SolverConfig& config, Vec x0);
};

struct StepRecord {
  long k = 0;
  Vec x;  // iterate the step was computed at
  Vec g;
  Vec v;
  Vec u;
  Vec d;
  Vec y;
  double c_norm = 0.0;
  double jtc_norm = 0.0;
  double normal_reduction = 0.0;  // ||c|| - ||c + Jv||
  double uHu = 0.0;
  double delta_l = 0.0;
  double tau_prev = 0.0;
  double tau = 0.0;
  double tau_trial = kInf;
  double tau_trial_true = std::numeric_limits<double>::quiet_NaN();
  double chi = 0.0;
  double zeta = 0.0;
  double xi_prev = 0.0;
  double xi = 0.0;
  double xi_trial = kInf;
  double beta = 0.0;
  double alpha_suff = 1.0;
  double alpha_min = 1.0;
  double alpha = 1.0;
  double interval_lo = 1.0;
  double interval_hi = 1.0;
  bool tangentially_dominated = false;
  bool switch_fired = false;
  bool zero_step = false;
  Termination termination = Termination::None;
};

/// One pass of the method at state.x. Advances the state unless the record
/// carries a termination signal.
StepRecord sqp_iteration(const ProblemInstance& problem, GradientOracle& oracle, const SolverConfig& config,
                         SolverState& state);

/// Reporting quantities at one iterate, computed with the true gradient.
struct IterateStats {
  double feas_inf = 0.0;  // ||c||_inf
  double stat_inf = 0.0;  // min_y ||grad f + J^T y||_inf
  double objective = 0.0;
  double c_norm = 0.0;    // ||c||_2
};

IterateStats iterate_stats(const ProblemInstance& problem, const Vec& x);

struct SolveResult {
  std::vector<StepRecord> history;
  std::vector<IterateStats> iterates;  // x_0, x_1, ... (empty if disabled)
  SolverState final_state;
  Termination termination = Termination::None;
  std::string failure;  // non-empty when an iteration threw
  std::size_t oracle_calls = 0;
  double wall_ms = 0.0;
};

/// Runs until a termination signal or config.max_iter iterations. A solver
/// failure ends the run early with `failure` set; history up to that point is kept.
SolveResult solve(const ProblemInstance& problem, GradientOracle& oracle, const SolverConfig& config, const Vec& x0);

struct LipschitzEstimate {
  double L;
  double Gamma;
};

inline constexpr double kLipschitzFloor = 1e-8;

/// Largest difference quotients of the true gradient and of the Jacobian
/// (spectral norm) over random points x0 + delta with ||delta|| = radius.
LipschitzEstimate estimate_lipschitz(const ProblemInstance& problem, const Vec& x0, int num_samples, double radius,
                                     std::uint64_t seed);

}  // namespace ssqp
