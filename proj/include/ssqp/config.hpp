#pragma once

#include <string>

#include "ssqp/types.hpp"

namespace ssqp {

/// How the step-size scaling sequence {beta_k} is produced.
///
/// The base sequence is beta_hat_j = beta / (j + 1)^decay (decay is ignored
/// for `constant`). Under `reset`, beta_k = lambda * beta_hat_j where j counts
/// iterations since the last change of any adaptive parameter.
struct BetaSchedule {
  enum class Kind { Constant, Diminishing, Reset };
  Kind kind = Kind::Constant;
  double beta = 1.0;
  double decay = 1.0;

  static BetaSchedule constant(double beta) { return {Kind::Constant, beta, 0.0}; }
  static BetaSchedule diminishing(double beta, double decay = 1.0) { return {Kind::Diminishing, beta, decay}; }
  static BetaSchedule reset(double beta, double decay = 1.0) { return {Kind::Reset, beta, decay}; }

  double base(long j) const;
};

std::string to_string(BetaSchedule::Kind kind);
BetaSchedule::Kind beta_kind_from_string(const std::string& s);

/// `Sufficient` projects alpha_suff. `MaxSuffMin` projects max{alpha_suff,
/// alpha_min} and uses min{2(1-eta), 1} in place of 2(1-eta) in the interval.
enum class StepRule { Sufficient, MaxSuffMin };

std::string to_string(StepRule rule);
StepRule step_rule_from_string(const std::string& s);

struct SolverConfig {
  double L = 1.0;
  double Gamma = 1.0;
  double tau_init = 1.0;
  double chi_init = 1e-3;
  double zeta_init = 1e3;
  double xi_init = 1.0;
  double omega = 1e2;
  double eps_v = 1.0;
  double sigma = 0.5;
  double eps_tau = 1e-2;
  double eps_chi = 1e-2;
  double eps_zeta = 1e-2;
  double eps_xi = 1e-2;
  double eta = 0.5;
  double theta = 1e4;
  BetaSchedule beta_schedule;
  StepRule step_rule = StepRule::MaxSuffMin;
  long max_iter = 1000;
  double term_tol_jc = 1e-10;
  double term_tol_c = 1e-6;

  // Not part of the method's parameter list.
  int normal_max_iter = 0;  // 0 picks min{m, 20}
  double tangential_tol = 1e-9;
  bool deterministic = false;  // enables the KKT stop below
  double kkt_tol = 1e-9;
  bool record_true_trial = false;
  bool record_iterate_stats = true;
  SymmetricOperator H;

  /// Throws UsageError naming the first field out of range.
  void validate() const;

  /// 2(1 - eta) or min{2(1 - eta), 1} depending on the step rule.
  double interval_coefficient() const;
};

/// Largest beta in (0, 1] with coefficient * beta * xi_init * max{tau_init, 1} / Gamma <= 1.
double deterministic_beta(const SolverConfig& config);

}  // namespace ssqp
