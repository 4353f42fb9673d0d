#include "ssqp/merit.hpp"

#include <algorithm>
#include <cmath>

#include "ssqp/errors.hpp"
#include "ssqp/stepcore.hpp"

namespace ssqp {

double BetaSchedule::base(long j) const {
  if (kind == Kind::Constant || decay == 0.0) return beta;
  return beta / std::pow(static_cast<double>(j + 1), decay);
}

std::string to_string(BetaSchedule::Kind kind) {
  switch (kind) {
    case BetaSchedule::Kind::Constant: return "constant";
    case BetaSchedule::Kind::Diminishing: return "diminishing";
    case BetaSchedule::Kind::Reset: return "reset";
  }
  return "constant";
}

BetaSchedule::Kind beta_kind_from_string(const std::string& s) {
  if (s == "constant") return BetaSchedule::Kind::Constant;
  if (s == "diminishing") return BetaSchedule::Kind::Diminishing;
  if (s == "reset") return BetaSchedule::Kind::Reset;
  throw UsageError("unknown beta schedule '" + s + "'");
}

std::string to_string(StepRule rule) { return rule == StepRule::Sufficient ? "suff" : "max"; }

StepRule step_rule_from_string(const std::string& s) {
  if (s == "suff") return StepRule::Sufficient;
  if (s == "max" || s == "max-suff-min") return StepRule::MaxSuffMin;
  throw UsageError("unknown step rule '" + s + "' (expected suff or max)");
}

void SolverConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw UsageError(std::string("invalid solver config: ") + what);
  };
  need(L > 0.0, "L must be > 0");
  need(Gamma > 0.0, "Gamma must be > 0");
  need(tau_init > 0.0, "tau_init must be > 0");
  need(chi_init > 0.0, "chi_init must be > 0");
  need(zeta_init > 0.0, "zeta_init must be > 0");
  need(xi_init > 0.0, "xi_init must be > 0");
  need(omega > 0.0, "omega must be > 0");
  need(eps_v > 0.0 && eps_v <= 1.0, "eps_v must lie in (0,1]");
  need(sigma > 0.0 && sigma < 1.0, "sigma must lie in (0,1)");
  need(eps_tau > 0.0 && eps_tau < 1.0, "eps_tau must lie in (0,1)");
  need(eps_chi > 0.0, "eps_chi must be > 0");
  need(eps_zeta > 0.0 && eps_zeta < 1.0, "eps_zeta must lie in (0,1)");
  need(eps_xi > 0.0 && eps_xi < 1.0, "eps_xi must lie in (0,1)");
  need(eta > 0.0 && eta < 1.0, "eta must lie in (0,1)");
  need(theta >= 0.0, "theta must be >= 0");
  need(beta_schedule.beta > 0.0 && beta_schedule.beta <= 1.0, "beta must lie in (0,1]");
  need(beta_schedule.decay >= 0.0, "beta decay must be >= 0");
  need(max_iter >= 0, "max_iter must be >= 0");
  need(term_tol_jc >= 0.0, "term_tol_jc must be >= 0");
  need(term_tol_c >= 0.0, "term_tol_c must be >= 0");
  need(tangential_tol > 0.0, "tangential_tol must be > 0");
}

double SolverConfig::interval_coefficient() const {
  const double two = 2.0 * (1.0 - eta);
  return step_rule == StepRule::Sufficient ? two : std::min(two, 1.0);
}

double deterministic_beta(const SolverConfig& config) {
  const double denom = config.interval_coefficient() * config.xi_init * std::max(config.tau_init, 1.0);
  return std::min(1.0, config.Gamma / denom);
}

double merit_phi(const ProblemInstance& problem, const Vec& x, double tau) {
  if (tau < 0.0) throw UsageError("merit_phi: tau must be >= 0");
  const double c_norm = problem.constraints(x).norm();
  return tau == 0.0 ? c_norm : tau * problem.objective(x) + c_norm;
}

double model_reduction(double tau, const Vec& g, const Vec& d, const Vec& c, const Vec& Jd) {
  return -tau * g.dot(d) + linearized_reduction(c, Jd);
}

double trial_merit_parameter(const Vec& g, const Vec& d, const Vec& u, const SymmetricOperator& H, const Vec& c,
                             const Vec& Jd, double sigma) {
  const double denom = g.dot(d) + u.dot(H(u));
  if (!(denom > 0.0)) return kInf;
  return (1.0 - sigma) * linearized_reduction(c, Jd) / denom;
}

double update_merit_parameter(double tau_prev, double tau_trial, double eps_tau) {
  if (tau_prev <= tau_trial) return tau_prev;
  return std::min((1.0 - eps_tau) * tau_prev, tau_trial);
}

CurvatureUpdate update_curvature_params(double chi_prev, double zeta_prev, const Vec& u, const Vec& v, const Vec& d,
                                        const SymmetricOperator& H, double eps_chi, double eps_zeta) {
  const double uu = u.squaredNorm();
  if (uu >= chi_prev * v.squaredNorm() && 0.5 * d.dot(H(d)) < 0.25 * zeta_prev * uu) {
    return {(1.0 + eps_chi) * chi_prev, (1.0 - eps_zeta) * zeta_prev, true};
  }
  return {chi_prev, zeta_prev, false};
}

bool tangentially_dominated(const Vec& u, const Vec& v, double chi) {
  return u.squaredNorm() >= chi * v.squaredNorm();
}

RatioUpdate update_ratio_param(double xi_prev, double delta_l, double tau, const Vec& d, bool dominated,
                               double eps_xi) {
  const double dd = d.squaredNorm();
  const double trial = dominated ? delta_l / (tau * dd) : delta_l / dd;
  const double xi = xi_prev <= trial ? xi_prev : std::min((1.0 - eps_xi) * xi_prev, trial);
  return {trial, xi};
}

std::pair<double, double> projection_interval(double tau, double xi, double beta, const SolverConfig& config,
                                              bool dominated) {
  double lo = config.interval_coefficient() * beta * xi / (tau * config.L + config.Gamma);
  if (dominated) lo *= tau;
  return {lo, lo + config.theta * beta * beta};
}

StepSize step_size(double delta_l, double tau, double xi, double d_norm_sq, double beta, double c_norm,
                   const SolverConfig& config, bool dominated) {
  StepSize out;
  const double scale = (tau * config.L + config.Gamma) * d_norm_sq;
  out.alpha_suff = std::min(2.0 * (1.0 - config.eta) * beta * delta_l / scale, 1.0);
  out.alpha_trial = out.alpha_suff;
  if (config.step_rule == StepRule::MaxSuffMin) {
    out.alpha_min = std::max(std::min(beta * delta_l / scale, 1.0), (beta * delta_l - 2.0 * c_norm) / scale);
    out.alpha_trial = std::max(out.alpha_suff, out.alpha_min);
  } else {
    out.alpha_min = out.alpha_suff;
  }
  std::tie(out.lo, out.hi) = projection_interval(tau, xi, beta, config, dominated);
  out.alpha = std::clamp(out.alpha_trial, out.lo, out.hi);
  return out;
}

}  // namespace ssqp
