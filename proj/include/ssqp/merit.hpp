#pragma once

#include "ssqp/config.hpp"
#include "ssqp/problems.hpp"
#include "ssqp/types.hpp"

namespace ssqp {

/// tau f(x) + ||c(x)||_2.
double merit_phi(const ProblemInstance& problem, const Vec& x, double tau);

/// -tau g^T d + ||c|| - ||c + Jd||.
double model_reduction(double tau, const Vec& g, const Vec& d, const Vec& c, const Vec& Jd);

/// (1 - sigma)(||c|| - ||c + Jd||) / (g^T d + u^T H u), or +inf when the
/// denominator is not positive.
double trial_merit_parameter(const Vec& g, const Vec& d, const Vec& u, const SymmetricOperator& H, const Vec& c,
                             const Vec& Jd, double sigma);

double update_merit_parameter(double tau_prev, double tau_trial, double eps_tau);

struct CurvatureUpdate {
  double chi;
  double zeta;
  bool fired;
};

CurvatureUpdate update_curvature_params(double chi_prev, double zeta_prev, const Vec& u, const Vec& v, const Vec& d,
                                        const SymmetricOperator& H, double eps_chi, double eps_zeta);

/// ||u||^2 >= chi ||v||^2.
bool tangentially_dominated(const Vec& u, const Vec& v, double chi);

struct RatioUpdate {
  double xi_trial;
  double xi;
};

RatioUpdate update_ratio_param(double xi_prev, double delta_l, double tau, const Vec& d, bool tangentially_dominated,
                               double eps_xi);

struct StepSize {
  double alpha_suff = 1.0;
  double alpha_min = 1.0;   // only meaningful under StepRule::MaxSuffMin
  double alpha_trial = 1.0;
  double alpha = 1.0;
  double lo = 1.0;
  double hi = 1.0;
};

/// Interval [lo, hi] the step size is projected onto.
std::pair<double, double> projection_interval(double tau, double xi, double beta, const SolverConfig& config,
                                              bool tangentially_dominated);

StepSize step_size(double delta_l, double tau, double xi, double d_norm_sq, double beta, double c_norm,
                   const SolverConfig& config, bool tangentially_dominated);

}  // namespace ssqp
