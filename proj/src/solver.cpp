#include "ssqp/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/SVD>

#include "ssqp/diagnostics.hpp"
#include "ssqp/errors.hpp"
#include "ssqp/stepcore.hpp"

namespace ssqp {

namespace {

constexpr double kZeroStep = 1e-14;

// Largest power of 1/2 keeping coefficient * beta * xi * max{tau,1} / (tau L + Gamma) <= 1.
double reset_scale(const SolverConfig& config, double tau, double xi) {
  const double base = config.interval_coefficient() * config.beta_schedule.base(0) * xi * std::max(tau, 1.0) /
                      (tau * config.L + config.Gamma);
  double lambda = 1.0;
  while (lambda * base > 1.0 && lambda > 1e-300) lambda *= 0.5;
  return lambda;
}

double current_beta(const SolverConfig& config, const SolverState& state) {
  const BetaSchedule& s = config.beta_schedule;
  switch (s.kind) {
    case BetaSchedule::Kind::Constant: return s.beta;
    case BetaSchedule::Kind::Diminishing: return s.base(state.beta_index);
    case BetaSchedule::Kind::Reset: return state.lambda * s.base(state.beta_index);
  }
  return s.beta;
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::None: return "none";
    case Termination::InfeasibleStationary: return "infeasible_stationary";
    case Termination::DkZeroKkt: return "dk_zero_kkt";
  }
  return "none";
}

SolverState SolverState::initial(const SolverConfig& config, Vec x0) {
  SolverState s;
  s.x = std::move(x0);
  s.tau = config.tau_init;
  s.chi = config.chi_init;
  s.zeta = config.zeta_init;
  s.xi = config.xi_init;
  s.lambda = config.beta_schedule.kind == BetaSchedule::Kind::Reset ? reset_scale(config, s.tau, s.xi) : 1.0;
  return s;
}

StepRecord sqp_iteration(const ProblemInstance& problem, GradientOracle& oracle, const SolverConfig& config,
                         SolverState& state) {
  StepRecord rec;
  rec.k = state.k;
  rec.x = state.x;
  rec.tau_prev = state.tau;
  rec.xi_prev = state.xi;

  const Vec c = problem.constraints(state.x);
  const Mat J = problem.jacobian(state.x);
  rec.c_norm = c.norm();
  rec.jtc_norm = (J.transpose() * c).norm();
  if (rec.jtc_norm <= config.term_tol_jc * std::max(1.0, rec.c_norm) && rec.c_norm > config.term_tol_c) {
    rec.termination = Termination::InfeasibleStationary;
    rec.tau = state.tau;
    rec.chi = state.chi;
    rec.zeta = state.zeta;
    rec.xi = state.xi;
    return rec;
  }

  rec.g = oracle.sample(problem, state.x);
  const int normal_iters = config.normal_max_iter > 0 ? config.normal_max_iter : default_normal_iterations(problem.m);
  const NormalStepResult normal = normal_step(J, c, config.omega, config.eps_v, normal_iters);
  rec.v = normal.v;
  rec.normal_reduction = normal.predicted_reduction;
  const TangentialStepResult tan = tangential_step(config.H, J, rec.g, rec.v, config.tangential_tol);
  rec.u = tan.u;
  rec.y = tan.y;
  rec.d = rec.v + rec.u;
  rec.uHu = rec.u.dot(config.H(rec.u));

  if (config.record_true_trial) {
    rec.tau_trial_true = true_step(problem, config.H, J, rec.v, state.x, config.sigma, config.tangential_tol).tau_trial_true;
  }

  if (config.deterministic && rec.c_norm <= config.kkt_tol &&
      (rec.g + J.transpose() * rec.y).norm() <= config.kkt_tol) {
    rec.termination = Termination::DkZeroKkt;
  }

  auto carry_over = [&]() {
    rec.zero_step = true;
    rec.tau = state.tau;
    rec.chi = state.chi;
    rec.zeta = state.zeta;
    rec.xi = state.xi;
    rec.tau_trial = kInf;
    rec.xi_trial = kInf;
    rec.delta_l = 0.0;
    rec.alpha_suff = rec.alpha_min = rec.alpha = 1.0;
    rec.interval_lo = rec.interval_hi = 1.0;
    rec.beta = current_beta(config, state);
    rec.tangentially_dominated = tangentially_dominated(rec.u, rec.v, state.chi);
  };

  const Vec Jd = J * rec.d;
  const double d_norm = rec.d.norm();
  if (d_norm < kZeroStep) {
    carry_over();
  } else {
    rec.tau_trial = trial_merit_parameter(rec.g, rec.d, rec.u, config.H, c, Jd, config.sigma);
    const double tau = update_merit_parameter(state.tau, rec.tau_trial, config.eps_tau);
    const double delta_l = model_reduction(tau, rec.g, rec.d, c, Jd);
    if (!(delta_l > 0.0)) {
      carry_over();
    } else {
      rec.tau = tau;
      rec.delta_l = delta_l;
      const CurvatureUpdate curv =
          update_curvature_params(state.chi, state.zeta, rec.u, rec.v, rec.d, config.H, config.eps_chi, config.eps_zeta);
      rec.chi = curv.chi;
      rec.zeta = curv.zeta;
      rec.switch_fired = curv.fired;
      rec.tangentially_dominated = tangentially_dominated(rec.u, rec.v, rec.chi);
      const RatioUpdate ratio =
          update_ratio_param(state.xi, delta_l, rec.tau, rec.d, rec.tangentially_dominated, config.eps_xi);
      rec.xi_trial = ratio.xi_trial;
      rec.xi = ratio.xi;

      const bool changed = rec.tau != state.tau || rec.chi != state.chi || rec.zeta != state.zeta || rec.xi != state.xi;
      if (config.beta_schedule.kind == BetaSchedule::Kind::Reset && changed) {
        state.beta_index = 0;
        state.lambda = reset_scale(config, rec.tau, rec.xi);
      }
      rec.beta = current_beta(config, state);
      const StepSize step = step_size(delta_l, rec.tau, rec.xi, d_norm * d_norm, rec.beta, rec.c_norm, config,
                                      rec.tangentially_dominated);
      rec.alpha_suff = step.alpha_suff;
      rec.alpha_min = step.alpha_min;
      rec.alpha = step.alpha;
      rec.interval_lo = step.lo;
      rec.interval_hi = step.hi;
    }
  }

  if (rec.termination != Termination::None) return rec;

  state.tau = rec.tau;
  state.chi = rec.chi;
  state.zeta = rec.zeta;
  state.xi = rec.xi;
  if (!rec.zero_step) state.x += rec.alpha * rec.d;
  state.k += 1;
  state.beta_index += 1;
  return rec;
}

IterateStats iterate_stats(const ProblemInstance& problem, const Vec& x) {
  IterateStats s;
  const Vec c = problem.constraints(x);
  s.feas_inf = c.size() ? c.lpNorm<Eigen::Infinity>() : 0.0;
  s.c_norm = c.norm();
  s.objective = problem.objective(x);
  const Vec grad = problem.gradient(x);
  const LeastSquaresMultiplier lsm = least_squares_multiplier(problem.jacobian(x), grad);
  s.stat_inf = (grad + problem.jacobian(x).transpose() * lsm.y).lpNorm<Eigen::Infinity>();
  return s;
}

SolveResult solve(const ProblemInstance& problem, GradientOracle& oracle, const SolverConfig& config, const Vec& x0) {
  config.validate();
  check_dimensions(problem, x0);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t calls_before = oracle.calls();

  SolveResult out;
  SolverState state = SolverState::initial(config, x0);
  if (config.record_iterate_stats) out.iterates.push_back(iterate_stats(problem, state.x));
  out.history.reserve(static_cast<std::size_t>(std::min<long>(config.max_iter, 100000)));
  for (long it = 0; it < config.max_iter; ++it) {
    StepRecord rec;
    try {
      rec = sqp_iteration(problem, oracle, config, state);
    } catch (const SolverFailure& e) {
      out.failure = e.what();
      break;
    }
    const Termination term = rec.termination;
    out.history.push_back(std::move(rec));
    if (term != Termination::None) {
      out.termination = term;
      break;
    }
    if (config.record_iterate_stats) out.iterates.push_back(iterate_stats(problem, state.x));
  }
  out.final_state = std::move(state);
  out.oracle_calls = oracle.calls() - calls_before;
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

LipschitzEstimate estimate_lipschitz(const ProblemInstance& problem, const Vec& x0, int num_samples, double radius,
                                     std::uint64_t seed) {
  if (num_samples < 2) throw UsageError("estimate_lipschitz: num_samples must be >= 2");
  if (!(radius > 0.0)) throw UsageError("estimate_lipschitz: radius must be > 0");
  Rng rng(seed);
  const Vec g0 = problem.gradient(x0);
  const Mat J0 = problem.jacobian(x0);
  double L = kLipschitzFloor;
  double Gamma = kLipschitzFloor;
  for (int s = 0; s < num_samples; ++s) {
    Vec delta(problem.n);
    for (Eigen::Index i = 0; i < problem.n; ++i) delta(i) = rng.normal();
    delta *= radius / delta.norm();
    const Vec x = x0 + delta;
    L = std::max(L, (problem.gradient(x) - g0).norm() / radius);
    if (problem.m > 0) {
      const Mat dJ = problem.jacobian(x) - J0;
      const double spectral = Eigen::JacobiSVD<Mat>(dJ).singularValues()(0);
      Gamma = std::max(Gamma, spectral / radius);
    }
  }
  return {L, Gamma};
}

}  // namespace ssqp
