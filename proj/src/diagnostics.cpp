#include "ssqp/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "ssqp/errors.hpp"
#include "ssqp/merit.hpp"
#include "ssqp/solver.hpp"
#include "ssqp/stepcore.hpp"

namespace ssqp {

TrueStep true_step(const ProblemInstance& problem, const SymmetricOperator& H, const Mat& J, const Vec& v,
                   const Vec& x, double sigma, double tol) {
  const Vec grad = problem.gradient(x);
  const Vec c = problem.constraints(x);
  TrueStep out;
  out.u_true = tangential_step(H, J, grad, v, tol).u;
  out.d_true = v + out.u_true;
  out.tau_trial_true = trial_merit_parameter(grad, out.d_true, out.u_true, H, c, J * out.d_true, sigma);
  return out;
}

StationarityResiduals stationarity_residuals(const ProblemInstance& problem, const Vec& x) {
  const Vec c = problem.constraints(x);
  const Mat J = problem.jacobian(x);
  const Vec grad = problem.gradient(x);
  const LeastSquaresMultiplier lsm = least_squares_multiplier(J, grad);
  StationarityResiduals out;
  out.kkt_res = (grad + J.transpose() * lsm.y).lpNorm<Eigen::Infinity>();
  out.feas_res = c.size() ? c.lpNorm<Eigen::Infinity>() : 0.0;
  out.infeas_stat_res = (J.transpose() * c).norm();
  return out;
}

MeritEventTally merit_event_monitor(const std::vector<StepRecord>& history, long tail_window) {
  MeritEventTally t;
  std::vector<bool> ok;
  for (const StepRecord& r : history) {
    if (r.termination != Termination::None || std::isnan(r.tau_trial_true)) continue;
    ++t.total_iters;
    if (r.tau < r.tau_prev) ++t.decrease_count;
    const bool below = r.tau_trial_true < r.tau_prev;
    if (below) ++t.trial_below_count;
    ok.push_back(!below);
  }
  const auto window = static_cast<std::size_t>(std::max<long>(tail_window, 0));
  const std::size_t first = ok.size() > window ? ok.size() - window : 0;
  t.tail_window_ok = std::all_of(ok.begin() + static_cast<std::ptrdiff_t>(first), ok.end(), [](bool b) { return b; });
  return t;
}

long sbar(double tau_trial_min, double tau_init, double eps_tau) {
  if (!(tau_trial_min > 0.0 && tau_trial_min <= tau_init)) throw UsageError("sbar: need 0 < tau_trial_min <= tau_init");
  if (!(eps_tau > 0.0 && eps_tau < 1.0)) throw UsageError("sbar: eps_tau must lie in (0,1)");
  if (tau_trial_min == tau_init) return 0;
  return static_cast<long>(std::ceil(std::log(tau_trial_min / tau_init) / std::log(1.0 - eps_tau)));
}

double chernoff_bound(double p_tau, long J, long s_max) {
  const double mean = p_tau * static_cast<double>(J - 1);
  const double gap = 1.0 - static_cast<double>(s_max) / mean;
  return std::exp(-(mean / 2.0) * gap * gap);
}

ChernoffResult chernoff_mc(double p_tau, long J, long s_max, long trials, std::uint64_t seed) {
  if (!(p_tau > 0.0 && p_tau <= 1.0)) throw UsageError("chernoff_mc: p_tau must lie in (0,1]");
  if (s_max < 0) throw UsageError("chernoff_mc: s_max must be >= 0");
  if (!(static_cast<double>(J) > static_cast<double>(s_max) / p_tau + 1.0)) {
    throw UsageError("chernoff_mc: need J > s_max / p_tau + 1");
  }
  if (trials < 10000) throw UsageError("chernoff_mc: need at least 10^4 trials");

  // Fixed-size shards with their own streams keep results independent of how
  // the work would be split.
  constexpr long kShard = 4096;
  const Rng root(seed);
  long hits = 0;
  for (long start = 0, shard = 0; start < trials; start += kShard, ++shard) {
    Rng rng = root.split(static_cast<std::uint64_t>(shard));
    const long end = std::min(trials, start + kShard);
    for (long t = start; t < end; ++t) {
      long sum = 0;
      for (long j = 1; j < J && sum <= s_max; ++j) sum += rng.uniform() < p_tau ? 1 : 0;
      if (sum <= s_max) ++hits;
    }
  }
  ChernoffResult out;
  out.empirical = static_cast<double>(hits) / static_cast<double>(trials);
  out.bound = chernoff_bound(p_tau, J, s_max);
  out.std_error = std::sqrt(std::max(out.empirical * (1.0 - out.empirical), 0.0) / static_cast<double>(trials));
  return out;
}

}  // namespace ssqp
