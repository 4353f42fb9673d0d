#include "ssqp/baselines.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include <Eigen/SVD>

#include "ssqp/errors.hpp"
#include "ssqp/stepcore.hpp"

namespace ssqp {

namespace {

std::vector<double> powers_of_ten(int lo, int hi) {
  std::vector<double> out;
  for (int e = lo; e <= hi; ++e) out.push_back(std::pow(10.0, e));
  return out;
}

}  // namespace

Vec subgradient_step(const ProblemInstance& problem, GradientOracle& oracle, const Vec& x, double tau, double beta,
                     double L, double Gamma) {
  if (!(tau > 0.0 && beta > 0.0)) throw UsageError("subgradient_step: tau and beta must be positive");
  Vec dir = tau * oracle.sample(problem, x);
  if (problem.m > 0) {
    const Vec c = problem.constraints(x);
    const double c_norm = c.norm();
    if (c_norm > 0.0) dir += problem.jacobian(x).transpose() * (c / c_norm);
  }
  return x - (beta * tau / (tau * L + Gamma)) * dir;
}

AffineProjector::AffineProjector(const AffineConstraints& affine) : A_(affine.A), b_(affine.b) {
  if (A_.rows() != b_.size()) throw UsageError("AffineProjector: A and b sizes differ");
  if (A_.rows() == 0) return;
  Eigen::JacobiSVD<Mat> svd(A_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(0) > 0.0 && s(r) > kRankTolerance * s(0)) ++r;
  U_ = svd.matrixU().leftCols(r);
  V_ = svd.matrixV().leftCols(r);
  sigma_ = s.head(r);
}

AffineProjector AffineProjector::for_problem(const ProblemInstance& problem) {
  if (!problem.affine) throw UsageError("projected gradient needs affine constraints; '" + problem.name + "' has none");
  return AffineProjector(*problem.affine);
}

Vec AffineProjector::project(const Vec& x) const {
  if (sigma_.size() == 0) return x;
  // x - pinv(A)(Ax - b), applied twice to mop up round-off
  Vec p = x - V_ * ((U_.transpose() * (A_ * x - b_)).cwiseQuotient(sigma_));
  p -= V_ * ((U_.transpose() * (A_ * p - b_)).cwiseQuotient(sigma_));
  return p;
}

Vec projected_gradient_step(const ProblemInstance& problem, GradientOracle& oracle, const Vec& x, double beta,
                            double L, const AffineProjector& projector) {
  return projector.project(x - (beta / L) * oracle.sample(problem, x));
}

std::string to_string(BaselineMethod method) {
  return method == BaselineMethod::Subgradient ? "subgradient" : "projected-gradient";
}

BaselineMethod baseline_method_from_string(const std::string& s) {
  if (s == "subgradient") return BaselineMethod::Subgradient;
  if (s == "projected-gradient" || s == "projgrad") return BaselineMethod::ProjectedGradient;
  throw UsageError("unknown baseline method '" + s + "'");
}

void BaselineConfig::validate() const {
  if (method == BaselineMethod::Subgradient && !(tau > 0.0)) throw UsageError("baseline: tau must be > 0");
  if (!(beta > 0.0)) throw UsageError("baseline: beta must be > 0");
  if (max_iter < 0) throw UsageError("baseline: max_iter must be >= 0");
}

BaselineResult run_baseline(const ProblemInstance& problem, const OracleSpec& spec, const BaselineConfig& config,
                            const Vec& x0, double L, double Gamma, bool record_iterates) {
  config.validate();
  check_dimensions(problem, x0);
  const auto start = std::chrono::steady_clock::now();
  GradientOracle oracle(spec, config.seed);
  std::optional<AffineProjector> projector;
  if (config.method == BaselineMethod::ProjectedGradient) projector = AffineProjector::for_problem(problem);

  BaselineResult out;
  out.config = config;
  BestIterateTracker tracker;
  Vec x = x0;
  auto observe = [&]() {
    tracker.observe(problem, x);
    if (record_iterates) {
      out.iterates.push_back(x.allFinite() ? iterate_stats(problem, x) : IterateStats{kInf, kInf, kInf, kInf});
    }
  };
  observe();
  for (long k = 0; k < config.max_iter; ++k) {
    x = config.method == BaselineMethod::Subgradient
            ? subgradient_step(problem, oracle, x, config.tau, config.beta, L, Gamma)
            : projected_gradient_step(problem, oracle, x, config.beta, L, *projector);
    observe();
    if (!x.allFinite()) break;  // diverged; nothing later can be better
  }
  out.best = tracker.finish(problem);
  out.oracle_calls = oracle.calls();
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

TuneGrid TuneGrid::subgradient_synthetic() { return {powers_of_ten(-10, 0), powers_of_ten(-3, 0)}; }
TuneGrid TuneGrid::subgradient_logistic() { return {powers_of_ten(-3, 0), powers_of_ten(-3, 0)}; }
TuneGrid TuneGrid::projected_gradient() { return {{}, powers_of_ten(-8, 2)}; }

std::size_t TuneGrid::size(BaselineMethod method) const {
  return method == BaselineMethod::Subgradient ? taus.size() * betas.size() : betas.size();
}

TuneResult tune_grid(BaselineMethod method, const ProblemInstance& problem, const OracleSpec& oracle,
                     const TuneGrid& grid, long budget, const Vec& x0, double L, double Gamma, std::uint64_t seed,
                     int workers) {
  std::vector<BaselineConfig> points;
  if (method == BaselineMethod::Subgradient) {
    for (double tau : grid.taus)
      for (double beta : grid.betas) points.push_back({method, tau, beta, budget, seed});
  } else {
    for (double beta : grid.betas) points.push_back({method, 1.0, beta, budget, seed});
  }
  if (points.empty()) throw UsageError("tune_grid: empty grid");

  TuneResult out;
  out.runs.resize(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      out.runs[i] = run_baseline(problem, oracle, points[i], x0, L, Gamma, false);
    }
  };
  const auto threads = static_cast<std::size_t>(std::clamp(workers, 1, static_cast<int>(points.size())));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::size_t best = 0;
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    out.oracle_calls += out.runs[i].oracle_calls;
    if (i > 0 && better(out.runs[i].best, out.runs[best].best)) best = i;
  }
  out.best_config = points[best];
  out.best_report = out.runs[best];
  return out;
}

}  // namespace ssqp
