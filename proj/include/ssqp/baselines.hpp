#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssqp/best_iterate.hpp"
#include "ssqp/problems.hpp"

namespace ssqp {

/// x - (beta tau / (tau L + Gamma)) (tau g + J^T c / ||c||), with the
/// penalty subgradient taken as 0 where c = 0.
Vec subgradient_step(const ProblemInstance& problem, GradientOracle& oracle, const Vec& x, double tau, double beta,
                     double L, double Gamma);

/// Euclidean projection onto {x : Ax = b} through a rank-revealing SVD of A,
/// so duplicated rows are harmless. Assumes the system is consistent.
class AffineProjector {
 public:
  explicit AffineProjector(const AffineConstraints& affine);
  /// Throws UsageError when the problem has no affine description.
  static AffineProjector for_problem(const ProblemInstance& problem);

  Vec project(const Vec& x) const;

 private:
  Mat A_;
  Vec b_;
  Mat U_;  // m x r
  Mat V_;  // n x r
  Vec sigma_;
};

/// Proj(x - (beta / L) g).
Vec projected_gradient_step(const ProblemInstance& problem, GradientOracle& oracle, const Vec& x, double beta,
                            double L, const AffineProjector& projector);

enum class BaselineMethod { Subgradient, ProjectedGradient };

std::string to_string(BaselineMethod method);
BaselineMethod baseline_method_from_string(const std::string& s);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::Subgradient;
  double tau = 1.0;  // subgradient only
  double beta = 1.0;
  long max_iter = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct BaselineResult {
  BaselineConfig config;
  BestIterate best;
  std::vector<IterateStats> iterates;  // filled only when requested
  std::size_t oracle_calls = 0;
  double wall_ms = 0.0;
};

/// Runs one baseline from x0. With record_iterates the full per-iterate
/// statistics are kept; otherwise only the best iterate is evaluated.
BaselineResult run_baseline(const ProblemInstance& problem, const OracleSpec& oracle, const BaselineConfig& config,
                            const Vec& x0, double L, double Gamma, bool record_iterates = false);

struct TuneGrid {
  std::vector<double> taus;
  std::vector<double> betas;

  static TuneGrid subgradient_synthetic();  // tau 1e-10..1e0, beta 1e-3..1e0
  static TuneGrid subgradient_logistic();   // tau, beta 1e-3..1e0
  static TuneGrid projected_gradient();     // beta 1e-8..1e2
  std::size_t size(BaselineMethod method) const;
};

struct TuneResult {
  BaselineConfig best_config;
  BaselineResult best_report;
  std::vector<BaselineResult> runs;  // one per grid point, iterates dropped
  std::size_t oracle_calls = 0;
};

/// Every grid point runs `budget` iterations with the same oracle seed; the
/// winner is chosen by `better`. Grid points run on up to `workers` threads.
TuneResult tune_grid(BaselineMethod method, const ProblemInstance& problem, const OracleSpec& oracle,
                     const TuneGrid& grid, long budget, const Vec& x0, double L, double Gamma, std::uint64_t seed,
                     int workers = 1);

}  // namespace ssqp
