#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ssqp/baselines.hpp"
#include "ssqp/config.hpp"
#include "ssqp/problems.hpp"
#include "ssqp/solver.hpp"

namespace ssqp {

/// Summary of one run at its best iterate. Everything but wall_ms is a
/// function of the experiment spec and seed.
struct RunRecord {
  std::string problem;
  std::string method;   // sqp, subgradient, projected-gradient
  std::string setting;  // noise=... or batch=...
  std::uint64_t seed = 0;
  long best_index = 0;
  double feas_err = 0.0;
  double stat_err = 0.0;
  double wall_ms = 0.0;

  std::size_t oracle_calls = 0;
  std::string status = "ok";
  std::string tuned;  // winning grid point for tuned baselines
  double merit_rate = -1.0;     // fraction of iterations with tau_{k-1} <= tau_trial_true (sqp with diagnostics)
  bool final_epoch_ok = false;  // that inequality over the whole final epoch

  bool operator==(const RunRecord&) const = default;
};

struct SyntheticProblemSpec {
  Eigen::Index n = 20;
  Eigen::Index m = 6;
  SyntheticKind kind = SyntheticKind::Feasible;
  std::uint64_t seed = 0;

  std::string name() const;
};

struct SyntheticExperimentSpec {
  std::vector<SyntheticProblemSpec> problems;
  std::vector<double> noises{1e-8, 1e-4, 1e-2, 1e-1};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  long budget = 1000;
  long subgradient_factor = 10;  // subgradient budget per grid point = factor * budget
  bool include_subgradient = true;
  TuneGrid subgradient_grid = TuneGrid::subgradient_synthetic();
  SolverConfig base_config = default_synthetic_config();
  int workers = 1;

  static SolverConfig default_synthetic_config();
  void validate() const;
};

struct LogisticExperimentSpec {
  std::shared_ptr<const Dataset> dataset;
  int num_linear = 10;
  bool with_norm_constraint = false;
  std::uint64_t constraint_seed = 0;
  std::vector<std::size_t> batches{16, 128};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  long epochs = 5;
  bool include_subgradient = true;
  bool include_projected_gradient = true;  // ignored with the norm constraint
  TuneGrid subgradient_grid = TuneGrid::subgradient_logistic();
  TuneGrid projected_grid = TuneGrid::projected_gradient();
  SolverConfig base_config = default_logistic_config();
  int workers = 1;

  static SolverConfig default_logistic_config();
  void validate() const;
};

/// ceil(N / b) iterations.
long epoch_length(std::size_t num_samples, std::size_t batch);

inline constexpr int kLipschitzSamples = 20;
inline constexpr double kLipschitzRadius = 1e-1;

/// Deterministic child seed for a run, keyed by labels rather than order.
std::uint64_t run_seed(std::uint64_t seed, const std::string& problem, const std::string& setting,
                       const std::string& stream);

/// Standard-normal starting point used for synthetic runs.
Vec synthetic_start(const ProblemInstance& problem, std::uint64_t seed);

/// SQP run summarized at its best iterate.
RunRecord summarize_sqp(const std::string& problem, const std::string& setting, std::uint64_t seed,
                        const SolveResult& result, long final_epoch);

std::vector<RunRecord> run_cutest_style_experiment(const SyntheticExperimentSpec& spec);
std::vector<RunRecord> run_logistic_experiment(const LogisticExperimentSpec& spec);

/// Mean and 95% half-width (1.96 sd / sqrt(n)) per (problem, method, setting).
struct SummaryRow {
  std::string problem;
  std::string method;
  std::string setting;
  std::size_t runs = 0;
  double feas_mean = 0.0;
  double feas_ci = 0.0;
  double stat_mean = 0.0;
  double stat_ci = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

enum class ReportFormat { Csv, Json, Markdown };

ReportFormat report_format_from_string(const std::string& s);

std::string render_csv(const std::vector<RunRecord>& records);
std::string render_json(const std::vector<RunRecord>& records);
std::string render_markdown(const std::vector<RunRecord>& records);
std::string render_summary_markdown(const std::vector<SummaryRow>& rows);
std::vector<RunRecord> parse_report_json(const std::string& text);

/// Writes report.{csv,json,md} under out_dir (created if missing) and returns
/// the path. Throws IoError when the directory cannot be written.
std::string emit_report(const std::vector<RunRecord>& records, ReportFormat format, const std::string& out_dir);

}  // namespace ssqp
