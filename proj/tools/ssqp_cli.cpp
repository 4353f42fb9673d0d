// Command-line front end: single solves, benchmark sweeps, baseline tuning,
// the Chernoff Monte Carlo check and derivative checks.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssqp/baselines.hpp"
#include "ssqp/config_io.hpp"
#include "ssqp/diagnostics.hpp"
#include "ssqp/errors.hpp"
#include "ssqp/harness.hpp"
#include "ssqp/problems.hpp"
#include "ssqp/solver.hpp"

namespace {

using namespace ssqp;

enum Exit { kOk = 0, kUsage = 1, kSolverFailure = 2, kIo = 3 };

struct ProblemOptions {
  std::string kind = "synthetic";  // synthetic | logistic
  std::string synthetic_kind = "feasible";
  long n = 20;
  long m = 6;
  std::uint64_t problem_seed = 0;
  std::string data;
  int num_linear = 10;
  bool norm = false;

  void add(CLI::App* app) {
    app->add_option("--problem", kind, "synthetic or logistic")->check(CLI::IsMember({"synthetic", "logistic"}));
    app->add_option("--kind", synthetic_kind, "feasible, infeasible or rank-deficient-everywhere");
    app->add_option("--n", n, "synthetic dimension");
    app->add_option("--m", m, "synthetic constraint count");
    app->add_option("--problem-seed", problem_seed, "seed for the problem data");
    app->add_option("--data", data, "LIBSVM file for logistic problems");
    app->add_option("--num-linear", num_linear, "linear constraints before duplication");
    app->add_flag("--norm", norm, "add the constraint ||x||^2 = 1");
  }

  ProblemInstance build() const {
    if (kind == "logistic") {
      if (data.empty()) throw UsageError("--data is required for logistic problems");
      auto ds = std::make_shared<const Dataset>(parse_libsvm(data));
      return make_logistic_problem(ds, num_linear, norm, problem_seed);
    }
    return make_synthetic_degenerate(n, m, synthetic_kind_from_string(synthetic_kind), problem_seed);
  }

  Vec start(const ProblemInstance& p) const {
    return kind == "logistic" ? Vec(Vec::Zero(p.n)) : synthetic_start(p, problem_seed);
  }
};

struct RunOptions {
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::size_t batch = 0;
  long budget = 1000;
  std::optional<double> beta;
  std::string step_rule = "max";
  bool deterministic = false;
  std::string config_path;
  std::string out;
  std::string format = "csv";
  int workers = 1;

  void add(CLI::App* app, bool single_setting) {
    app->add_option("--seed", seed, "base random seed");
    if (single_setting) {
      app->add_option("--noise", noise, "gaussian gradient noise variance");
      app->add_option("--batch", batch, "mini-batch size (logistic)");
    }
    app->add_option("--budget", budget, "iteration budget");
    app->add_option("--beta", beta, "step-size scaling beta");
    app->add_option("--step-rule", step_rule, "suff or max")->check(CLI::IsMember({"suff", "max"}));
    app->add_flag("--deterministic", deterministic, "exact gradients and the KKT stopping test");
    app->add_option("--config", config_path, "JSON file with SolverConfig fields");
    app->add_option("--out", out, "directory for reports");
    app->add_option("--format", format, "csv, json or markdown")->check(CLI::IsMember({"csv", "json", "markdown"}));
    app->add_option("--workers", workers, "concurrent runs");
  }

  SolverConfig config(SolverConfig base) const {
    if (beta) base.beta_schedule = BetaSchedule::constant(*beta);
    base.step_rule = step_rule_from_string(step_rule);
    base.max_iter = budget;
    base.deterministic = deterministic;
    if (!config_path.empty()) base = load_solver_config(config_path, base);
    return base;
  }

  OracleSpec oracle(const ProblemInstance& p) const {
    if (deterministic) return OracleSpec::exact();
    if (batch > 0) return OracleSpec::minibatch(std::min(batch, p.num_samples));
    if (noise > 0.0) return OracleSpec::gaussian(noise);
    return OracleSpec::exact();
  }

  std::string setting(const ProblemInstance& p) const { return describe(oracle(p)); }
};

void print_or_emit(const std::vector<RunRecord>& records, const RunOptions& run) {
  if (run.out.empty()) {
    std::cout << render_markdown(records) << "\n" << render_summary_markdown(summarize(records));
    return;
  }
  const std::string path = emit_report(records, report_format_from_string(run.format), run.out);
  std::cout << "wrote " << path << "\n";
}

std::vector<double> parse_list(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) out.push_back(std::stod(s));
  return out;
}

std::vector<std::uint64_t> seed_range(std::uint64_t base, int count) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) out.push_back(base + static_cast<std::uint64_t>(i));
  return out;
}

int cmd_solve(const ProblemOptions& po, const RunOptions& run, const std::string& method, double tau) {
  const ProblemInstance problem = po.build();
  const Vec x0 = po.start(problem);
  const LipschitzEstimate lip = estimate_lipschitz(problem, x0, kLipschitzSamples, kLipschitzRadius, po.problem_seed);
  const OracleSpec spec = run.oracle(problem);
  const std::string setting = describe(spec);
  RunRecord rec;
  if (method == "sqp") {
    SolverConfig base = po.kind == "logistic" ? LogisticExperimentSpec::default_logistic_config()
                                              : SyntheticExperimentSpec::default_synthetic_config();
    base.L = lip.L;
    base.Gamma = lip.Gamma;
    if (run.deterministic && !run.beta) base.beta_schedule = BetaSchedule::constant(deterministic_beta(base));
    const SolverConfig config = run.config(base);
    GradientOracle oracle(spec, run_seed(run.seed, problem.name, setting, "sqp"));
    const SolveResult result = solve(problem, oracle, config, x0);
    rec = summarize_sqp(problem.name, setting, run.seed, result, kTailWindow);
    std::cerr << "iterations " << result.history.size() << ", termination " << to_string(result.termination)
              << ", final tau " << result.final_state.tau << "\n";
    if (!result.failure.empty()) {
      std::cerr << "solver failure: " << result.failure << "\n";
      print_or_emit({rec}, run);
      return kSolverFailure;
    }
  } else {
    BaselineConfig bc;
    bc.method = baseline_method_from_string(method);
    bc.tau = tau;
    bc.beta = run.beta.value_or(1.0);
    bc.max_iter = run.budget;
    bc.seed = run_seed(run.seed, problem.name, setting, method);
    const BaselineResult result = run_baseline(problem, spec, bc, x0, lip.L, lip.Gamma);
    rec.problem = problem.name;
    rec.method = method;
    rec.setting = setting;
    rec.seed = run.seed;
    rec.best_index = static_cast<long>(result.best.index);
    rec.feas_err = result.best.feas_err;
    rec.stat_err = result.best.stat_err;
    rec.wall_ms = result.wall_ms;
    rec.oracle_calls = result.oracle_calls;
  }
  print_or_emit({rec}, run);
  return kOk;
}

int cmd_tune(const ProblemOptions& po, const RunOptions& run, const std::string& method) {
  const ProblemInstance problem = po.build();
  const Vec x0 = po.start(problem);
  const LipschitzEstimate lip = estimate_lipschitz(problem, x0, kLipschitzSamples, kLipschitzRadius, po.problem_seed);
  const BaselineMethod m = baseline_method_from_string(method);
  const TuneGrid grid = m == BaselineMethod::ProjectedGradient ? TuneGrid::projected_gradient()
                        : po.kind == "logistic"               ? TuneGrid::subgradient_logistic()
                                                               : TuneGrid::subgradient_synthetic();
  const OracleSpec spec = run.oracle(problem);
  const TuneResult tuned = tune_grid(m, problem, spec, grid, run.budget, x0, lip.L, lip.Gamma,
                                     run_seed(run.seed, problem.name, describe(spec), method), run.workers);
  std::printf("grid points: %zu\n", tuned.runs.size());
  std::printf("best: tau=%.0e beta=%.0e feas=%.3e stat=%.3e index=%zu\n", tuned.best_config.tau,
              tuned.best_config.beta, tuned.best_report.best.feas_err, tuned.best_report.best.stat_err,
              tuned.best_report.best.index);
  return kOk;
}

int cmd_mc_check(std::uint64_t seed, long trials) {
  struct Point {
    double p;
    long J;
    long s;
  };
  const std::vector<Point> grid = {{0.9, 21, 10}, {0.5, 41, 10}, {0.5, 101, 30}, {0.7, 31, 15}, {0.3, 101, 20},
                                   {0.9, 51, 30}, {0.6, 61, 25}, {0.8, 16, 8},   {1.0, 2, 0},   {0.4, 201, 60}};
  bool ok = true;
  std::printf("%6s %5s %5s %12s %12s %10s %s\n", "p", "J", "s", "empirical", "bound", "mc_se", "ok");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& g = grid[i];
    const ChernoffResult r = chernoff_mc(g.p, g.J, g.s, trials, Rng(seed).split(i).seed());
    const bool pass = r.empirical <= r.bound + 3.0 * r.std_error;
    ok = ok && pass;
    std::printf("%6.2f %5ld %5ld %12.6f %12.6f %10.2e %s\n", g.p, g.J, g.s, r.empirical, r.bound, r.std_error,
                pass ? "yes" : "NO");
  }
  return ok ? kOk : kSolverFailure;
}

int cmd_gradcheck(const ProblemOptions& po, int points, std::uint64_t seed) {
  const ProblemInstance problem = po.build();
  Rng rng(seed);
  double worst_grad = 0.0, worst_jac = 0.0;
  const double h = 1e-6;
  for (int p = 0; p < points; ++p) {
    Vec x(problem.n);
    for (Eigen::Index i = 0; i < problem.n; ++i) x(i) = 0.5 * rng.normal();
    const Vec g = problem.gradient(x);
    const Mat J = problem.jacobian(x);
    Vec fd_g(problem.n);
    Mat fd_J(problem.m, problem.n);
    for (Eigen::Index i = 0; i < problem.n; ++i) {
      Vec xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      fd_g(i) = (problem.objective(xp) - problem.objective(xm)) / (2 * h);
      fd_J.col(i) = (problem.constraints(xp) - problem.constraints(xm)) / (2 * h);
    }
    worst_grad = std::max(worst_grad, (fd_g - g).norm() / std::max(1.0, g.norm()));
    worst_jac = std::max(worst_jac, (fd_J - J).norm() / std::max(1.0, J.norm()));
  }
  std::printf("%s: gradient rel err %.3e, jacobian rel err %.3e over %d points\n", problem.name.c_str(), worst_grad,
              worst_jac, points);
  return worst_grad <= 1e-6 && worst_jac <= 1e-6 ? kOk : kSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic SQP for equality-constrained problems with rank-deficient Jacobians"};
  app.require_subcommand(1);

  ProblemOptions po;
  RunOptions run;
  std::string method = "sqp";
  double tau = 1.0;
  auto* solve_cmd = app.add_subcommand("solve", "run one method on one problem");
  po.add(solve_cmd);
  run.add(solve_cmd, true);
  solve_cmd->add_option("--method", method, "sqp, subgradient or projected-gradient");
  solve_cmd->add_option("--tau", tau, "merit parameter for the subgradient method");

  ProblemOptions tune_po;
  RunOptions tune_run;
  std::string tune_method = "subgradient";
  auto* tune_cmd = app.add_subcommand("tune", "grid-tune a baseline");
  tune_po.add(tune_cmd);
  tune_run.add(tune_cmd, true);
  tune_cmd->add_option("--method", tune_method, "subgradient or projected-gradient");

  RunOptions syn_run;
  long syn_n = 20, syn_m = 6;
  int syn_problems = 2, syn_seeds = 10;
  std::vector<std::string> syn_kinds{"feasible"};
  std::vector<std::string> syn_noise{"1e-8", "1e-4", "1e-2", "1e-1"};
  bool syn_no_subgradient = false;
  auto* syn_cmd = app.add_subcommand("bench-synthetic", "noise sweep on synthetic degenerate problems");
  syn_run.add(syn_cmd, false);
  syn_cmd->add_option("--n", syn_n, "dimension");
  syn_cmd->add_option("--m", syn_m, "constraints");
  syn_cmd->add_option("--problems", syn_problems, "problem instances per kind");
  syn_cmd->add_option("--kinds", syn_kinds, "problem kinds");
  syn_cmd->add_option("--noise", syn_noise, "noise levels");
  syn_cmd->add_option("--seeds", syn_seeds, "runs per problem and noise level");
  syn_cmd->add_flag("--no-subgradient", syn_no_subgradient, "skip the tuned subgradient baseline");

  RunOptions log_run;
  std::string log_data;
  int log_linear = 10, log_seeds = 5;
  long log_epochs = 5;
  bool log_norm = false;
  std::vector<std::size_t> log_batches{16, 128};
  auto* log_cmd = app.add_subcommand("bench-logistic", "constrained logistic regression benchmark");
  log_run.add(log_cmd, false);
  log_cmd->add_option("--data", log_data, "LIBSVM dataset")->required();
  log_cmd->add_option("--num-linear", log_linear, "linear constraints before duplication");
  log_cmd->add_flag("--norm", log_norm, "add ||x||^2 = 1");
  log_cmd->add_option("--batch", log_batches, "mini-batch sizes");
  log_cmd->add_option("--seeds", log_seeds, "runs per batch size");
  log_cmd->add_option("--epochs", log_epochs, "epochs per run");

  std::uint64_t mc_seed = 0;
  long mc_trials = 100000;
  auto* mc_cmd = app.add_subcommand("mc-check", "Monte Carlo check of the Chernoff tail bound");
  mc_cmd->add_option("--seed", mc_seed, "random seed");
  mc_cmd->add_option("--trials", mc_trials, "trials per grid point");

  ProblemOptions gc_po;
  int gc_points = 20;
  std::uint64_t gc_seed = 0;
  auto* gc_cmd = app.add_subcommand("gradcheck", "compare derivatives with central differences");
  gc_po.add(gc_cmd);
  gc_cmd->add_option("--points", gc_points, "random points");
  gc_cmd->add_option("--seed", gc_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(po, run, method, tau);
    if (tune_cmd->parsed()) return cmd_tune(tune_po, tune_run, tune_method);
    if (mc_cmd->parsed()) return cmd_mc_check(mc_seed, mc_trials);
    if (gc_cmd->parsed()) return cmd_gradcheck(gc_po, gc_points, gc_seed);
    if (syn_cmd->parsed()) {
      SyntheticExperimentSpec spec;
      for (const auto& k : syn_kinds)
        for (int i = 0; i < syn_problems; ++i)
          spec.problems.push_back({syn_n, syn_m, synthetic_kind_from_string(k), static_cast<std::uint64_t>(i)});
      spec.noises = parse_list(syn_noise);
      spec.seeds = seed_range(syn_run.seed, syn_seeds);
      spec.budget = syn_run.budget;
      spec.include_subgradient = !syn_no_subgradient;
      spec.base_config = syn_run.config(SyntheticExperimentSpec::default_synthetic_config());
      spec.workers = syn_run.workers;
      print_or_emit(run_cutest_style_experiment(spec), syn_run);
      return kOk;
    }
    if (log_cmd->parsed()) {
      LogisticExperimentSpec spec;
      spec.dataset = std::make_shared<const Dataset>(parse_libsvm(log_data));
      spec.num_linear = log_linear;
      spec.with_norm_constraint = log_norm;
      spec.batches = log_batches;
      spec.seeds = seed_range(log_run.seed, log_seeds);
      spec.epochs = log_epochs;
      spec.base_config = log_run.config(LogisticExperimentSpec::default_logistic_config());
      spec.base_config.record_true_trial = true;
      spec.workers = log_run.workers;
      print_or_emit(run_logistic_experiment(spec), log_run);
      return kOk;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
