#include "ssqp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ssqp/diagnostics.hpp"
#include "ssqp/errors.hpp"

namespace ssqp {

namespace {

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string noise_setting(double noise) { return "noise=" + format_double("%.0e", noise); }
std::string batch_setting(std::size_t b) { return "batch=" + std::to_string(b); }

std::string describe_point(const BaselineConfig& c) {
  std::string s = "beta=" + format_double("%.0e", c.beta);
  if (c.method == BaselineMethod::Subgradient) s = "tau=" + format_double("%.0e", c.tau) + "," + s;
  return s;
}

RunRecord summarize_baseline(const std::string& problem, const std::string& setting, std::uint64_t seed,
                             const TuneResult& tuned) {
  RunRecord r;
  r.problem = problem;
  r.method = to_string(tuned.best_config.method);
  r.setting = setting;
  r.seed = seed;
  r.best_index = static_cast<long>(tuned.best_report.best.index);
  r.feas_err = tuned.best_report.best.feas_err;
  r.stat_err = tuned.best_report.best.stat_err;
  r.oracle_calls = tuned.oracle_calls;
  r.tuned = describe_point(tuned.best_config);
  for (const auto& run : tuned.runs) r.wall_ms += run.wall_ms;
  return r;
}

// Runs jobs[i]() on up to `workers` threads and concatenates results in job order.
std::vector<RunRecord> run_jobs(const std::vector<std::function<std::vector<RunRecord>()>>& jobs, int workers) {
  std::vector<std::vector<RunRecord>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = jobs[i]();
  };
  const int threads = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  std::vector<RunRecord> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double number_from(const nlohmann::json& j) {
  if (j.is_null()) return kInf;
  return j.get<double>();
}

}  // namespace

std::string SyntheticProblemSpec::name() const {
  return "synthetic-" + to_string(kind) + "-n" + std::to_string(n) + "-m" + std::to_string(m) + "-s" + std::to_string(seed);
}

SolverConfig SyntheticExperimentSpec::default_synthetic_config() {
  SolverConfig c;
  c.beta_schedule = BetaSchedule::constant(1.0);
  return c;
}

SolverConfig LogisticExperimentSpec::default_logistic_config() {
  SolverConfig c;
  c.beta_schedule = BetaSchedule::constant(0.1);
  c.record_true_trial = true;
  return c;
}

void SyntheticExperimentSpec::validate() const {
  if (problems.empty()) throw UsageError("synthetic experiment: no problems");
  if (noises.empty() || seeds.empty()) throw UsageError("synthetic experiment: empty noise or seed list");
  if (budget <= 0 || subgradient_factor <= 0) throw UsageError("synthetic experiment: budgets must be positive");
}

void LogisticExperimentSpec::validate() const {
  if (!dataset || dataset->size() == 0) throw UsageError("logistic experiment: no data");
  if (batches.empty() || seeds.empty()) throw UsageError("logistic experiment: empty batch or seed list");
  if (epochs <= 0) throw UsageError("logistic experiment: epochs must be positive");
}

long epoch_length(std::size_t num_samples, std::size_t batch) {
  if (batch == 0) throw UsageError("batch size must be positive");
  return static_cast<long>((num_samples + batch - 1) / batch);
}

std::uint64_t run_seed(std::uint64_t seed, const std::string& problem, const std::string& setting,
                       const std::string& stream) {
  return Rng(seed).split(problem).split(setting).split(stream).seed();
}

Vec synthetic_start(const ProblemInstance& problem, std::uint64_t seed) {
  Rng rng = Rng(seed).split("x0");
  Vec x(problem.n);
  for (Eigen::Index i = 0; i < problem.n; ++i) x(i) = rng.normal();
  return x;
}

RunRecord summarize_sqp(const std::string& problem, const std::string& setting, std::uint64_t seed,
                        const SolveResult& result, long final_epoch) {
  RunRecord r;
  r.problem = problem;
  r.method = "sqp";
  r.setting = setting;
  r.seed = seed;
  r.wall_ms = result.wall_ms;
  r.oracle_calls = result.oracle_calls;
  if (!result.failure.empty()) r.status = "failure: " + result.failure;
  if (!result.iterates.empty()) {
    const BestIterate best = best_iterate(result.iterates, result.iterates.front().feas_inf);
    r.best_index = static_cast<long>(best.index);
    r.feas_err = best.feas_err;
    r.stat_err = best.stat_err;
  }
  const MeritEventTally tally = merit_event_monitor(result.history, final_epoch);
  if (tally.total_iters > 0) {
    r.merit_rate = tally.rate();
    r.final_epoch_ok = tally.tail_window_ok;
  }
  return r;
}

std::vector<RunRecord> run_cutest_style_experiment(const SyntheticExperimentSpec& spec) {
  spec.validate();
  struct Prepared {
    std::shared_ptr<const ProblemInstance> problem;
    Vec x0;
    LipschitzEstimate lip;
  };
  std::vector<Prepared> prepared;
  for (const auto& p : spec.problems) {
    auto problem = std::make_shared<const ProblemInstance>(make_synthetic_degenerate(p.n, p.m, p.kind, p.seed));
    Vec x0 = synthetic_start(*problem, p.seed);
    const LipschitzEstimate lip = estimate_lipschitz(*problem, x0, kLipschitzSamples, kLipschitzRadius, p.seed);
    prepared.push_back({problem, std::move(x0), lip});
  }

  std::vector<std::function<std::vector<RunRecord>()>> jobs;
  for (const auto& prep : prepared) {
    for (double noise : spec.noises) {
      for (std::uint64_t seed : spec.seeds) {
        jobs.emplace_back([&spec, &prep, noise, seed]() {
          const ProblemInstance& problem = *prep.problem;
          const std::string setting = noise_setting(noise);
          const OracleSpec oracle_spec = OracleSpec::gaussian(noise);
          std::vector<RunRecord> out;

          SolverConfig config = spec.base_config;
          config.L = prep.lip.L;
          config.Gamma = prep.lip.Gamma;
          config.max_iter = spec.budget;
          GradientOracle oracle(oracle_spec, run_seed(seed, problem.name, setting, "sqp"));
          out.push_back(summarize_sqp(problem.name, setting, seed, solve(problem, oracle, config, prep.x0), kTailWindow));

          if (spec.include_subgradient) {
            const TuneResult tuned = tune_grid(BaselineMethod::Subgradient, problem, oracle_spec, spec.subgradient_grid,
                                               spec.subgradient_factor * spec.budget, prep.x0, prep.lip.L,
                                               prep.lip.Gamma, run_seed(seed, problem.name, setting, "subgradient"));
            out.push_back(summarize_baseline(problem.name, setting, seed, tuned));
          }
          return out;
        });
      }
    }
  }
  return run_jobs(jobs, spec.workers);
}

std::vector<RunRecord> run_logistic_experiment(const LogisticExperimentSpec& spec) {
  spec.validate();
  const ProblemInstance problem =
      make_logistic_problem(spec.dataset, spec.num_linear, spec.with_norm_constraint, spec.constraint_seed);
  const Vec x0 = Vec::Zero(problem.n);
  const LipschitzEstimate lip =
      estimate_lipschitz(problem, x0, kLipschitzSamples, kLipschitzRadius, spec.constraint_seed);
  const bool projected = spec.include_projected_gradient && !spec.with_norm_constraint;

  std::vector<std::function<std::vector<RunRecord>()>> jobs;
  for (std::size_t batch : spec.batches) {
    for (std::uint64_t seed : spec.seeds) {
      jobs.emplace_back([&, batch, seed]() {
        const std::string setting = batch_setting(batch);
        const OracleSpec oracle_spec = OracleSpec::minibatch(std::min(batch, problem.num_samples));
        const long epoch = epoch_length(problem.num_samples, batch);
        const long budget = spec.epochs * epoch;
        std::vector<RunRecord> out;

        SolverConfig config = spec.base_config;
        config.L = lip.L;
        config.Gamma = lip.Gamma;
        config.max_iter = budget;
        GradientOracle oracle(oracle_spec, run_seed(seed, problem.name, setting, "sqp"));
        out.push_back(summarize_sqp(problem.name, setting, seed, solve(problem, oracle, config, x0), epoch));

        if (spec.include_subgradient) {
          const TuneResult tuned = tune_grid(BaselineMethod::Subgradient, problem, oracle_spec, spec.subgradient_grid,
                                             budget, x0, lip.L, lip.Gamma,
                                             run_seed(seed, problem.name, setting, "subgradient"));
          out.push_back(summarize_baseline(problem.name, setting, seed, tuned));
        }
        if (projected) {
          const TuneResult tuned =
              tune_grid(BaselineMethod::ProjectedGradient, problem, oracle_spec, spec.projected_grid, budget, x0,
                        lip.L, lip.Gamma, run_seed(seed, problem.name, setting, "projected-gradient"));
          out.push_back(summarize_baseline(problem.name, setting, seed, tuned));
        }
        return out;
      });
    }
  }
  return run_jobs(jobs, spec.workers);
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  std::vector<SummaryRow> rows;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const auto& r : records) {
    auto& g = groups[{r.problem, r.method, r.setting}];
    if (g.empty()) rows.push_back({r.problem, r.method, r.setting});
    g.push_back(&r);
  }
  auto mean_ci = [](const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x / n;
    if (xs.size() < 2) return std::pair{mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair{mean, 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
  };
  for (auto& row : rows) {
    const auto& g = groups[{row.problem, row.method, row.setting}];
    std::vector<double> feas, stat;
    for (const RunRecord* r : g) {
      feas.push_back(r->feas_err);
      stat.push_back(r->stat_err);
    }
    row.runs = g.size();
    std::tie(row.feas_mean, row.feas_ci) = mean_ci(feas);
    std::tie(row.stat_mean, row.stat_ci) = mean_ci(stat);
  }
  return rows;
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "markdown" || s == "md") return ReportFormat::Markdown;
  throw UsageError("unknown report format '" + s + "'");
}

std::string render_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "problem,method,setting,seed,best_index,feas_err,stat_err,wall_ms\n";
  for (const auto& r : records) {
    out << r.problem << ',' << r.method << ',' << r.setting << ',' << r.seed << ',' << r.best_index << ','
        << format_double("%.6e", r.feas_err) << ',' << format_double("%.6e", r.stat_err) << ','
        << format_double("%.3f", r.wall_ms) << '\n';
  }
  return out.str();
}

std::string render_json(const std::vector<RunRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    arr.push_back({{"problem", r.problem},
                   {"method", r.method},
                   {"setting", r.setting},
                   {"seed", r.seed},
                   {"best_index", r.best_index},
                   {"feas_err", number_or_null(r.feas_err)},
                   {"stat_err", number_or_null(r.stat_err)},
                   {"wall_ms", r.wall_ms},
                   {"oracle_calls", r.oracle_calls},
                   {"status", r.status},
                   {"tuned", r.tuned},
                   {"merit_rate", r.merit_rate},
                   {"final_epoch_ok", r.final_epoch_ok}});
  }
  return arr.dump(2) + "\n";
}

std::vector<RunRecord> parse_report_json(const std::string& text) {
  std::vector<RunRecord> out;
  try {
    const auto arr = nlohmann::json::parse(text);
    for (const auto& j : arr) {
      RunRecord r;
      r.problem = j.at("problem").get<std::string>();
      r.method = j.at("method").get<std::string>();
      r.setting = j.at("setting").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.best_index = j.at("best_index").get<long>();
      r.feas_err = number_from(j.at("feas_err"));
      r.stat_err = number_from(j.at("stat_err"));
      r.wall_ms = j.at("wall_ms").get<double>();
      r.oracle_calls = j.value("oracle_calls", std::size_t{0});
      r.status = j.value("status", std::string("ok"));
      r.tuned = j.value("tuned", std::string());
      r.merit_rate = j.value("merit_rate", -1.0);
      r.final_epoch_ok = j.value("final_epoch_ok", false);
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("report json: ") + e.what());
  }
  return out;
}

std::string render_markdown(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "| problem | method | setting | seed | best_index | feas_err | stat_err | wall_ms |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : records) {
    out << "| " << r.problem << " | " << r.method << " | " << r.setting << " | " << r.seed << " | " << r.best_index
        << " | " << format_double("%.2e", r.feas_err) << " | " << format_double("%.2e", r.stat_err) << " | "
        << format_double("%.1f", r.wall_ms) << " |\n";
  }
  return out.str();
}

std::string render_summary_markdown(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "| problem | setting | method | runs | feasibility | stationarity |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out << "| " << r.problem << " | " << r.setting << " | " << r.method << " | " << r.runs << " | "
        << format_double("%.2e", r.feas_mean) << " ± " << format_double("%.2e", r.feas_ci) << " | "
        << format_double("%.2e", r.stat_mean) << " ± " << format_double("%.2e", r.stat_ci) << " |\n";
  }
  return out.str();
}

std::string emit_report(const std::vector<RunRecord>& records, ReportFormat format, const std::string& out_dir) {
  if (records.empty()) throw UsageError("emit_report: no records");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  std::string name, body;
  switch (format) {
    case ReportFormat::Csv: name = "report.csv"; body = render_csv(records); break;
    case ReportFormat::Json: name = "report.json"; body = render_json(records); break;
    case ReportFormat::Markdown: name = "report.md"; body = render_markdown(records); break;
  }
  const std::string path = (fs::path(out_dir) / name).string();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << body;
  if (!out) throw IoError("write failed for " + path);
  if (format == ReportFormat::Markdown) {
    // mean and confidence half-width per group, next to the per-run table
    std::ofstream summary(fs::path(out_dir) / "summary.md");
    summary << render_summary_markdown(summarize(records));
    if (!summary) throw IoError("cannot write summary.md in " + out_dir);
  }
  return path;
}

}  // namespace ssqp
