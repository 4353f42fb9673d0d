#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ssqp/best_iterate.hpp"
#include "ssqp/errors.hpp"
#include "ssqp/harness.hpp"

using namespace ssqp;

namespace {

std::shared_ptr<const Dataset> australian() {
  static const auto data = std::make_shared<const Dataset>(parse_libsvm(std::string(SSQP_DATA_DIR) + "/australian"));
  return data;
}

std::vector<IterateStats> stats_from(const std::vector<double>& feas, const std::vector<double>& stat) {
  std::vector<IterateStats> out;
  for (std::size_t i = 0; i < feas.size(); ++i) out.push_back({feas[i], stat[i], 0.0, feas[i]});
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string strip_wall_ms(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

}  // namespace

TEST(BestIterate, LastSufficientlyFeasibleWins) {
  // c0 = 2 so the threshold is 2e-6.
  std::vector<double> feas{2.0, 1.0, 1e-3, 1e-7, 5e-1, 1e-6, 3e-1, 1.9e-6, 1e-2, 2e-2};
  std::vector<double> stat(10);
  for (int i = 0; i < 10; ++i) stat[i] = 10.0 - i;
  const BestIterate b = best_iterate(stats_from(feas, stat), 2.0);
  EXPECT_EQ(b.index, 7u);
  EXPECT_TRUE(b.sufficiently_feasible);
  EXPECT_DOUBLE_EQ(b.stat_err, 3.0);
}

TEST(BestIterate, FallsBackToLeastInfeasibleFirstOnTies) {
  std::vector<double> feas{5.0, 4.0, 0.5, 3.0, 0.5, 0.9, 1.0, 2.0, 0.7, 0.6};
  const BestIterate b = best_iterate(stats_from(feas, std::vector<double>(10, 1.0)), 5.0);
  EXPECT_EQ(b.index, 2u);
  EXPECT_FALSE(b.sufficiently_feasible);
  EXPECT_DOUBLE_EQ(b.feas_err, 0.5);
}

TEST(BestIterate, LastIndexAndNonFinite) {
  std::vector<double> feas{1.0, NAN, 0.5, INFINITY, 0.0};
  EXPECT_EQ(best_iterate(stats_from(feas, std::vector<double>(5, 1.0)), 1.0).index, 4u);
  std::vector<double> bad{NAN, INFINITY, 3.0};
  EXPECT_EQ(best_iterate(stats_from(bad, std::vector<double>(3, 1.0)), 3.0).index, 2u);
}

TEST(BestIterate, ThresholdClampedByOne) {
  // With c0 = 1e-3 the threshold stays at 1e-6, not 1e-9.
  std::vector<double> feas{1e-3, 5e-7, 1e-2};
  const BestIterate b = best_iterate(stats_from(feas, {1.0, 2.0, 3.0}), 1e-3);
  EXPECT_EQ(b.index, 1u);
  EXPECT_TRUE(b.sufficiently_feasible);
}

TEST(BestIterate, Ranking) {
  const BestIterate feasible_good{0, 1e-9, 1e-4, true};
  const BestIterate feasible_bad{0, 1e-12, 1e-2, true};
  const BestIterate infeasible{0, 1e-3, 1e-9, false};
  EXPECT_TRUE(better(feasible_good, feasible_bad));
  EXPECT_TRUE(better(feasible_bad, infeasible));
  EXPECT_FALSE(better(infeasible, feasible_bad));
  EXPECT_TRUE(better(BestIterate{0, 1e-4, 1.0, false}, infeasible));
  EXPECT_FALSE(better(feasible_good, feasible_good));
}

TEST(BestIterate, TrackerMatchesBatchRule) {
  const ProblemInstance p = make_synthetic_degenerate(10, 4, SyntheticKind::Feasible, 2);
  std::vector<Vec> xs;
  std::vector<IterateStats> stats;
  for (int i = 0; i < 12; ++i) {
    const double t = std::pow(0.1, i);
    xs.push_back(*p.feasible_point + t * Vec::Ones(10));
  }
  BestIterateTracker tracker;
  for (const auto& x : xs) {
    tracker.observe(p, x);
    stats.push_back(iterate_stats(p, x));
  }
  const BestIterate a = tracker.finish(p);
  const BestIterate b = best_iterate(stats, stats.front().feas_inf);
  EXPECT_EQ(a.index, b.index);
  EXPECT_DOUBLE_EQ(a.feas_err, b.feas_err);
  EXPECT_DOUBLE_EQ(a.stat_err, b.stat_err);
}

TEST(Report, CsvHeaderIsExact) {
  const std::string csv = render_csv({RunRecord{"p", "sqp", "noise=1e-02", 3, 7, 1e-9, 2e-3, 12.5}});
  const auto lines = split(csv, '\n');
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "problem,method,setting,seed,best_index,feas_err,stat_err,wall_ms");
  EXPECT_EQ(split(lines[1], ',').size(), 8u);
  EXPECT_EQ(split(lines[1], ',')[4], "7");
}

TEST(Report, JsonRoundTrip) {
  RunRecord a{"p", "sqp", "batch=16", 4, 11, 1.2345678901234567e-7, INFINITY, 3.25};
  a.oracle_calls = 99;
  a.status = "failure: x";
  a.merit_rate = 0.975;
  a.final_epoch_ok = true;
  RunRecord b{"q", "subgradient", "noise=1e-08", 0, 0, 0.5, 0.25, 1.0};
  b.tuned = "tau=1e-03,beta=1e-01";
  const std::vector<RunRecord> records{a, b};
  EXPECT_EQ(parse_report_json(render_json(records)), records);
  EXPECT_THROW(parse_report_json("{not json"), InputError);
}

TEST(Report, MarkdownRowCount) {
  std::vector<RunRecord> records(5, RunRecord{"p", "sqp", "s", 0, 0, 0.0, 0.0, 0.0});
  EXPECT_EQ(split(render_markdown(records), '\n').size(), 7u);
  const auto rows = summarize(records);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(split(render_summary_markdown(rows), '\n').size(), 3u);
}

TEST(Report, SummaryMeanAndInterval) {
  std::vector<RunRecord> records;
  for (double v : {1.0, 2.0, 3.0, 4.0, 5.0}) records.push_back({"p", "sqp", "s", 0, 0, v, 2.0 * v, 0.0});
  records.push_back({"p", "subgradient", "s", 0, 0, 7.0, 7.0, 0.0});
  const auto rows = summarize(records);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].runs, 5u);
  EXPECT_DOUBLE_EQ(rows[0].feas_mean, 3.0);
  // sample sd of 1..5 is sqrt(2.5)
  EXPECT_NEAR(rows[0].feas_ci, 1.96 * std::sqrt(2.5) / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(rows[0].stat_ci, 2.0 * rows[0].feas_ci, 1e-12);
  EXPECT_EQ(rows[1].feas_ci, 0.0);
}

TEST(Report, FormatsAndEmit) {
  EXPECT_EQ(report_format_from_string("csv"), ReportFormat::Csv);
  EXPECT_EQ(report_format_from_string("md"), ReportFormat::Markdown);
  EXPECT_THROW(report_format_from_string("xml"), UsageError);

  const std::vector<RunRecord> records{RunRecord{"p", "sqp", "s", 1, 2, 3.0, 4.0, 5.0}};
  const auto dir = std::filesystem::temp_directory_path() / "ssqp_emit_test";
  std::filesystem::remove_all(dir);
  const std::string path = emit_report(records, ReportFormat::Json, (dir / "nested").string());
  std::ifstream in(path);
  std::stringstream body;
  body << in.rdbuf();
  EXPECT_EQ(parse_report_json(body.str()), records);
  std::filesystem::remove_all(dir);

  EXPECT_THROW(emit_report(records, ReportFormat::Csv, "/proc/ssqp_cannot_write"), IoError);
  EXPECT_THROW(emit_report({}, ReportFormat::Csv, dir.string()), UsageError);
}

TEST(Harness, EpochLength) {
  EXPECT_EQ(epoch_length(690, 16), 44);
  EXPECT_EQ(epoch_length(690, 690), 1);
  EXPECT_EQ(epoch_length(64, 16), 4);
  EXPECT_THROW(epoch_length(10, 0), UsageError);
}

TEST(Harness, RunSeedKeyedByLabels) {
  EXPECT_EQ(run_seed(1, "a", "b", "sqp"), run_seed(1, "a", "b", "sqp"));
  std::set<std::uint64_t> seen{run_seed(1, "a", "b", "sqp"), run_seed(2, "a", "b", "sqp"),
                               run_seed(1, "x", "b", "sqp"), run_seed(1, "a", "y", "sqp"),
                               run_seed(1, "a", "b", "subgradient")};
  EXPECT_EQ(seen.size(), 5u);
}

TEST(Harness, SyntheticGridShapeAndNoiseOrdering) {
  SyntheticExperimentSpec spec;
  spec.problems = {{20, 6, SyntheticKind::Feasible, 1}, {24, 8, SyntheticKind::Feasible, 2}};
  spec.budget = 300;
  spec.include_subgradient = false;
  spec.workers = 4;
  const auto records = run_cutest_style_experiment(spec);
  ASSERT_EQ(records.size(), 80u);
  std::map<std::pair<std::string, std::string>, std::vector<double>> stat;
  for (const auto& r : records) {
    EXPECT_EQ(r.method, "sqp");
    EXPECT_LE(r.best_index, spec.budget);
    stat[{r.problem, r.setting}].push_back(r.stat_err);
  }
  for (const auto& p : spec.problems) {
    const auto& lo = stat.at({p.name(), "noise=1e-08"});
    const auto& hi = stat.at({p.name(), "noise=1e-01"});
    ASSERT_EQ(lo.size(), 10u);
    EXPECT_LT(median(lo), median(hi)) << p.name();
  }
}

TEST(Harness, SyntheticDeterministicExceptWallTime) {
  SyntheticExperimentSpec spec;
  spec.problems = {{12, 4, SyntheticKind::RankDeficientEverywhere, 5}};
  spec.noises = {1e-2};
  spec.seeds = {0, 1};
  spec.budget = 20;
  spec.subgradient_factor = 1;
  spec.subgradient_grid = TuneGrid{{1e-2, 1.0}, {0.1, 1.0}};
  const auto a = run_cutest_style_experiment(spec);
  spec.workers = 3;
  const auto b = run_cutest_style_experiment(spec);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(strip_wall_ms(render_csv(a)), strip_wall_ms(render_csv(b)));
  EXPECT_EQ(a[1].method, "subgradient");
  EXPECT_FALSE(a[1].tuned.empty());
}

TEST(Harness, ValidationErrors) {
  SyntheticExperimentSpec s;
  EXPECT_THROW(run_cutest_style_experiment(s), UsageError);
  s.problems = {{10, 3, SyntheticKind::Feasible, 0}};
  s.budget = 0;
  EXPECT_THROW(run_cutest_style_experiment(s), UsageError);
  LogisticExperimentSpec l;
  EXPECT_THROW(run_logistic_experiment(l), UsageError);
  l.dataset = australian();
  l.epochs = 0;
  EXPECT_THROW(run_logistic_experiment(l), UsageError);
}

TEST(Harness, LogisticFiveSeedsAndSummary) {
  LogisticExperimentSpec spec;
  spec.dataset = australian();
  spec.batches = {128};
  spec.epochs = 1;
  spec.subgradient_grid = TuneGrid{{1e-2}, {1e-1}};
  spec.projected_grid = TuneGrid{{}, {1e-1}};
  spec.workers = 2;
  const auto records = run_logistic_experiment(spec);
  ASSERT_EQ(records.size(), 15u);
  for (const auto& r : records) {
    EXPECT_EQ(r.setting, "batch=128");
    if (r.method == "sqp") EXPECT_GE(r.merit_rate, 0.0);
  }
  const auto rows = summarize(records);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) EXPECT_EQ(row.runs, 5u);
}

TEST(Harness, NormVariantSkipsProjection) {
  LogisticExperimentSpec spec;
  spec.dataset = australian();
  spec.with_norm_constraint = true;
  spec.batches = {690};
  spec.seeds = {0};
  spec.epochs = 3;
  spec.subgradient_grid = TuneGrid{{1e-2}, {1e-1}};
  const auto records = run_logistic_experiment(spec);
  ASSERT_EQ(records.size(), 2u);
  for (const auto& r : records) EXPECT_NE(r.method, "projected-gradient");
}
