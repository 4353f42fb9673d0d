#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ssqp/config_io.hpp"
#include "ssqp/errors.hpp"
#include "ssqp/merit.hpp"

using namespace ssqp;

namespace {

// f(x) = x_0 + 1 (so f = 2 at x_0 = 1), c(x) = (x_1, x_2).
ProblemInstance toy() {
  ProblemInstance p;
  p.name = "toy";
  p.n = 3;
  p.m = 2;
  p.objective = [](const Vec& x) { return x(0) + 1.0; };
  p.gradient = [](const Vec& x) { return Vec(Vec::Unit(x.size(), 0)); };
  p.constraints = [](const Vec& x) { return Vec(x.tail(2)); };
  p.jacobian = [](const Vec&) {
    Mat J = Mat::Zero(2, 3);
    J(0, 1) = 1;
    J(1, 2) = 1;
    return J;
  };
  return p;
}

Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }
Vec v1(double a) { return (Vec(1) << a).finished(); }

}  // namespace

TEST(Merit, PhiFormula) {
  const ProblemInstance p = toy();
  const Vec x = v3(1.0, 0.0, 3.0);  // f = 2, ||c|| = 3
  EXPECT_DOUBLE_EQ(merit_phi(p, x, 1.0), 5.0);
  EXPECT_DOUBLE_EQ(merit_phi(p, x, 0.0), 3.0);
  EXPECT_DOUBLE_EQ(merit_phi(p, v3(1.0, 0.0, 0.0), 0.7), 0.7 * 2.0);
  EXPECT_THROW(merit_phi(p, x, -1.0), UsageError);
}

TEST(Merit, ModelReductionExamples) {
  const Vec c = v1(2.0);
  EXPECT_DOUBLE_EQ(model_reduction(1.0, v1(3.0), v1(0.0), c, v1(0.0)), 0.0);
  // g^T d = -1, ||c|| = 2, ||c + Jd|| = 1
  EXPECT_DOUBLE_EQ(model_reduction(1.0, v1(1.0), v1(-1.0), c, v1(-1.0)), 2.0);
}

TEST(Merit, TrialParameterExamples) {
  const SymmetricOperator I;
  // g^T d + u^T u = -0.3
  EXPECT_EQ(trial_merit_parameter(v1(-0.3), v1(1.0), v1(0.0), I, v1(1.0), v1(0.0), 0.5), kInf);
  // ||c|| = 1, ||c + Jd|| = 0, denominator 1
  EXPECT_DOUBLE_EQ(trial_merit_parameter(v1(1.0), v1(1.0), v1(0.0), I, v1(1.0), v1(-1.0), 0.5), 0.5);
  // equal norms
  EXPECT_DOUBLE_EQ(trial_merit_parameter(v1(1.0), v1(1.0), v1(0.0), I, v1(1.0), v1(-2.0), 0.5), 0.0);
  // zero denominator also gives +inf
  EXPECT_EQ(trial_merit_parameter(v1(0.0), v1(1.0), v1(0.0), I, v1(1.0), v1(-1.0), 0.5), kInf);
}

TEST(Merit, UpdateExamples) {
  EXPECT_EQ(update_merit_parameter(1.0, kInf, 0.01), 1.0);
  EXPECT_DOUBLE_EQ(update_merit_parameter(1.0, 0.4, 0.01), 0.4);
  EXPECT_DOUBLE_EQ(update_merit_parameter(1.0, 0.995, 0.01), 0.99);
  for (double trial : {0.0, 0.3, 0.99, 1.0, 2.0, kInf}) {
    const double tau = update_merit_parameter(1.0, trial, 0.01);
    EXPECT_LE(tau, trial);
    EXPECT_LE(tau, 1.0);
  }
}

TEST(Curvature, ZeroTangentialStepLeavesParameters) {
  const CurvatureUpdate r =
      update_curvature_params(1e-3, 1e3, Vec::Zero(2), Vec::Ones(2), Vec::Ones(2), SymmetricOperator{}, 1e-2, 1e-2);
  EXPECT_FALSE(r.fired);
  EXPECT_EQ(r.chi, 1e-3);
  EXPECT_EQ(r.zeta, 1e3);
}

TEST(Curvature, IdentityHessianWithSmallZeta) {
  for (double zeta : {0.5, 1.0, 2.0}) {
    const Vec u = v3(0.3, -1.0, 2.0);
    const CurvatureUpdate r = update_curvature_params(1e-3, zeta, u, Vec::Zero(3), u, SymmetricOperator{}, 1e-2, 1e-2);
    EXPECT_FALSE(r.fired) << zeta;
  }
}

TEST(Curvature, NullDirectionOfHFires) {
  // H = diag(0, 1, 1) and d along e_0 so d^T H d = 0; ||u||^2 = chi ||v||^2 exactly.
  const Mat H = v3(0.0, 1.0, 1.0).asDiagonal();
  const double chi = 0.25;
  const Vec u = v3(1.0, 0.0, 0.0);
  const Vec v = v3(2.0, 0.0, 0.0);  // ||u||^2 = 1 = 0.25 * 4
  const Vec d = u + v;
  ASSERT_EQ(d.dot(H * d), 0.0);
  const CurvatureUpdate r = update_curvature_params(chi, 3.0, u, v, d, SymmetricOperator::dense(H), 0.1, 0.2);
  EXPECT_TRUE(r.fired);
  EXPECT_DOUBLE_EQ(r.chi, 1.1 * chi);
  EXPECT_DOUBLE_EQ(r.zeta, 0.8 * 3.0);
}

TEST(Curvature, DominationThreshold) {
  EXPECT_TRUE(tangentially_dominated(v1(1.0), v1(2.0), 0.25));
  EXPECT_FALSE(tangentially_dominated(v1(1.0), v1(2.0), 0.26));
  EXPECT_TRUE(tangentially_dominated(v1(0.0), v1(0.0), 1.0));
}

TEST(Ratio, Examples) {
  const Vec d = v3(2.0, 0.0, 0.0);  // ||d||^2 = 4
  EXPECT_DOUBLE_EQ(update_ratio_param(1.0, 2.0, 1.0, d, true, 0.01).xi_trial, 0.5);
  EXPECT_DOUBLE_EQ(update_ratio_param(1.0, 2.0, 0.5, d, true, 0.01).xi_trial, 1.0);
  EXPECT_DOUBLE_EQ(update_ratio_param(1.0, 2.0, 0.5, d, false, 0.01).xi_trial, 0.5);
  EXPECT_DOUBLE_EQ(update_ratio_param(0.1, 2.0, 1.0, d, true, 0.01).xi, 0.1);
  // xi_trial = 0.995 via delta_l = 3.98
  EXPECT_DOUBLE_EQ(update_ratio_param(1.0, 3.98, 1.0, d, true, 0.01).xi, 0.99);
}

TEST(StepSize, SufficientRuleExample) {
  SolverConfig c;
  c.step_rule = StepRule::Sufficient;
  c.theta = 1e4;
  const StepSize s = step_size(1.0, 1.0, 1e-6, 1.0, 1.0, 0.0, c, true);
  EXPECT_DOUBLE_EQ(s.alpha_suff, 0.5);
  EXPECT_DOUBLE_EQ(s.alpha, 0.5);
}

TEST(StepSize, ProjectionClampsFromBelow) {
  SolverConfig c;
  c.step_rule = StepRule::Sufficient;
  c.theta = 0.0;
  // lo = 2(1 - eta) beta xi / (tau L + Gamma) = 1 * 1 * 0.8 / 2 = 0.4 > alpha_suff = 0.05
  const StepSize s = step_size(0.1, 1.0, 0.8, 1.0, 1.0, 0.0, c, false);
  EXPECT_DOUBLE_EQ(s.alpha_suff, 0.05);
  EXPECT_DOUBLE_EQ(s.lo, 0.4);
  EXPECT_DOUBLE_EQ(s.alpha, 0.4);
}

TEST(StepSize, ProjectionClampsFromAbove) {
  SolverConfig c;
  c.step_rule = StepRule::Sufficient;
  c.theta = 0.0;
  const StepSize s = step_size(100.0, 1.0, 1e-3, 1.0, 1.0, 0.0, c, false);
  EXPECT_DOUBLE_EQ(s.alpha_suff, 1.0);
  EXPECT_DOUBLE_EQ(s.alpha, s.hi);
  EXPECT_DOUBLE_EQ(s.hi, s.lo);
}

TEST(StepSize, AlphaMinHandEvaluation) {
  SolverConfig c;  // eta = 1/2, L = Gamma = 1, max-suff-min
  // beta dl / ((tau L + Gamma) ||d||^2) = 0.5 * 0.6 / (2 * 1) = 0.15; the second branch (0.3 - 2 * 0) / 2 = 0.15
  StepSize s = step_size(0.6, 1.0, 1e-9, 1.0, 0.5, 0.0, c, false);
  EXPECT_DOUBLE_EQ(s.alpha_min, 0.15);
  EXPECT_DOUBLE_EQ(s.alpha_suff, 0.15);
  // With ||c|| > 0 the second branch is inactive.
  s = step_size(0.6, 1.0, 1e-9, 1.0, 0.5, 1.0, c, false);
  EXPECT_DOUBLE_EQ(s.alpha_min, 0.15);
  // A large reduction makes the second branch exceed 1.
  s = step_size(10.0, 1.0, 1e-9, 1.0, 1.0, 1.0, c, false);
  EXPECT_DOUBLE_EQ(s.alpha_min, (10.0 - 2.0) / 2.0);
  EXPECT_DOUBLE_EQ(s.alpha_trial, 4.0);
}

TEST(StepSize, IntervalCoefficientByRule) {
  SolverConfig c;
  c.eta = 0.25;
  c.step_rule = StepRule::Sufficient;
  EXPECT_DOUBLE_EQ(c.interval_coefficient(), 1.5);
  c.step_rule = StepRule::MaxSuffMin;
  EXPECT_DOUBLE_EQ(c.interval_coefficient(), 1.0);
  c.eta = 0.75;
  EXPECT_DOUBLE_EQ(c.interval_coefficient(), 0.5);
}

TEST(StepSize, DominatedIntervalScalesWithTau) {
  SolverConfig c;
  c.L = 2.0;
  c.Gamma = 3.0;
  c.theta = 10.0;
  const auto [lo_n, hi_n] = projection_interval(0.5, 0.2, 0.5, c, false);
  const auto [lo_t, hi_t] = projection_interval(0.5, 0.2, 0.5, c, true);
  EXPECT_DOUBLE_EQ(lo_n, 1.0 * 0.5 * 0.2 / (0.5 * 2.0 + 3.0));
  EXPECT_DOUBLE_EQ(lo_t, 0.5 * lo_n);
  EXPECT_DOUBLE_EQ(hi_n - lo_n, 10.0 * 0.25);
  EXPECT_DOUBLE_EQ(hi_t - lo_t, 10.0 * 0.25);
}

TEST(DeterministicBeta, Formula) {
  SolverConfig c;
  c.Gamma = 0.3;
  EXPECT_DOUBLE_EQ(deterministic_beta(c), 0.3);
  c.Gamma = 5.0;
  EXPECT_DOUBLE_EQ(deterministic_beta(c), 1.0);
  c.Gamma = 0.3;
  c.xi_init = 2.0;
  c.tau_init = 3.0;
  EXPECT_DOUBLE_EQ(deterministic_beta(c), 0.3 / 6.0);
}

TEST(BetaSchedule, Sequences) {
  EXPECT_DOUBLE_EQ(BetaSchedule::constant(0.3).base(7), 0.3);
  EXPECT_DOUBLE_EQ(BetaSchedule::diminishing(1.0, 1.0).base(0), 1.0);
  EXPECT_DOUBLE_EQ(BetaSchedule::diminishing(1.0, 1.0).base(3), 0.25);
  EXPECT_DOUBLE_EQ(BetaSchedule::diminishing(1.0, 0.5).base(3), 0.5);
  EXPECT_EQ(beta_kind_from_string(to_string(BetaSchedule::Kind::Reset)), BetaSchedule::Kind::Reset);
  EXPECT_THROW(beta_kind_from_string("geometric"), UsageError);
}

TEST(Config, ValidateRejectsOutOfRange) {
  EXPECT_NO_THROW(SolverConfig{}.validate());
  auto bad = [](auto mutate) {
    SolverConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](SolverConfig& c) { c.L = 0; }).validate(), UsageError);
  EXPECT_THROW(bad([](SolverConfig& c) { c.Gamma = -1; }).validate(), UsageError);
  EXPECT_THROW(bad([](SolverConfig& c) { c.eps_v = 1.5; }).validate(), UsageError);
  EXPECT_THROW(bad([](SolverConfig& c) { c.sigma = 1.0; }).validate(), UsageError);
  EXPECT_THROW(bad([](SolverConfig& c) { c.eps_tau = 0.0; }).validate(), UsageError);
  EXPECT_THROW(bad([](SolverConfig& c) { c.eta = 1.0; }).validate(), UsageError);
  EXPECT_THROW(bad([](SolverConfig& c) { c.theta = -1.0; }).validate(), UsageError);
  EXPECT_THROW(bad([](SolverConfig& c) { c.beta_schedule = BetaSchedule::constant(1.5); }).validate(), UsageError);
  EXPECT_THROW(bad([](SolverConfig& c) { c.term_tol_c = -1; }).validate(), UsageError);
}

TEST(ConfigIo, RoundTripAndOverrides) {
  SolverConfig c;
  c.L = 3.5;
  c.beta_schedule = BetaSchedule::diminishing(0.5, 0.7);
  c.step_rule = StepRule::Sufficient;
  c.max_iter = 77;
  const SolverConfig back = parse_solver_config(dump_solver_config(c));
  EXPECT_EQ(back.L, 3.5);
  EXPECT_EQ(back.beta_schedule.kind, BetaSchedule::Kind::Diminishing);
  EXPECT_EQ(back.beta_schedule.beta, 0.5);
  EXPECT_EQ(back.beta_schedule.decay, 0.7);
  EXPECT_EQ(back.step_rule, StepRule::Sufficient);
  EXPECT_EQ(back.max_iter, 77);

  const SolverConfig o = parse_solver_config(R"({"beta_schedule": 0.1, "theta": 0, "step_rule": "max"})");
  EXPECT_EQ(o.beta_schedule.kind, BetaSchedule::Kind::Constant);
  EXPECT_EQ(o.beta_schedule.beta, 0.1);
  EXPECT_EQ(o.theta, 0.0);
  EXPECT_EQ(o.step_rule, StepRule::MaxSuffMin);
}

TEST(ConfigIo, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_solver_config(R"({"lipschitz": 1})"), UsageError);
  EXPECT_THROW(parse_solver_config(R"({"sigma": 2})"), UsageError);
  EXPECT_THROW(parse_solver_config("[1, 2]"), UsageError);
  EXPECT_THROW(parse_solver_config("{not json"), UsageError);
  EXPECT_THROW(load_solver_config("/nonexistent/config.json"), IoError);
}
