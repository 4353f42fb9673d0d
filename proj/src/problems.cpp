#include "ssqp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ssqp/errors.hpp"

namespace ssqp {

void check_dimensions(const ProblemInstance& problem, const Vec& x) {
  if (x.size() != problem.n) {
    throw UsageError("point has dimension " + std::to_string(x.size()) + ", expected " +
                     std::to_string(problem.n));
  }
  const Vec c = problem.constraints(x);
  const Mat J = problem.jacobian(x);
  if (c.size() != problem.m || J.rows() != problem.m || J.cols() != problem.n) {
    throw UsageError("constraint shapes do not match (m, m x n) for " + problem.name);
  }
}

namespace {

// log(1 + exp(-t)) without overflow
double logistic_loss(double t) {
  return t > 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

// d/dt log(1 + exp(-t)) = -1 / (1 + exp(t))
double logistic_slope(double t) {
  if (t > 0) {
    const double e = std::exp(-t);
    return -e / (1.0 + e);
  }
  return -1.0 / (1.0 + std::exp(t));
}

Vec normal_vector(Eigen::Index n, Rng& rng) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

ProblemInstance make_logistic_problem(std::shared_ptr<const Dataset> data, int num_linear,
                                      bool with_norm_constraint, std::uint64_t seed) {
  if (!data || data->size() == 0) throw UsageError("logistic problem needs a nonempty dataset");
  if (num_linear < 1) throw UsageError("logistic problem needs at least one linear constraint");

  const Eigen::Index n = data->dim();
  const Eigen::Index rows = num_linear + 1;
  Rng rng(seed);
  Mat A(rows, n);
  Vec b(rows);
  for (Eigen::Index i = 0; i < num_linear; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = rng.normal();
    b(i) = rng.normal();
  }
  A.row(num_linear) = A.row(num_linear - 1);
  b(num_linear) = b(num_linear - 1);

  ProblemInstance p;
  p.name = data->name + (with_norm_constraint ? "-norm" : "-linear");
  p.n = n;
  p.m = rows + (with_norm_constraint ? 1 : 0);
  p.num_samples = static_cast<std::size_t>(data->size());

  p.objective = [data](const Vec& x) {
    const Vec z = data->features.transpose() * x;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) sum += logistic_loss(data->labels(i) * z(i));
    return sum / static_cast<double>(z.size());
  };
  p.gradient = [data](const Vec& x) {
    const Vec z = data->features.transpose() * x;
    Vec w(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double y = data->labels(i);
      w(i) = y * logistic_slope(y * z(i));
    }
    return Vec(data->features * w / static_cast<double>(z.size()));
  };
  p.batch_gradient = [data](const Vec& x, std::span<const std::size_t> idx) {
    Vec g = Vec::Zero(data->dim());
    for (std::size_t k : idx) {
      const auto col = data->features.col(static_cast<Eigen::Index>(k));
      const double y = data->labels(static_cast<Eigen::Index>(k));
      const double s = y * logistic_slope(y * col.dot(x));
      for (Eigen::SparseMatrix<double>::InnerIterator it(data->features, static_cast<Eigen::Index>(k));
           it; ++it) {
        g(it.row()) += s * it.value();
      }
    }
    return Vec(g / static_cast<double>(idx.size()));
  };

  p.constraints = [A, b, with_norm_constraint](const Vec& x) {
    Vec c(A.rows() + (with_norm_constraint ? 1 : 0));
    c.head(A.rows()) = A * x - b;
    if (with_norm_constraint) c(A.rows()) = x.squaredNorm() - 1.0;
    return c;
  };
  p.jacobian = [A, with_norm_constraint](const Vec& x) {
    Mat J(A.rows() + (with_norm_constraint ? 1 : 0), A.cols());
    J.topRows(A.rows()) = A;
    if (with_norm_constraint) J.row(A.rows()) = 2.0 * x.transpose();
    return J;
  };
  if (!with_norm_constraint) p.affine = AffineConstraints{A, b};
  return p;
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::Feasible: return "feasible";
    case SyntheticKind::Infeasible: return "infeasible";
    case SyntheticKind::RankDeficientEverywhere: return "rank-deficient-everywhere";
  }
  return "?";
}

SyntheticKind synthetic_kind_from_string(const std::string& s) {
  if (s == "feasible") return SyntheticKind::Feasible;
  if (s == "infeasible") return SyntheticKind::Infeasible;
  if (s == "rank-deficient-everywhere" || s == "rankdef") return SyntheticKind::RankDeficientEverywhere;
  throw UsageError("unknown synthetic kind '" + s + "'");
}

// Synthetic families.
//
// Objective (all kinds), minimized at a:
//   f(x) = sum_i q_i/2 (x_i - a_i)^2 + mu log cosh(x_i - a_i),  q_i in [0.5, 2], mu = 0.1
//
// Base constraint with anchor x_f, b_i ~ N(0, I/n), |p_i| = 1, kappa = 1/4:
//   h_i(x) = b_i^T (x - x_f) + kappa (1 - cos(p_i^T (x - x_f)))
//
// feasible:        c = (h_0, ..., h_{m-2}, h_{m-2});  c(x_f) = 0
// rank-deficient:  r = max(1, (m-1)/2) base rows, the remaining distinct rows
//                  are fixed linear combinations of them, last row duplicated;
//                  rank J <= r everywhere, c(x_f) = 0
// infeasible:      base rows with b_i, p_i orthogonal to a unit vector w, then
//                  phi(w^T x - s) and phi(w^T x - s) + delta with
//                  phi(t) = t + sin(t)/2, delta in [0.5, 2]. c = 0 has no
//                  solution; J^T c = 0 where the base rows vanish and
//                  phi(t) = -delta/2. The objective is centred on one such
//                  point.
ProblemInstance make_synthetic_degenerate(Eigen::Index n, Eigen::Index m, SyntheticKind kind,
                                          std::uint64_t seed) {
  if (m < 2 || m > n) throw UsageError("synthetic problems need 2 <= m <= n");
  constexpr double kMu = 0.1;
  constexpr double kKappa = 0.25;
  constexpr double kPhiAmp = 0.5;

  Rng rng(seed);
  Rng obj_rng = rng.split("objective");
  Rng con_rng = rng.split("constraints");

  Vec q(n), a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    q(i) = 0.5 + 1.5 * obj_rng.uniform();
    a(i) = obj_rng.normal();
  }

  ProblemInstance p;
  p.name = "synthetic-" + to_string(kind) + "-n" + std::to_string(n) + "-m" + std::to_string(m) + "-s" +
           std::to_string(seed);
  p.n = n;
  p.m = m;

  auto install_objective = [&p](const Vec& a, const Vec& q) {
    p.objective = [q, a](const Vec& x) {
      double f = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double t = x(i) - a(i);
        // log cosh(t) = |t| + log1p(exp(-2|t|)) - log 2
        f += 0.5 * q(i) * t * t + kMu * (std::abs(t) + std::log1p(std::exp(-2.0 * std::abs(t))) - std::log(2.0));
      }
      return f;
    };
    p.gradient = [q, a](const Vec& x) {
      Vec g(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double t = x(i) - a(i);
        g(i) = q(i) * t + kMu * std::tanh(t);
      }
      return g;
    };
    p.lipschitz_gradient = q.maxCoeff() + kMu;
  };

  const Vec x_f = normal_vector(n, con_rng);

  // Distinct base rows.
  Eigen::Index base = 0;
  switch (kind) {
    case SyntheticKind::Feasible: base = m - 1; break;
    case SyntheticKind::RankDeficientEverywhere: base = std::max<Eigen::Index>(1, (m - 1) / 2); break;
    case SyntheticKind::Infeasible: base = m - 2; break;
  }
  Vec w = Vec::Zero(n);
  if (kind == SyntheticKind::Infeasible) w = normal_vector(n, con_rng).normalized();

  Mat B(base, n), P(base, n);
  for (Eigen::Index i = 0; i < base; ++i) {
    Vec bi = normal_vector(n, con_rng) / std::sqrt(static_cast<double>(n));
    Vec pi = normal_vector(n, con_rng);
    if (kind == SyntheticKind::Infeasible) {
      bi -= w * w.dot(bi);
      pi -= w * w.dot(pi);
    }
    B.row(i) = bi.transpose();
    P.row(i) = pi.normalized().transpose();
  }

  // Combination weights for rank-deficient rows: c_rows = W * h.
  const Eigen::Index distinct = m - 1;
  Mat W = Mat::Zero(distinct, base);
  W.topRows(base).setIdentity();
  if (kind == SyntheticKind::RankDeficientEverywhere) {
    for (Eigen::Index i = base; i < distinct; ++i)
      for (Eigen::Index j = 0; j < base; ++j) W(i, j) = con_rng.normal();
  }

  auto base_values = [B, P, x_f](const Vec& x) {
    const Vec s = x - x_f;
    Vec h = B * s;
    const Vec ps = P * s;
    for (Eigen::Index i = 0; i < h.size(); ++i) h(i) += kKappa * (1.0 - std::cos(ps(i)));
    return h;
  };
  auto base_jacobian = [B, P, x_f](const Vec& x) {
    const Vec ps = P * (x - x_f);
    Mat Jh = B;
    for (Eigen::Index i = 0; i < Jh.rows(); ++i) Jh.row(i) += kKappa * std::sin(ps(i)) * P.row(i);
    return Jh;
  };

  if (kind == SyntheticKind::Infeasible) {
    const double s = con_rng.normal();
    const double delta = 0.5 + 1.5 * con_rng.uniform();
    auto phi = [](double t) { return t + kPhiAmp * std::sin(t); };
    auto dphi = [](double t) { return 1.0 + kPhiAmp * std::cos(t); };

    p.constraints = [=](const Vec& x) {
      Vec c(m);
      c.head(base) = base_values(x);
      const double t = w.dot(x) - s;
      c(m - 2) = phi(t);
      c(m - 1) = phi(t) + delta;
      return c;
    };
    p.jacobian = [=](const Vec& x) {
      Mat J(m, x.size());
      J.topRows(base) = base_jacobian(x);
      const double t = w.dot(x) - s;
      J.row(m - 2) = dphi(t) * w.transpose();
      J.row(m - 1) = J.row(m - 2);
      return J;
    };
    // phi is strictly increasing (phi' >= 1/2); Newton from t = -delta/2.
    double t = -0.5 * delta;
    for (int it = 0; it < 100; ++it) {
      const double step = (phi(t) + 0.5 * delta) / dphi(t);
      t -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Moving along w leaves the base rows unchanged.
    p.infeasible_stationary_point = Vec(x_f + (s + t - w.dot(x_f)) * w);
    p.lipschitz_jacobian = std::sqrt(static_cast<double>(base) * kKappa * kKappa + 2.0 * kPhiAmp * kPhiAmp);
    // The objective minimizer sits at the infeasible stationary point. With an
    // unrelated minimizer the merit parameter decays like ||J^T c|| and the
    // iterates drift along the stationary set at a 1/k rate.
    install_objective(*p.infeasible_stationary_point, Vec::Ones(n));
    return p;
  }

  p.constraints = [=](const Vec& x) {
    Vec c(m);
    c.head(distinct) = W * base_values(x);
    c(m - 1) = c(m - 2);
    return c;
  };
  p.jacobian = [=](const Vec& x) {
    Mat J(m, x.size());
    J.topRows(distinct) = W * base_jacobian(x);
    J.row(m - 1) = J.row(m - 2);
    return J;
  };
  // Hessian of row i is kappa * sum_j W_ij cos(.) p_j p_j^T.
  double gamma_sq = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index r = std::min(i, distinct - 1);
    const double row_bound = kKappa * W.row(r).cwiseAbs().sum();
    gamma_sq += row_bound * row_bound;
  }
  p.lipschitz_jacobian = std::sqrt(gamma_sq);
  install_objective(a, q);
  p.feasible_point = x_f;
  return p;
}

std::string describe(const OracleSpec& spec) {
  std::ostringstream os;
  switch (spec.mode) {
    case OracleMode::Exact: os << "exact"; break;
    case OracleMode::Gaussian: os << "noise=" << spec.noise; break;
    case OracleMode::Minibatch: os << "batch=" << spec.batch; break;
  }
  return os.str();
}

std::vector<std::size_t> sample_without_replacement(std::size_t N, std::size_t b, Rng& rng) {
  if (b > N) throw UsageError("mini-batch larger than the dataset");
  std::vector<std::size_t> out;
  out.reserve(b);
  if (4 * b >= N) {
    std::vector<std::size_t> perm(N);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = 0; i < b; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(N - i));
      std::swap(perm[i], perm[j]);
      out.push_back(perm[i]);
    }
    return out;
  }
  // Floyd's algorithm
  for (std::size_t j = N - b; j < N; ++j) {
    const std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
    if (std::find(out.begin(), out.end(), t) == out.end()) {
      out.push_back(t);
    } else {
      out.push_back(j);
    }
  }
  return out;
}

Vec GradientOracle::sample(const ProblemInstance& problem, const Vec& x) {
  ++calls_;
  switch (spec_.mode) {
    case OracleMode::Exact:
      return problem.gradient(x);
    case OracleMode::Gaussian: {
      Vec g = problem.gradient(x);
      if (spec_.noise > 0.0) {
        const double scale = std::sqrt(spec_.noise);
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) += scale * rng_.normal();
      }
      return g;
    }
    case OracleMode::Minibatch: {
      if (!problem.batch_gradient || problem.num_samples == 0) {
        throw UsageError("problem " + problem.name + " has no finite-sum structure for mini-batches");
      }
      const auto idx = sample_without_replacement(problem.num_samples, spec_.batch, rng_);
      return problem.batch_gradient(x, idx);
    }
  }
  return problem.gradient(x);
}

double GradientOracle::nominal_variance_bound(const ProblemInstance& problem) const {
  switch (spec_.mode) {
    case OracleMode::Exact: return 0.0;
    case OracleMode::Gaussian: return spec_.noise * static_cast<double>(problem.n);
    case OracleMode::Minibatch: return std::numeric_limits<double>::quiet_NaN();
  }
  return 0.0;
}

}  // namespace ssqp
