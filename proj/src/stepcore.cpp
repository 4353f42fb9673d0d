#include "ssqp/stepcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "ssqp/errors.hpp"

namespace ssqp {

namespace {

Eigen::Index numerical_rank(const Vec& sigma) {
  if (sigma.size() == 0 || sigma(0) <= 0.0) return 0;
  const double cut = kRankTolerance * sigma(0);
  Eigen::Index r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  return r;
}

constexpr Eigen::Index kDenseFallbackMaxN = 200;

}  // namespace

RangeSpace::RangeSpace(const Mat& J) {
  if (J.rows() == 0 || J.cols() == 0) {
    U_.resize(J.rows(), 0);
    V_.resize(J.cols(), 0);
    return;
  }
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  rank_ = numerical_rank(svd.singularValues());
  U_ = svd.matrixU().leftCols(rank_);
  V_ = svd.matrixV().leftCols(rank_);
  sigma_ = svd.singularValues().head(rank_);
}

Vec RangeSpace::project_null(const Vec& z) const {
  if (rank_ == 0) return z;
  Vec p = z - V_ * (V_.transpose() * z);
  // second pass removes what round-off left in Range(J^T)
  p -= V_ * (V_.transpose() * p);
  return p;
}

Vec RangeSpace::min_norm_multiplier(const Vec& r) const {
  if (rank_ == 0) return Vec::Zero(U_.rows());
  const Vec coeff = (V_.transpose() * r).cwiseQuotient(sigma_);
  return -(U_ * coeff);
}

double linearized_reduction(const Vec& c, const Vec& Jd) {
  // (||c||^2 - ||c + Jd||^2) / (||c|| + ||c + Jd||)
  const double sum = c.norm() + (c + Jd).norm();
  if (sum == 0.0) return 0.0;
  return -(2.0 * c.dot(Jd) + Jd.squaredNorm()) / sum;
}

CauchyStep cauchy_step(const Mat& J, const Vec& c, double omega) {
  if (!(omega > 0.0)) throw UsageError("cauchy_step: omega must be positive");
  CauchyStep out;
  out.v_c = -(J.transpose() * c);
  const Vec Jv = J * out.v_c;
  const double Jv_sq = Jv.squaredNorm();
  if (Jv_sq > 0.0) {
    out.alpha_c = std::clamp(out.v_c.squaredNorm() / Jv_sq, 0.0, omega);
  } else {
    out.alpha_c = omega;
  }
  out.reduction = std::max(0.0, linearized_reduction(c, out.alpha_c * Jv));
  return out;
}

int default_normal_iterations(Eigen::Index m) { return static_cast<int>(std::clamp<Eigen::Index>(m, 1, 20)); }

NormalStepResult normal_step(const Mat& J, const Vec& c, double omega, double eps_v, int max_iter) {
  if (!(omega > 0.0)) throw UsageError("normal_step: omega must be positive");
  if (!(eps_v > 0.0 && eps_v <= 1.0)) throw UsageError("normal_step: eps_v must lie in (0, 1]");

  NormalStepResult out;
  const Eigen::Index n = J.cols();
  const Vec Jtc = J.transpose() * c;
  const double Jtc_norm = Jtc.norm();
  if (Jtc_norm == 0.0) {
    out.v = Vec::Zero(n);
    return out;
  }

  const CauchyStep cauchy = cauchy_step(J, c, omega);
  out.cauchy_reduction = cauchy.reduction;
  out.v = cauchy.alpha_c * cauchy.v_c;
  out.predicted_reduction = cauchy.reduction;
  out.iterations = 1;
  if (max_iter <= 1 || cauchy.alpha_c >= omega) return out;

  // Continue CG on J^T J v = -J^T c from the Cauchy point.
  const double radius = omega * Jtc_norm;
  Vec v = out.v;
  Vec p = cauchy.v_c;  // p0 = -r0
  Vec r = Jtc + J.transpose() * (J * v);
  double rr = r.squaredNorm();
  const double rr0 = Jtc.squaredNorm();
  // Residuals below the rounding level of J^T (c + Jv) carry no information
  // and mostly point into Null(J).
  const double J_norm = J.norm();
  const double eps = std::numeric_limits<double>::epsilon();
  const double c_norm = c.norm();
  auto stop = [&](const Vec& at) {
    const double floor = 10.0 * eps * J_norm * (c_norm + J_norm * at.norm());
    return std::max(1e-24 * rr0, floor * floor);
  };

  // Plain CG loop with explicit bookkeeping of the previous residual.
  double rr_prev = rr0;
  int k = 1;
  while (k < max_iter && rr > stop(v)) {
    p = -r + (rr / rr_prev) * p;
    const Vec Jp = J * p;
    const double curv = Jp.squaredNorm();
    // J^T J is semidefinite: no curvature means p lies in Null(J).
    if (!(curv > eps * J_norm * J_norm * p.squaredNorm())) break;
    double step = rr / curv;
    const Vec trial = v + step * p;
    ++k;
    if (trial.norm() >= radius) {
      // move to the boundary along p
      const double pp = p.squaredNorm();
      const double vp = v.dot(p);
      const double vv = v.squaredNorm();
      const double disc = std::max(0.0, vp * vp + pp * (radius * radius - vv));
      step = (-vp + std::sqrt(disc)) / pp;
      v += step * p;
      break;
    }
    v = trial;
    r += step * (J.transpose() * Jp);
    rr_prev = rr;
    rr = r.squaredNorm();
  }

  const double reduction = linearized_reduction(c, J * v);
  out.iterations = k;
  if (reduction >= eps_v * cauchy.reduction && reduction >= cauchy.reduction) {
    out.v = v;
    out.predicted_reduction = reduction;
  }
  return out;
}

TangentialStepResult tangential_step(const SymmetricOperator& H, const Mat& J, const Vec& g, const Vec& v,
                                     double tol) {
  const Eigen::Index n = J.cols();
  const RangeSpace range(J);
  const Vec rhs = g + H(v);
  const double rhs_scale = std::max(1.0, rhs.norm());
  const double J_fro = J.norm();

  TangentialStepResult out;
  auto finish = [&](Vec u) {
    out.u = std::move(u);
    const Vec r = H(out.u) + rhs;
    out.y = range.min_norm_multiplier(r);
    // min_y ||r + J^T y|| through the projector: forming J^T y directly loses
    // eps ||J|| ||y|| to cancellation, and y is huge when J is nearly singular
    out.kkt_residual = range.project_null(r).norm();
    out.nullspace_residual = (J * out.u).norm();
  };
  auto acceptable = [&]() {
    return out.kkt_residual <= tol * rhs_scale &&
           out.nullspace_residual <= tol * std::max(1.0, J_fro * out.u.norm());
  };

  // Projected CG on Null(J), u0 = 0.
  Vec u = Vec::Zero(n);
  Vec r = rhs;
  Vec z = range.project_null(r);
  double rz = r.dot(z);
  Vec p = -z;
  const int max_iter = static_cast<int>(2 * n + 10);
  const double cg_stop = 0.1 * tol * rhs_scale;
  bool negative_curvature = false;
  int it = 0;
  while (it < max_iter && z.norm() > cg_stop) {
    const Vec Hp = H(p);
    const double curv = p.dot(Hp);
    if (!(curv > 0.0)) {
      negative_curvature = true;
      break;
    }
    const double step = rz / curv;
    u += step * p;
    r += step * Hp;
    z = range.project_null(r);
    const double rz_next = r.dot(z);
    p = -z + (rz_next / rz) * p;
    rz = rz_next;
    ++it;
  }
  out.iterations = it;
  if (!negative_curvature) {
    finish(range.project_null(u));
    if (acceptable()) return out;
  }

  if (n > kDenseFallbackMaxN) {
    throw SolverFailure("tangential step: projected CG did not reach tolerance", out.kkt_residual);
  }
  // Dense reduced solve: u = Z w with (Z^T H Z) w = -Z^T rhs.
  const Mat Z = nullspace_basis(J);
  out.dense_fallback = true;
  if (Z.cols() == 0) {
    finish(Vec::Zero(n));
  } else {
    Mat HZ(n, Z.cols());
    for (Eigen::Index j = 0; j < Z.cols(); ++j) HZ.col(j) = H(Vec(Z.col(j)));
    Mat reduced = Z.transpose() * HZ;
    reduced = 0.5 * (reduced + reduced.transpose());
    Eigen::LLT<Mat> llt(reduced);
    if (llt.info() != Eigen::Success) {
      throw SolverFailure("tangential step: H is not positive definite on Null(J)", kInf);
    }
    finish(Z * llt.solve(-(Z.transpose() * rhs)));
  }
  if (!acceptable()) {
    throw SolverFailure("tangential step: residual above tolerance after dense solve", out.kkt_residual);
  }
  return out;
}

LeastSquaresMultiplier least_squares_multiplier(const Mat& J, const Vec& grad) {
  const RangeSpace range(J);
  LeastSquaresMultiplier out;
  out.y = range.min_norm_multiplier(grad);
  out.residual = (grad + J.transpose() * out.y).norm();
  return out;
}

Mat nullspace_basis(const Mat& J) {
  const Eigen::Index n = J.cols();
  if (J.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
  const Eigen::Index r = numerical_rank(svd.singularValues());
  return svd.matrixV().rightCols(n - r);
}

}  // namespace ssqp
