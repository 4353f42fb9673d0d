#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

namespace oracle {

Vec lstsq(const Mat& A, const Vec& b, double rank_tol) {
  if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0) return Vec::Zero(A.cols());
  Eigen::CompleteOrthogonalDecomposition<Mat> cod;
  cod.setThreshold(rank_tol);  // relative to the largest pivot
  cod.compute(A);
  return cod.solve(b);
}

Mat null_basis(const Mat& J, double rank_tol) {
  const Eigen::Index n = J.cols();
  if (J.rows() == 0 || J.cwiseAbs().maxCoeff() == 0.0) return Mat::Identity(n, n);
  Eigen::FullPivLU<Mat> lu(J);
  lu.setThreshold(rank_tol);
  const Mat K = lu.kernel();
  if (lu.rank() == n) return Mat(n, 0);
  Eigen::HouseholderQR<Mat> qr(K);
  return qr.householderQ() * Mat::Identity(n, K.cols());
}

Vec tangential(const Mat& H, const Mat& J, const Vec& g, const Vec& v) {
  const Mat Z = null_basis(J);
  if (Z.cols() == 0) return Vec::Zero(J.cols());
  const Mat R = Z.transpose() * H * Z;
  const Vec rhs = -(Z.transpose() * (g + H * v));
  return Z * R.ldlt().solve(rhs);
}

double lstsq_residual(const Mat& J, const Vec& c) {
  const Vec v = lstsq(J, -c);
  return (c + J * v).norm();
}

double binomial_cdf(long n, double p, long k) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  double total = 0.0;
  for (long i = 0; i <= k; ++i) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) +
                            (i == 0 ? 0.0 : i * std::log(p)) + (n - i == 0 ? 0.0 : (n - i) * std::log1p(-p));
    total += std::exp(log_term);
  }
  return std::min(1.0, total);
}

double chernoff_closed_form(double p, long J, long s) {
  const double mu = p * static_cast<double>(J - 1);
  const double rho = 1.0 - static_cast<double>(s) / mu;
  return std::exp(-0.5 * mu * rho * rho);
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x(i)));
    Vec xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    g(i) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return g;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& c, const Vec& x, Eigen::Index m, double h) {
  Mat J(m, x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x(i)));
    Vec xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    J.col(i) = (c(xp) - c(xm)) / (2.0 * step);
  }
  return J;
}

double rel_err(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

Mat random_matrix(Eigen::Index m, Eigen::Index n, Eigen::Index rank, bool duplicate_last, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  const Eigen::Index rows = duplicate_last ? m - 1 : m;
  Mat L(rows, rank), R(rank, n);
  for (Eigen::Index i = 0; i < L.size(); ++i) L.data()[i] = z(gen);
  for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = z(gen);
  Mat A(m, n);
  A.topRows(rows) = L * R;
  if (duplicate_last) A.row(m - 1) = A.row(m - 2);
  return A;
}

Vec random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = z(gen);
  return v;
}

}  // namespace oracle
