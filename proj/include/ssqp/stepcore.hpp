#pragma once

#include "ssqp/types.hpp"

namespace ssqp {

/// Singular values at or below this fraction of the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-10;

/// Orthonormal bases of Range(J^T) and Range(J) from a thin SVD of J, with the
/// numerical rank decided by kRankTolerance.
class RangeSpace {
 public:
  explicit RangeSpace(const Mat& J);

  Eigen::Index rank() const { return rank_; }
  /// n x rank basis of Range(J^T).
  const Mat& row_basis() const { return V_; }

  /// Orthogonal projection of z onto Null(J).
  Vec project_null(const Vec& z) const;
  /// Minimum-norm y minimizing ||r + J^T y||_2.
  Vec min_norm_multiplier(const Vec& r) const;

 private:
  Eigen::Index rank_ = 0;
  Mat U_;  // m x rank
  Mat V_;  // n x rank
  Vec sigma_;
};

/// ||c|| - ||c + Jd|| evaluated without cancellation when both norms are close.
double linearized_reduction(const Vec& c, const Vec& Jd);

struct CauchyStep {
  Vec v_c;           // -J^T c
  double alpha_c;    // minimizer of ||c + a J v_c|| over [0, omega]
  double reduction;  // ||c|| - ||c + alpha_c J v_c||
};

CauchyStep cauchy_step(const Mat& J, const Vec& c, double omega);

struct NormalStepResult {
  Vec v;
  double predicted_reduction = 0.0;  // ||c|| - ||c + J v||
  double cauchy_reduction = 0.0;
  int iterations = 0;
};

/// Truncated CG on min 1/2||c + Jv||^2 s.t. ||v|| <= omega ||J^T c||, started
/// at v = 0 so that every iterate stays in Range(J^T). The first iteration is
/// the Cauchy step; later ones stop at the trust-region boundary.
NormalStepResult normal_step(const Mat& J, const Vec& c, double omega, double eps_v, int max_iter);

/// min{m, 20}, the iteration cap used when the caller has no preference.
int default_normal_iterations(Eigen::Index m);

struct TangentialStepResult {
  Vec u;
  Vec y;
  double kkt_residual = 0.0;        // min_y ||Hu + J^T y + (g + Hv)||
  double nullspace_residual = 0.0;  // ||J u||
  int iterations = 0;
  bool dense_fallback = false;
};

inline constexpr double kTangentialTolerance = 1e-9;

/// Solves [H J^T; J 0][u; y] = -[g + Hv; 0] by CG on Null(J) (projection
/// applied every iteration). Falls back to a dense reduced solve for n <= 200
/// when CG stalls; throws SolverFailure otherwise or when H is not positive
/// definite on Null(J).
TangentialStepResult tangential_step(const SymmetricOperator& H, const Mat& J, const Vec& g, const Vec& v,
                                     double tol = kTangentialTolerance);

struct LeastSquaresMultiplier {
  Vec y;
  double residual = 0.0;
};

/// Minimum-norm y minimizing ||grad + J^T y||_2 and the attained residual.
LeastSquaresMultiplier least_squares_multiplier(const Mat& J, const Vec& grad);

/// n x (n - rank) orthonormal basis of Null(J).
Mat nullspace_basis(const Mat& J);

}  // namespace ssqp
