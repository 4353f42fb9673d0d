#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "ssqp/rng.hpp"
#include "ssqp/types.hpp"

namespace ssqp {

/// Labeled sparse data for binary classification. Column i of `features` is
/// the feature vector of data point i.
struct Dataset {
  std::string name;
  Eigen::SparseMatrix<double> features;  // n x N
  Vec labels;                            // entries in {-1, +1}

  Eigen::Index dim() const { return features.rows(); }
  Eigen::Index size() const { return features.cols(); }
};

/// Reads LIBSVM text (`<label> <idx>:<val> ...`, 1-based strictly increasing
/// indices). Labels {0,1} are remapped to {-1,+1}.
Dataset parse_libsvm(const std::string& path, std::optional<Eigen::Index> expected_dim = std::nullopt);
Dataset parse_libsvm(std::istream& in, const std::string& name,
                     std::optional<Eigen::Index> expected_dim = std::nullopt);

/// Constraints of the form Ax - b, kept alongside the callables so that
/// methods needing the affine structure (projection) can use it.
struct AffineConstraints {
  Mat A;
  Vec b;
};

/// min f(x) s.t. c(x) = 0 with f(x) = E[F(x, i)].
///
/// Immutable after construction; the callables capture shared, read-only
/// data and may be invoked concurrently.
struct ProblemInstance {
  std::string name;
  Eigen::Index n = 0;
  Eigen::Index m = 0;

  std::function<double(const Vec&)> objective;
  std::function<Vec(const Vec&)> gradient;
  std::function<Vec(const Vec&)> constraints;
  std::function<Mat(const Vec&)> jacobian;

  /// Finite-sum structure, when present: number of samples N and the mean of
  /// the per-sample gradients over an index set.
  std::size_t num_samples = 0;
  std::function<Vec(const Vec&, std::span<const std::size_t>)> batch_gradient;

  std::optional<AffineConstraints> affine;

  /// Known global Lipschitz bounds for the gradient and the Jacobian.
  std::optional<double> lipschitz_gradient;
  std::optional<double> lipschitz_jacobian;

  /// Known reference points from the generator.
  std::optional<Vec> feasible_point;
  std::optional<Vec> infeasible_stationary_point;
};

/// Throws UsageError if c(x) or J(x) have the wrong shape at x.
void check_dimensions(const ProblemInstance& problem, const Vec& x);

/// Mean logistic loss over `data` subject to Ax = b (standard normal A, b
/// drawn from `seed`, last row duplicated) and optionally ||x||^2 = 1.
ProblemInstance make_logistic_problem(std::shared_ptr<const Dataset> data, int num_linear,
                                      bool with_norm_constraint, std::uint64_t seed);

enum class SyntheticKind { Feasible, Infeasible, RankDeficientEverywhere };

std::string to_string(SyntheticKind kind);
SyntheticKind synthetic_kind_from_string(const std::string& s);

/// Synthetic degenerate instance with m constraints (m >= 2, m <= n); the
/// last constraint's Jacobian row always duplicates the one before it.
ProblemInstance make_synthetic_degenerate(Eigen::Index n, Eigen::Index m, SyntheticKind kind,
                                          std::uint64_t seed);

enum class OracleMode { Exact, Gaussian, Minibatch };

struct OracleSpec {
  OracleMode mode = OracleMode::Exact;
  double noise = 0.0;      // variance per coordinate (gaussian)
  std::size_t batch = 0;   // mini-batch size

  static OracleSpec exact() { return {}; }
  static OracleSpec gaussian(double noise) { return {OracleMode::Gaussian, noise, 0}; }
  static OracleSpec minibatch(std::size_t b) { return {OracleMode::Minibatch, 0.0, b}; }
};

std::string describe(const OracleSpec& spec);

/// Stochastic gradient source. Owns its random stream; confine to one run.
class GradientOracle {
 public:
  GradientOracle(OracleSpec spec, std::uint64_t seed) : spec_(spec), rng_(seed) {}

  Vec sample(const ProblemInstance& problem, const Vec& x);

  const OracleSpec& spec() const { return spec_; }
  bool exact() const { return spec_.mode == OracleMode::Exact; }
  std::size_t calls() const { return calls_; }

  /// Bound on E||g - grad f||^2 when it is known a priori (0 for exact,
  /// n * noise for gaussian); NaN for mini-batches, which depend on the data.
  double nominal_variance_bound(const ProblemInstance& problem) const;

 private:
  OracleSpec spec_;
  Rng rng_;
  std::size_t calls_ = 0;
};

inline Vec sample_gradient(const ProblemInstance& problem, GradientOracle& oracle, const Vec& x) {
  return oracle.sample(problem, x);
}

/// b distinct indices from [0, N), uniformly.
std::vector<std::size_t> sample_without_replacement(std::size_t N, std::size_t b, Rng& rng);

}  // namespace ssqp
