#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace botw {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kNormSlack = 1e-12;
inline constexpr double kRankThreshold = 1e-12;
inline constexpr double kPivotThreshold = 1e-12;
inline constexpr double kSimplexSumTol = 1e-9;

/// Finite action set: |D| feature vectors in R^d, each with norm <= 1,
/// jointly spanning R^d. Immutable once validated.
class ArmSet {
 public:
  /// Validates raw vectors; ids default to "0", "1", ... in input order.
  static ArmSet validate(const std::vector<std::vector<double>>& raw,
                         std::vector<std::string> ids = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(arms_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(arms_.cols()); }

  /// Row i is arm i.
  const Matrix& matrix() const noexcept { return arms_; }
  Vector arm(std::size_t i) const { return arms_.row(static_cast<Eigen::Index>(i)).transpose(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  /// Mean losses <x, theta> for every arm.
  Vector losses(const Vector& theta) const;

 private:
  ArmSet(Matrix arms, std::vector<std::string> ids)
      : arms_(std::move(arms)), ids_(std::move(ids)) {}

  Matrix arms_;
  std::vector<std::string> ids_;
};

/// Probability vector over arms.
class SimplexDistribution {
 public:
  /// Throws InvalidDistribution unless entries are >= 0 and sum to 1 within 1e-9.
  explicit SimplexDistribution(Vector probs);

  static SimplexDistribution uniform(std::size_t n);
  static SimplexDistribution point_mass(std::size_t n, std::size_t index);

  const Vector& probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_[static_cast<Eigen::Index>(i)]; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(probs_.size()); }

 private:
  Vector probs_;
};

/// Symmetric matrix, checked on construction to 1e-10 relative tolerance.
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix entries);

  const Matrix& entries() const noexcept { return entries_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }

 private:
  Matrix entries_;
};

/// Pivoted LDL^T factor of an SpdMatrix. Construction fails with
/// SingularMatrix if any pivot D_i is <= 1e-12.
class SpdFactor {
 public:
  explicit SpdFactor(const SpdMatrix& m);

  Vector solve(const Vector& v) const;
  /// x^T M^{-1} x, evaluated as sum_i (L^{-1} P x)_i^2 / D_i.
  double inverse_quadratic(const Vector& x) const;
  /// x_i^T M^{-1} x_i for every row x_i of `rows`.
  Vector inverse_quadratics(const Matrix& rows) const;
  /// Explicit inverse, symmetrized.
  Matrix inverse() const;
  double log_det() const;

 private:
  Eigen::LDLT<Matrix> ldlt_;
};

struct DesignResult {
  SimplexDistribution pi;
  double g_value;
  SpdMatrix moment;
  int iterations;
  bool converged;
};

/// Sigma = sum_x p(x) x x^T, assembled so the result is bitwise symmetric.
SpdMatrix covariance(const SimplexDistribution& dist, const ArmSet& arms);

Vector spd_solve(const SpdMatrix& m, const Vector& v);

/// max_x x^T V(dist)^{-1} x.
double g_value(const SimplexDistribution& dist, const ArmSet& arms);

inline constexpr double kDefaultDesignTol = 1e-3;
inline constexpr int kDefaultDesignMaxIter = 100000;

/// G-optimal design by Frank-Wolfe (Fedorov-Wynn) ascent on log det V.
///
/// Starts from the uniform distribution. Each iteration moves mass toward the
/// arm with the largest x^T V^{-1} x (lowest index on ties) using the exact
/// line-search step (a - d) / (d (a - 1)). Stops once g <= d (1 + tol); if
/// max_iter is reached first, the current design is returned with
/// converged = false.
DesignResult frank_wolfe_design(const ArmSet& arms, double tol = kDefaultDesignTol,
                                int max_iter = kDefaultDesignMaxIter);

}  // namespace botw
