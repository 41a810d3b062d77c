#include "botw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "botw/error.hpp"

namespace botw {

ArmSet ArmSet::validate(const std::vector<std::vector<double>>& raw,
                        std::vector<std::string> ids) {
  if (raw.size() < 2) {
    throw Error(ErrorCode::TooFewArms,
                "arm set needs at least 2 arms, got " + std::to_string(raw.size()));
  }
  const std::size_t d = raw.front().size();
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "arm vectors must have length >= 1");

  Matrix arms(static_cast<Eigen::Index>(raw.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].size() != d) {
      throw Error(ErrorCode::DimensionMismatch,
                  "arm " + std::to_string(i) + " has length " + std::to_string(raw[i].size()) +
                      ", expected " + std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(raw[i][j])) {
        throw Error(ErrorCode::NonFiniteInput, "arm " + std::to_string(i) + " has a non-finite entry");
      }
      arms(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = raw[i][j];
    }
    const double norm = arms.row(static_cast<Eigen::Index>(i)).norm();
    if (norm > 1.0 + kNormSlack) {
      throw Error(ErrorCode::NormViolation,
                  "arm " + std::to_string(i) + " has norm " + std::to_string(norm) + " > 1");
    }
  }

  if (ids.empty()) {
    ids.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) ids.push_back(std::to_string(i));
  } else if (ids.size() != raw.size()) {
    throw Error(ErrorCode::DimensionMismatch, "id count does not match arm count");
  }
  {
    auto sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::InvalidArgument, "arm ids must be unique");
    }
  }

  const Matrix uniform_moment = arms.transpose() * arms / static_cast<double>(raw.size());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(uniform_moment, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (!(min_eig > kRankThreshold)) {
    throw Error(ErrorCode::RankDeficient,
                "arms do not span R^" + std::to_string(d) +
                    " (min eigenvalue of uniform moment matrix " + std::to_string(min_eig) + ")");
  }
  return ArmSet(std::move(arms), std::move(ids));
}

Vector ArmSet::losses(const Vector& theta) const {
  if (static_cast<std::size_t>(theta.size()) != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "theta dimension does not match arm dimension");
  }
  return arms_ * theta;
}

SimplexDistribution::SimplexDistribution(Vector probs) : probs_(std::move(probs)) {
  if (probs_.size() == 0) throw Error(ErrorCode::InvalidDistribution, "empty distribution");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    const double v = probs_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0 + kSimplexSumTol) {
      throw Error(ErrorCode::InvalidDistribution,
                  "entry " + std::to_string(i) + " = " + std::to_string(v) + " outside [0,1]");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexSumTol) {
    throw Error(ErrorCode::InvalidDistribution, "entries sum to " + std::to_string(sum));
  }
}

SimplexDistribution SimplexDistribution::uniform(std::size_t n) {
  return SimplexDistribution(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

SimplexDistribution SimplexDistribution::point_mass(std::size_t n, std::size_t index) {
  if (index >= n) throw Error(ErrorCode::InvalidArgument, "point mass index out of range");
  Vector p = Vector::Zero(static_cast<Eigen::Index>(n));
  p[static_cast<Eigen::Index>(index)] = 1.0;
  return SimplexDistribution(std::move(p));
}

SpdMatrix::SpdMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "matrix must be square and non-empty");
  }
  if (!entries_.allFinite()) throw Error(ErrorCode::NonFiniteInput, "matrix has non-finite entries");
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::InvalidArgument, "matrix is not symmetric");
  }
}

SpdFactor::SpdFactor(const SpdMatrix& m) : ldlt_(m.entries()) {
  if (ldlt_.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularMatrix, "matrix is not positive definite");
  }
  const Vector& pivots = ldlt_.vectorD();
  for (Eigen::Index i = 0; i < pivots.size(); ++i) {
    if (!(pivots[i] > kPivotThreshold)) {
      throw Error(ErrorCode::SingularMatrix,
                  "factorization pivot " + std::to_string(i) + " = " + std::to_string(pivots[i]));
    }
  }
}

Vector SpdFactor::solve(const Vector& v) const {
  if (v.size() != ldlt_.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "right-hand side has wrong length");
  }
  return ldlt_.solve(v);
}

double SpdFactor::inverse_quadratic(const Vector& x) const {
  return inverse_quadratics(x.transpose())[0];
}

// With P M P^T = L D L^T, x^T M^{-1} x = sum_i (L^{-1} P x)_i^2 / D_i.
Vector SpdFactor::inverse_quadratics(const Matrix& rows) const {
  Matrix half = ldlt_.transpositionsP() * rows.transpose();
  ldlt_.matrixL().solveInPlace(half);
  return (half.array().square().colwise() / ldlt_.vectorD().array()).colwise().sum().transpose();
}

Matrix SpdFactor::inverse() const {
  const auto n = ldlt_.rows();
  Matrix inv = ldlt_.solve(Matrix::Identity(n, n));
  return 0.5 * (inv + inv.transpose());
}

double SpdFactor::log_det() const {
  return ldlt_.vectorD().array().log().sum();
}

SpdMatrix covariance(const SimplexDistribution& dist, const ArmSet& arms) {
  if (dist.size() != arms.size()) {
    throw Error(ErrorCode::DimensionMismatch, "distribution and arm set sizes differ");
  }
  const auto d = static_cast<Eigen::Index>(arms.dim());
  const Matrix& x = arms.matrix();
  Matrix sigma = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < x.rows(); ++k) {
    const double w = dist.probs()[k];
    if (w == 0.0) continue;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double wxj = w * x(k, j);
      for (Eigen::Index i = j; i < d; ++i) sigma(i, j) += wxj * x(k, i);
    }
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = j + 1; i < d; ++i) sigma(j, i) = sigma(i, j);
  }
  return SpdMatrix(std::move(sigma));
}

Vector spd_solve(const SpdMatrix& m, const Vector& v) { return SpdFactor(m).solve(v); }

double g_value(const SimplexDistribution& dist, const ArmSet& arms) {
  const SpdFactor factor(covariance(dist, arms));
  return factor.inverse_quadratics(arms.matrix()).maxCoeff();
}

namespace {

Eigen::Index first_argmax(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// Iterations between exact recomputations of V^{-1} and the quadratic forms.
constexpr int kRefreshEvery = 64;

}  // namespace

DesignResult frank_wolfe_design(const ArmSet& arms, double tol, int max_iter) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "design tolerance must be positive");
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");

  const Matrix& x = arms.matrix();
  const double d = static_cast<double>(arms.dim());
  const double threshold = d * (1.0 + tol);

  Vector weights = Vector::Constant(x.rows(), 1.0 / static_cast<double>(x.rows()));
  Matrix v_inv;
  Vector quad;
  double log_det = 0.0;

  // Exact state from the current weights; returns the certified g.
  auto refresh = [&]() {
    weights /= weights.sum();
    const SpdFactor factor(covariance(SimplexDistribution(weights), arms));
    v_inv = factor.inverse();
    quad = factor.inverse_quadratics(x);
    const double exact_log_det = factor.log_det();
    if (exact_log_det < log_det - 1e-9 * std::max(1.0, std::abs(log_det))) {
      throw Error(ErrorCode::InvariantViolation, "design objective -log det V increased");
    }
    log_det = exact_log_det;
  };

  log_det = -std::numeric_limits<double>::infinity();
  refresh();
  int iter = 0;
  bool exact = true;
  for (;;) {
    Eigen::Index k = first_argmax(quad);
    if (quad[k] <= threshold) {
      if (!exact) {
        refresh();
        exact = true;
        k = first_argmax(quad);
      }
      if (quad[k] <= threshold) break;
    }
    if (iter >= max_iter) break;

    const double a = quad[k];
    const double step = (a - d) / (d * (a - 1.0));
    const double keep = 1.0 - step;
    weights *= keep;
    weights[k] += step;

    // Sherman-Morrison: V' = keep V + step x_k x_k^T.
    const Vector u = v_inv * x.row(k).transpose();
    const double denom = keep + step * a;
    const Vector cross = x * u;
    quad = (quad.array() - step * cross.array().square() / denom) / keep;
    v_inv = (v_inv - (step / denom) * (u * u.transpose())) / keep;
    const double gain = (d - 1.0) * std::log(keep) + std::log(denom);
    if (gain < -1e-12) {
      throw Error(ErrorCode::InvariantViolation, "design objective -log det V increased");
    }
    log_det += gain;
    ++iter;
    exact = false;
    if (iter % kRefreshEvery == 0) {
      refresh();
      exact = true;
    }
  }
  if (!exact) refresh();

  const Eigen::Index k = first_argmax(quad);
  SimplexDistribution pi(weights);
  SpdMatrix moment = covariance(pi, arms);
  return DesignResult{std::move(pi), quad[k], std::move(moment), iter, quad[k] <= threshold};
}

}  // namespace botw
