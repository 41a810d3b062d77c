#include <doctest.h>

#include <cmath>
#include <random>

#include "botw/error.hpp"
#include "botw/geometry.hpp"
#include "fixtures.hpp"

using namespace botw;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

// [[a, b], [b, c]]^{-1} by cofactors.
Matrix inverse_2x2(const Matrix& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
  const double det = a * c - b * b;
  Matrix inv(2, 2);
  inv << c / det, -b / det, -b / det, a / det;
  return inv;
}

}  // namespace

TEST_CASE("arm set validation") {
  const ArmSet basis = ArmSet::validate({{1, 0}, {0, 1}});
  CHECK(basis.size() == 2);
  CHECK(basis.dim() == 2);
  CHECK(basis.ids() == std::vector<std::string>{"0", "1"});

  CHECK(code_of([] { ArmSet::validate({{1, 0}}); }) == ErrorCode::TooFewArms);
  CHECK(code_of([] { ArmSet::validate({{1, 0}, {2, 0}}); }) == ErrorCode::NormViolation);
  CHECK(code_of([] { ArmSet::validate({{1, 0}, {0.5, 0}}); }) == ErrorCode::RankDeficient);
  CHECK(code_of([] { ArmSet::validate({{1, 0}, {0}}); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([] { ArmSet::validate({{1, 0}, {0, NAN}}); }) == ErrorCode::NonFiniteInput);
  CHECK(code_of([] { ArmSet::validate({{1, 0}, {0, 1}}, {"a", "a"}); }) == ErrorCode::InvalidArgument);

  // Norm slack of 1e-12.
  CHECK_NOTHROW(ArmSet::validate({{1.0 + 5e-13, 0}, {0, 1}}));
  CHECK(code_of([] { ArmSet::validate({{1.0 + 1e-11, 0}, {0, 1}}); }) == ErrorCode::NormViolation);

  Vector theta(2);
  theta << 0.6, -0.2;
  const Vector l = basis.losses(theta);
  CHECK(l[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(l[1] == doctest::Approx(-0.2).epsilon(1e-15));
}

TEST_CASE("simplex distribution checks") {
  CHECK_NOTHROW(SimplexDistribution(Vector::Constant(4, 0.25)));
  Vector bad(2);
  bad << 0.7, 0.7;
  CHECK(code_of([&] { SimplexDistribution{bad}; }) == ErrorCode::InvalidDistribution);
  bad << 1.2, -0.2;
  CHECK(code_of([&] { SimplexDistribution{bad}; }) == ErrorCode::InvalidDistribution);
  const auto pm = SimplexDistribution::point_mass(3, 2);
  CHECK(pm[2] == 1.0);
  CHECK(pm[0] == 0.0);
}

TEST_CASE("covariance of small designs") {
  const ArmSet arms = ArmSet::validate({{1, 0}, {0, 1}});
  const Matrix u = covariance(SimplexDistribution::uniform(2), arms).entries();
  CHECK(u(0, 0) == 0.5);
  CHECK(u(1, 1) == 0.5);
  CHECK(u(0, 1) == 0.0);

  const Matrix pm = covariance(SimplexDistribution::point_mass(2, 0), arms).entries();
  CHECK(pm(0, 0) == 1.0);
  CHECK(pm(1, 1) == 0.0);

  Vector p(2);
  p << 0.25, 0.75;
  const Matrix d = covariance(SimplexDistribution(p), arms).entries();
  CHECK(d(0, 0) == 0.25);
  CHECK(d(1, 1) == 0.75);
}

TEST_CASE("covariance is bitwise symmetric") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 2 + rep % 6;
    const ArmSet arms = fixtures::random_arm_set(3 * d, d, gen);
    const Matrix m = covariance(SimplexDistribution(fixtures::random_simplex(arms.size(), gen)), arms).entries();
    CHECK((m.array() == m.transpose().array()).all());
  }
}

TEST_CASE("spd_solve matches closed forms") {
  Vector v(2);
  v << 3, -1;
  const Vector a = spd_solve(SpdMatrix(Matrix::Identity(2, 2)), v);
  CHECK(a[0] == doctest::Approx(3).epsilon(1e-15));
  CHECK(a[1] == doctest::Approx(-1).epsilon(1e-15));

  v << 1, 0;
  const Vector b = spd_solve(SpdMatrix(0.5 * Matrix::Identity(2, 2)), v);
  CHECK(b[0] == doctest::Approx(2).epsilon(1e-15));
  CHECK(std::abs(b[1]) < 1e-15);

  Matrix m(2, 2);
  m << 0.5, 1.0 / 6.0, 1.0 / 6.0, 0.5;
  const Vector c = spd_solve(SpdMatrix(m), v);
  const Vector want = inverse_2x2(m) * v;  // (9/4, -3/4)
  CHECK(c[0] == doctest::Approx(want[0]).epsilon(1e-13));
  CHECK(c[1] == doctest::Approx(want[1]).epsilon(1e-13));
  CHECK(want[0] == doctest::Approx(2.25).epsilon(1e-14));
  CHECK(want[1] == doctest::Approx(-0.75).epsilon(1e-14));
}

TEST_CASE("spd_solve round trip on random SPD matrices") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index d = 2 + rep % 9;
    Matrix a(d, d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(gen);
    Matrix m = a * a.transpose() + 0.1 * Matrix::Identity(d, d);
    m = 0.5 * (m + m.transpose()).eval();
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(gen);
    const Vector x = spd_solve(SpdMatrix(m), v);
    CHECK((m * x - v).norm() <= 1e-8 * v.norm());
  }
}

TEST_CASE("singular and asymmetric matrices are rejected") {
  Matrix m(2, 2);
  m << 1, 0, 0, 0;
  CHECK(code_of([&] { SpdFactor{SpdMatrix(m)}; }) == ErrorCode::SingularMatrix);
  m << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS(SpdMatrix{m}, Error);
  // A point mass loses full rank.
  const ArmSet arms = ArmSet::validate({{1, 0}, {0, 1}});
  CHECK(code_of([&] { g_value(SimplexDistribution::point_mass(2, 0), arms); }) == ErrorCode::SingularMatrix);
}

TEST_CASE("g_value closed forms") {
  for (std::size_t d = 2; d <= 6; ++d) {
    CHECK(g_value(SimplexDistribution::uniform(d), fixtures::basis(d)) == doctest::Approx(double(d)).epsilon(1e-14));
  }
  // One-dimensional: a point mass on the unit arm gives g = 1.
  const ArmSet line = ArmSet::validate({{1.0}, {0.5}});
  CHECK(g_value(SimplexDistribution::point_mass(2, 0), line) == doctest::Approx(1.0).epsilon(1e-15));

  const double s = std::sqrt(0.5);
  const ArmSet three = ArmSet::validate({{1, 0}, {0, 1}, {s, s}});
  Matrix v = Matrix::Zero(2, 2);
  for (std::size_t i = 0; i < 3; ++i) v += three.arm(i) * three.arm(i).transpose() / 3.0;
  const Matrix inv = inverse_2x2(v);
  double want = 0.0;
  for (std::size_t i = 0; i < 3; ++i) want = std::max(want, three.arm(i).dot(inv * three.arm(i)));
  CHECK(g_value(SimplexDistribution::uniform(3), three) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("g is at least d for any design") {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 120; ++rep) {
    const std::size_t d = 2 + rep % 7;
    const ArmSet arms = fixtures::random_arm_set(d + 1 + rep % 20, d, gen);
    const SimplexDistribution p(fixtures::random_simplex(arms.size(), gen, 1e-3));
    CHECK(g_value(p, arms) >= static_cast<double>(d) * (1.0 - 1e-9));
  }
}

TEST_CASE("frank_wolfe_design on the standard basis") {
  for (std::size_t d = 2; d <= 10; ++d) {
    const DesignResult r = frank_wolfe_design(fixtures::basis(d));
    CHECK(r.converged);
    CHECK(std::abs(r.g_value - double(d)) <= 1e-12 * double(d));
    for (std::size_t i = 0; i < d; ++i) CHECK(r.pi[i] == doctest::Approx(1.0 / double(d)).epsilon(1e-14));
  }
}

TEST_CASE("frank_wolfe_design on random and duplicated sets") {
  std::mt19937_64 gen(50);
  const ArmSet arms = fixtures::random_arm_set(50, 3, gen);
  const DesignResult r = frank_wolfe_design(arms, 1e-3);
  CHECK(r.converged);
  CHECK(r.g_value <= 3.003);
  CHECK(r.g_value >= 3.0 - 1e-6);
  // Fedorov-Wynn ascends log det V from the uniform start.
  const double ld_uniform = SpdFactor(covariance(SimplexDistribution::uniform(50), arms)).log_det();
  CHECK(SpdFactor(r.moment).log_det() >= ld_uniform - 1e-12);
  CHECK(g_value(r.pi, arms) == doctest::Approx(r.g_value).epsilon(1e-12));

  auto rows = fixtures::random_ball(6, 2, gen);
  rows.push_back(rows.front());
  const DesignResult dup = frank_wolfe_design(ArmSet::validate(rows), 1e-3);
  CHECK(dup.converged);
  CHECK(dup.g_value <= 2.0 * 1.001);
}

TEST_CASE("frank_wolfe_design reports non-convergence") {
  std::mt19937_64 gen(5);
  const ArmSet arms = fixtures::random_arm_set(40, 4, gen);
  const DesignResult r = frank_wolfe_design(arms, 1e-9, 1);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.g_value > 4.0 * (1 + 1e-9));

  CHECK(code_of([&] { frank_wolfe_design(arms, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { frank_wolfe_design(arms, 1e-3, 0); }) == ErrorCode::InvalidArgument);
}
