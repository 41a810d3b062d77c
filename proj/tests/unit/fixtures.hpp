#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "botw/geometry.hpp"
#include "botw/harness.hpp"

namespace fixtures {

using botw::ArmSet;
using botw::Vector;

// e1, e2 and three far suboptimal unit-ball arms; with theta_star the best
// arm is e1 and the smallest gap (e2) is 0.2.
inline std::vector<std::vector<double>> five_arms() {
  return {{1.0, 0.0}, {0.0, 1.0}, {-0.6, 0.8}, {0.8, -0.6}, {-0.8, -0.6}};
}

inline Vector theta_star() {
  Vector th(2);
  th << -0.6, -0.4;
  return th;
}

inline ArmSet basis(std::size_t d) {
  std::vector<std::vector<double>> rows(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) rows[i][i] = 1.0;
  return ArmSet::validate(rows);
}

/// n random points in the unit ball of R^d (direction uniform, radius in [0.2, 1]).
inline std::vector<std::vector<double>> random_ball(std::size_t n, std::size_t d, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0.2, 1.0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (auto& r : rows) {
    double norm = 0.0;
    for (auto& v : r) {
      v = normal(gen);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    const double s = radius(gen) / norm;
    for (auto& v : r) v *= s;
  }
  return rows;
}

inline ArmSet random_arm_set(std::size_t n, std::size_t d, std::mt19937_64& gen) {
  return ArmSet::validate(random_ball(n, d, gen));
}

/// Random point of the simplex with every entry >= floor.
inline Vector random_simplex(std::size_t n, std::mt19937_64& gen, double floor = 0.0) {
  std::exponential_distribution<double> ex(1.0);
  Vector p(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = ex(gen);
  p /= p.sum();
  p = floor + (1.0 - floor * static_cast<double>(n)) * p.array();
  return p / p.sum();
}

inline Vector random_unit_ball_vector(std::size_t d, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(gen);
  return v * (radius(gen) / v.norm());
}

inline botw::RunConfig stochastic_config(std::size_t horizon, std::size_t reps, std::uint64_t seed) {
  botw::RunConfig cfg;
  cfg.arm_set_source = "inline";
  cfg.arms = ArmSet::validate(five_arms());
  cfg.environment.variant = botw::Variant::Stochastic;
  cfg.environment.theta = theta_star();
  cfg.horizon_T = horizon;
  cfg.repetitions = reps;
  cfg.base_seed = seed;
  return cfg;
}

/// Fresh scratch directory under the working directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::current_path() / ("scratch_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
