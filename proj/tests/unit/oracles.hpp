#pragma once

// Reference computations that share no code with the library under test.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// <L, p> + beta * sum p ln p, with 0 ln 0 = 0.
inline double ftrl_objective(const Vec& L, double beta, const Vec& p) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    v += L[i] * p[i];
    if (p[i] > 0.0) v += beta * p[i] * std::log(p[i]);
  }
  return v;
}

namespace detail {

// Visits every simplex point whose first n-1 coordinates lie on the lattice
// lo_i + k * pitch (k integer) inside [lo_i, hi_i]; the last coordinate closes
// the sum.
template <class F>
void visit_box(const std::vector<double>& lo, const std::vector<double>& hi, double pitch, std::vector<double>& cur,
               std::size_t k, double used, F&& f) {
  const std::size_t free = lo.size();
  if (k == free) {
    const double last = 1.0 - used;
    if (last < -1e-12) return;
    cur[free] = std::max(last, 0.0);
    f(cur);
    return;
  }
  const auto steps = static_cast<long>(std::floor((hi[k] - lo[k]) / pitch + 1e-9));
  for (long s = 0; s <= steps; ++s) {
    const double v = lo[k] + static_cast<double>(s) * pitch;
    if (v < -1e-15) continue;
    if (used + v > 1.0 + 1e-12) break;
    cur[k] = std::max(v, 0.0);
    visit_box(lo, hi, pitch, cur, k + 1, used + cur[k], f);
  }
}

}  // namespace detail

struct GridResult {
  Vec argmin;
  double value;
};

/// Minimises the FTRL objective over the simplex: a full mesh of pitch 1e-2,
/// then local boxes of pitch 1e-3 and 1e-4 around the incumbent, re-centred
/// until the incumbent stops moving.
inline GridResult grid_search_leader(const Vec& L, double beta) {
  const std::size_t n = static_cast<std::size_t>(L.size());
  const std::size_t free = n - 1;
  GridResult best{Vec::Zero(static_cast<Eigen::Index>(n)), std::numeric_limits<double>::infinity()};
  std::vector<double> cur(n);
  auto consider = [&](const std::vector<double>& p) {
    const Vec v = Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(n));
    const double obj = ftrl_objective(L, beta, v);
    if (obj < best.value) best = {v, obj};
  };

  detail::visit_box(std::vector<double>(free, 0.0), std::vector<double>(free, 1.0), 1e-2, cur, 0, 0.0, consider);

  for (const double pitch : {1e-3, 1e-4}) {
    for (int round = 0; round < 50; ++round) {
      const Vec centre = best.argmin;
      std::vector<double> lo(free), hi(free);
      for (std::size_t i = 0; i < free; ++i) {
        lo[i] = centre[static_cast<Eigen::Index>(i)] - 10.0 * pitch;
        hi[i] = centre[static_cast<Eigen::Index>(i)] + 10.0 * pitch;
      }
      detail::visit_box(lo, hi, pitch, cur, 0, 0.0, consider);
      if ((best.argmin - centre).lpNorm<Eigen::Infinity>() < 0.5 * pitch) break;
    }
  }
  return best;
}

/// Sum_x p(x) x x^T accumulated term by term and inverted by full-pivot LU.
inline Mat moment_inverse(const Mat& arms, const Vec& p) {
  const Eigen::Index d = arms.cols();
  Mat m = Mat::Zero(d, d);
  for (Eigen::Index i = 0; i < arms.rows(); ++i) {
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) m(a, b) += p[i] * arms(i, a) * arms(i, b);
    }
  }
  return m.fullPivLu().inverse();
}

/// Lowest index attaining the minimum, scanning left to right.
inline std::size_t brute_argmin(const Vec& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] < v[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(i);
  }
  return best;
}

/// Two-pass mean and sample standard deviation.
inline std::pair<double, double> two_pass(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  return {mean, sd};
}

}  // namespace oracles
