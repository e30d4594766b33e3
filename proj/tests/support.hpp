#ifndef LOSSFACT_TESTS_SUPPORT_HPP
#define LOSSFACT_TESTS_SUPPORT_HPP

// Random fixtures and brute-force oracles shared by the test binaries.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "lossfact/rng.hpp"
#include "lossfact/sample.hpp"

namespace lossfact::fixtures {

inline Sample random_sample(Rng& rng, Eigen::Index m, Eigen::Index d, double scale = 1.0) {
  Matrix x(m, d);
  Vector y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    y[i] = rng.sign();
    for (Eigen::Index k = 0; k < d; ++k) x(i, k) = scale * rng.normal();
  }
  return Sample(std::move(x), std::move(y));
}

/// Uniform direction, norm uniform in [0, max_norm].
inline Vector random_theta(Rng& rng, Eigen::Index d, double max_norm) {
  Vector v(d);
  for (Eigen::Index k = 0; k < d; ++k) v[k] = rng.normal();
  return v * (max_norm * rng.uniform() / v.norm());
}

/// (1/m) sum l(y_i <theta, x_i>) by an explicit double loop.
inline double brute_risk(const Matrix& x, const Vector& y, const Vector& theta,
                         const std::function<double(double)>& l) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double dot = 0.0;
    for (Eigen::Index k = 0; k < x.cols(); ++k) dot += x(i, k) * theta[k];
    total += l(y[i] * dot);
  }
  return total / static_cast<double>(x.rows());
}

/// (1/m) sum y_i x_i by an explicit loop.
inline Vector brute_mean_op(const Matrix& x, const Vector& y) {
  Vector mu = Vector::Zero(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index k = 0; k < x.cols(); ++k) mu[k] += y[i] * x(i, k);
  }
  return mu / static_cast<double>(x.rows());
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

}  // namespace lossfact::fixtures

#endif  // LOSSFACT_TESTS_SUPPORT_HPP
