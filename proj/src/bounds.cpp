#include "lossfact/bounds.hpp"

#include <cmath>

#include "lossfact/rng.hpp"

namespace lossfact {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw BoundError(message);
}

double explicit_linear_term(const BoundInputs& b) {
  const double d = static_cast<double>(b.d);
  return 2.0 * std::abs(b.a) * b.X * b.B * std::sqrt(d * std::log(d));
}

}  // namespace

void BoundInputs::validate() const {
  require(std::isfinite(X) && X >= 0.0, "X must be finite and >= 0");
  require(std::isfinite(B) && B >= 0.0, "B must be finite and >= 0");
  require(std::isfinite(L) && L >= 0.0, "L must be finite and >= 0");
  require(std::isfinite(a), "a must be finite");
  require(std::isfinite(c_XB) && c_XB >= 0.0, "c(X,B) must be finite and >= 0");
  require(m >= 1, "m must be >= 1");
  require(d >= 1, "d must be >= 1");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
}

double rademacher_v(std::int64_t m) {
  require(m >= 2, "rademacher_v needs m >= 2");
  require(m % 2 == 0, "rademacher_v needs an even m");
  return 0.5 + 0.5 * std::sqrt(0.5 - 1.0 / static_cast<double>(m));
}

double rademacher_bound(double B, double X, std::int64_t m) {
  require(B >= 0.0 && X >= 0.0, "rademacher_bound needs B, X >= 0");
  return rademacher_v(m) * B * X / std::sqrt(2.0 * static_cast<double>(m));
}

MonteCarloEstimate empirical_rademacher_mc(const DoubledSample& s2x, double B,
                                           std::int64_t n_draws, std::uint64_t seed) {
  require(n_draws >= 1, "empirical_rademacher_mc needs n_draws >= 1");
  require(B >= 0.0, "empirical_rademacher_mc needs B >= 0");
  const Matrix& x = s2x.observations();
  const Eigen::Index rows = x.rows();
  const double scale = B / static_cast<double>(rows);

  Rng rng(seed);
  Vector sigma(rows);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t k = 0; k < n_draws; ++k) {
    for (Eigen::Index i = 0; i < rows; ++i) sigma[i] = rng.sign();
    const double value = scale * (x.transpose() * sigma).norm();
    sum += value;
    sum_sq += value * value;
  }
  const double n = static_cast<double>(n_draws);
  const double mean = sum / n;
  double std_error = 0.0;
  if (n_draws > 1) {
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    std_error = std::sqrt(var / n);
  }
  return {mean, std_error};
}

double mean_op_deviation_bound(double X, std::int64_t d, std::int64_t m, double delta,
                               DeviationForm form) {
  require(std::isfinite(X) && X >= 0.0, "X must be finite and >= 0");
  require(d >= 1 && m >= 1, "d and m must be >= 1");
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  const double factor = form == DeviationForm::proof ? 2.0 : 1.0;
  const double dd = static_cast<double>(d);
  return X * std::sqrt(factor * dd / static_cast<double>(m) * std::log(dd / delta));
}

double complexity_constant(bool proof_constant) {
  return (std::sqrt(2.0) + 1.0) / (proof_constant ? 2.0 : 4.0);
}

double generalization_bound(const BoundInputs& b, bool proof_constant) {
  b.validate();
  const double m = static_cast<double>(b.m);
  const double complexity = complexity_constant(proof_constant) * b.X * b.B * b.L / std::sqrt(m);
  const double penalty = std::sqrt(std::log(2.0 / b.delta) / m);
  return complexity + (b.c_XB * b.L / 2.0 + explicit_linear_term(b)) * penalty;
}

double generalization_bound(const BoundInputs& b, double mu_deviation,
                            bool proof_constant) {
  b.validate();
  require(std::isfinite(mu_deviation) && mu_deviation >= 0.0,
          "mean operator deviation must be finite and >= 0");
  const double m = static_cast<double>(b.m);
  const double complexity = complexity_constant(proof_constant) * b.X * b.B * b.L / std::sqrt(m);
  return complexity + b.c_XB * b.L / 2.0 * std::sqrt(std::log(1.0 / b.delta) / m) +
         2.0 * std::abs(b.a) * b.B * mu_deviation;
}

double noisy_generalization_bound(const BoundInputs& b, const NoiseSpec& noise,
                                  bool proof_constant) {
  b.validate();
  const double keep = 1.0 - noise.p_minus - noise.p_plus;
  require(keep > 0.0, "noise rates must satisfy p_minus + p_plus < 1");
  const double m = static_cast<double>(b.m);
  const double complexity = complexity_constant(proof_constant) * b.X * b.B * b.L / std::sqrt(m);
  const double penalty = std::sqrt(std::log(2.0 / b.delta) / m);
  return complexity + (b.c_XB * b.L / 2.0 + explicit_linear_term(b) / keep) * penalty;
}

double aln_epsilon(double a, double B, const NoiseSpec& noise, double mu_norm) {
  require(B >= 0.0 && mu_norm >= 0.0, "aln_epsilon needs B, ||mu|| >= 0");
  return 4.0 * std::abs(a) * B * noise.max_rate() * mu_norm;
}

double minimizer_distance_bound(double epsilon, double gamma) {
  require(gamma > 0.0, "minimizer_distance_bound needs gamma > 0");
  require(epsilon >= 0.0, "minimizer_distance_bound needs epsilon >= 0");
  return std::sqrt(2.0 * epsilon / gamma);
}

double c_of_XB(const LossSpec& loss, double X, double B) {
  require(std::isfinite(X) && std::isfinite(B), "c(X,B) needs finite X and B");
  const double xb = X * B;
  return std::max(loss(xb), loss(-xb));
}

}  // namespace lossfact
