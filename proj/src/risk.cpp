#include "lossfact/risk.hpp"

#include <cmath>
#include <string>

namespace lossfact {

namespace {

void check_dim(Eigen::Index expected, Eigen::Index got, const char* what) {
  if (expected != got) {
    throw SampleError(std::string(what) + ": dimension mismatch (" +
                      std::to_string(expected) + " vs " + std::to_string(got) + ")");
  }
}

}  // namespace

Model::Model(Vector theta, std::optional<double> norm_cap)
    : theta_(std::move(theta)), norm_cap_(norm_cap) {
  if (!theta_.allFinite()) throw SampleError("model parameters must be finite");
  if (norm_cap_) {
    if (!(*norm_cap_ >= 0.0)) throw SampleError("norm cap must be >= 0");
    if (theta_.norm() > *norm_cap_ + 1e-12) {
      throw SampleError("model exceeds its norm cap");
    }
  }
}

double empirical_risk(const Sample& s, const LossSpec& loss, const Model& model) {
  check_dim(s.dim(), model.dim(), "empirical_risk");
  const Vector margins =
      (s.observations() * model.theta()).cwiseProduct(s.labels());
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) total += loss(margins[i]);
  return total / static_cast<double>(s.size());
}

double doubled_risk(const DoubledSample& s2x, const LossSpec& loss,
                    const Model& model) {
  check_dim(s2x.dim(), model.dim(), "doubled_risk");
  const Vector margins =
      (s2x.observations() * model.theta()).cwiseProduct(s2x.signs());
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) total += loss(margins[i]);
  return total / static_cast<double>(s2x.size());
}

double factored_risk(const DoubledSample& s2x, const MeanOperator& mu,
                     const LossSpec& loss, const Model& model) {
  const double a = loss.require_odd_slope();
  check_dim(s2x.dim(), mu.dim(), "factored_risk");
  return doubled_risk(s2x, loss, model) + a * model.theta().dot(mu.vector);
}

double estimated_risk(const DoubledSample& s2x, const MeanOperator& mu_hat,
                      const LossSpec& loss, const Model& model) {
  return factored_risk(s2x, mu_hat, loss, model);
}

Vector factored_gradient(const DoubledSample& s2x, const MeanOperator& mu,
                         const LossSpec& loss, const Vector& theta) {
  const double a = loss.require_odd_slope();
  check_dim(s2x.dim(), theta.size(), "factored_gradient");
  check_dim(s2x.dim(), mu.dim(), "factored_gradient");
  const Vector margins = (s2x.observations() * theta).cwiseProduct(s2x.signs());
  Vector weights(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    weights[i] = loss.subgrad(margins[i]) * s2x.signs()[i];
  }
  return s2x.observations().transpose() * weights /
             static_cast<double>(s2x.size()) +
         a * mu.vector;
}

EvenOddRisk general_factored_risk(const Sample& s, const LossSpec& loss,
                                  const Model& model) {
  check_dim(s.dim(), model.dim(), "general_factored_risk");
  const Vector scores = s.observations() * model.theta();
  double even = 0.0;
  double odd = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double h = scores[i];
    even += 0.5 * (loss(h) + loss(-h));
    odd += odd_part(loss, s.labels()[i] * h);
  }
  const double m = static_cast<double>(s.size());
  return {even / m, odd / m};
}

RegressionIdentity regression_factored_objective(const Matrix& observations,
                                                 const Vector& targets,
                                                 const Model& model) {
  check_dim(observations.rows(), targets.size(), "regression_factored_objective");
  check_dim(observations.cols(), model.dim(), "regression_factored_objective");
  if (observations.rows() < 1) throw SampleError("regression needs m >= 1");
  const double m = static_cast<double>(observations.rows());
  const Vector pred = observations * model.theta();
  const double lhs = (pred - targets).squaredNorm() / m;
  const Vector mu = observations.transpose() * targets / m;
  const double rhs =
      pred.squaredNorm() / m + targets.squaredNorm() / m - 2.0 * model.theta().dot(mu);
  return {lhs, rhs};
}

double expected_noisy_risk(const Sample& clean, const NoiseSpec& noise,
                           const LossSpec& loss, const Model& model) {
  check_dim(clean.dim(), model.dim(), "expected_noisy_risk");
  const Vector margins =
      (clean.observations() * model.theta()).cwiseProduct(clean.labels());
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double p = noise.rate_for(clean.labels()[i]);
    total += (1.0 - p) * loss(margins[i]) + p * loss(-margins[i]);
  }
  return total / static_cast<double>(clean.size());
}

double zero_one_error(const Sample& s, const Model& model) {
  check_dim(s.dim(), model.dim(), "zero_one_error");
  const Vector margins =
      (s.observations() * model.theta()).cwiseProduct(s.labels());
  return (margins.array() <= 0.0).cast<double>().mean();
}

}  // namespace lossfact
