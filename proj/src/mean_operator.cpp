#include "lossfact/mean_operator.hpp"

#include <cmath>

namespace lossfact {

std::string provenance_name(const Provenance& p) {
  struct {
    std::string operator()(const ExactProvenance&) const { return "exact"; }
    std::string operator()(const NoiseCorrectedProvenance&) const {
      return "noise_corrected";
    }
    std::string operator()(const PuProvenance&) const { return "pu"; }
  } visitor;
  return std::visit(visitor, p);
}

MeanOperator mean_op(const Sample& s) {
  const double m = static_cast<double>(s.size());
  Vector mu = s.observations().transpose() * s.labels() / m;
  return {std::move(mu), ExactProvenance{}};
}

CovarianceIdentity covariance_identity_check(const Sample& s) {
  const Matrix& x = s.observations();
  const Vector& y = s.labels();
  const double m = static_cast<double>(s.size());

  Vector lhs = Vector::Zero(s.dim());
  for (Eigen::Index i = 0; i < s.size(); ++i) lhs += y[i] * x.row(i).transpose();
  lhs /= m;

  const Vector x_mean = x.colwise().mean().transpose();
  const double y_mean = y.mean();
  Vector cov = Vector::Zero(s.dim());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    cov += (y[i] - y_mean) * (x.row(i).transpose() - x_mean);
  }
  cov /= m;
  const double pi_plus = s.positive_fraction();
  Vector rhs = cov + (2.0 * pi_plus - 1.0) * x_mean;

  const double diff = (lhs - rhs).cwiseAbs().maxCoeff();
  return {std::move(lhs), std::move(rhs), diff};
}

MeanOperator noise_corrected_mean_op(const Sample& noisy, const NoiseSpec& noise) {
  const double denom = 1.0 - noise.p_minus - noise.p_plus;
  if (!(denom > 0.0)) {
    throw SampleError("noise correction needs p_minus + p_plus < 1");
  }
  const Vector weights =
      (noisy.labels().array() - (noise.p_minus - noise.p_plus)) / denom;
  Vector mu = noisy.observations().transpose() * weights /
              static_cast<double>(noisy.size());
  return {std::move(mu), NoiseCorrectedProvenance{noise}};
}

MeanOperator expected_noisy_mean_op(const Sample& clean, const NoiseSpec& noise) {
  Vector weights(clean.size());
  for (Eigen::Index i = 0; i < clean.size(); ++i) {
    const double y = clean.labels()[i];
    weights[i] = (1.0 - 2.0 * noise.rate_for(y)) * y;
  }
  Vector mu = clean.observations().transpose() * weights /
              static_cast<double>(clean.size());
  return {std::move(mu), ExactProvenance{}};
}

MeanOperator pu_mean_op(const Sample& positives, double pi_plus) {
  if (!(pi_plus > 0.0 && pi_plus <= 1.0)) {
    throw SampleError("pi_plus must lie in (0, 1]");
  }
  if ((positives.labels().array() != 1.0).any()) {
    throw SampleError("pu_mean_op: sample contains a negative example");
  }
  Vector mu = pi_plus * positives.observations().colwise().mean().transpose();
  return {std::move(mu), PuProvenance{pi_plus}};
}

}  // namespace lossfact
