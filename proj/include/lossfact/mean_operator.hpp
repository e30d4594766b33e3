#ifndef LOSSFACT_MEAN_OPERATOR_HPP
#define LOSSFACT_MEAN_OPERATOR_HPP

#include <string>
#include <variant>

#include "lossfact/sample.hpp"

namespace lossfact {

struct ExactProvenance {
  bool operator==(const ExactProvenance&) const = default;
};
struct NoiseCorrectedProvenance {
  NoiseSpec noise;
  bool operator==(const NoiseCorrectedProvenance&) const = default;
};
struct PuProvenance {
  double pi_plus = 1.0;
  bool operator==(const PuProvenance&) const = default;
};

using Provenance =
    std::variant<ExactProvenance, NoiseCorrectedProvenance, PuProvenance>;

/// The mean operator E_S[y x], or an estimate of it, tagged with how it was
/// obtained.
struct MeanOperator {
  Vector vector;
  Provenance provenance;

  double norm() const { return vector.norm(); }
  Eigen::Index dim() const { return vector.size(); }
};

/// "exact", "noise_corrected" or "pu".
std::string provenance_name(const Provenance& p);

/// (1/m) sum_i y_i x_i.
MeanOperator mean_op(const Sample& s);

struct CovarianceIdentity {
  Vector lhs;  // mean operator
  Vector rhs;  // Cov_S[x, y] + (2 pi_plus - 1) E_S[x]
  double max_abs_diff = 0.0;
};

/// Evaluates both sides of mu = Cov[x, y] + (2 pi_+ - 1) E[x] by separate
/// summations. The covariance uses centred products and 1/m normalisation.
CovarianceIdentity covariance_identity_check(const Sample& s);

/// Unbiased estimate from noisy labels: the average of
/// (y - (p_minus - p_plus)) / (1 - p_minus - p_plus) * x.
MeanOperator noise_corrected_mean_op(const Sample& noisy, const NoiseSpec& noise);

/// Mean operator of the label-noise distribution over the support of `clean`:
/// (1/m) sum_i (1 - 2 p_{y_i}) y_i x_i. Exact, no flips are sampled.
MeanOperator expected_noisy_mean_op(const Sample& clean, const NoiseSpec& noise);

/// Positive-unlabelled estimate pi_plus * E_{S+}[x]. Every label in
/// `positives` must be +1.
MeanOperator pu_mean_op(const Sample& positives, double pi_plus);

}  // namespace lossfact

#endif  // LOSSFACT_MEAN_OPERATOR_HPP
