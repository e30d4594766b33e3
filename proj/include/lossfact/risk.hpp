#ifndef LOSSFACT_RISK_HPP
#define LOSSFACT_RISK_HPP

#include <optional>

#include "lossfact/loss.hpp"
#include "lossfact/mean_operator.hpp"
#include "lossfact/sample.hpp"

namespace lossfact {

/// Linear hypothesis x -> <theta, x>, optionally constrained to a ball.
class Model {
 public:
  explicit Model(Vector theta, std::optional<double> norm_cap = std::nullopt);

  const Vector& theta() const { return theta_; }
  const std::optional<double>& norm_cap() const { return norm_cap_; }
  Eigen::Index dim() const { return theta_.size(); }

  double predict(const Eigen::Ref<const Vector>& x) const { return theta_.dot(x); }

 private:
  Vector theta_;
  std::optional<double> norm_cap_;
};

/// (1/m) sum_i l(y_i <theta, x_i>).
double empirical_risk(const Sample& s, const LossSpec& loss, const Model& model);

/// Mean of l(sigma <theta, x>) over the 2m doubled rows: the label-free part
/// of the factored risk.
double doubled_risk(const DoubledSample& s2x, const LossSpec& loss,
                    const Model& model);

/// doubled_risk + a <theta, mu>. Equals empirical_risk on the sample that
/// produced (s2x, mu) for every linear-odd loss.
double factored_risk(const DoubledSample& s2x, const MeanOperator& mu,
                     const LossSpec& loss, const Model& model);

/// The factored risk evaluated on an estimate of the mean operator.
double estimated_risk(const DoubledSample& s2x, const MeanOperator& mu_hat,
                      const LossSpec& loss, const Model& model);

/// Gradient of factored_risk with respect to theta (subgradient for
/// non-smooth losses): mean over doubled rows of l'(sigma<theta,x>) sigma x,
/// plus a mu.
Vector factored_gradient(const DoubledSample& s2x, const MeanOperator& mu,
                         const LossSpec& loss, const Vector& theta);

struct EvenOddRisk {
  double even_term = 0.0;  // (1/2) E_S[ sum_sigma l(sigma <theta, x>) ]
  double odd_term = 0.0;   // E_S[ l_o(y <theta, x>) ]

  double total() const { return even_term + odd_term; }
};

/// Even/odd split valid for any margin loss.
EvenOddRisk general_factored_risk(const Sample& s, const LossSpec& loss,
                                  const Model& model);

struct RegressionIdentity {
  double lhs = 0.0;  // E[(<theta,x> - y)^2]
  double rhs = 0.0;  // E[<theta,x>^2] + E[y^2] - 2 <theta, E[y x]>
};

/// Square-loss regression with real targets, evaluated both directly and in
/// factored form.
RegressionIdentity regression_factored_objective(const Matrix& observations,
                                                 const Vector& targets,
                                                 const Model& model);

/// Risk under expected label noise over the support of `clean`:
/// (1/m) sum_i (1 - p_{y_i}) l(y_i <theta,x_i>) + p_{y_i} l(-y_i <theta,x_i>).
double expected_noisy_risk(const Sample& clean, const NoiseSpec& noise,
                           const LossSpec& loss, const Model& model);

/// Fraction of rows with y <theta, x> <= 0.
double zero_one_error(const Sample& s, const Model& model);

}  // namespace lossfact

#endif  // LOSSFACT_RISK_HPP
