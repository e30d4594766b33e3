#ifndef LOSSFACT_BOUNDS_HPP
#define LOSSFACT_BOUNDS_HPP

#include <cstdint>

#include "lossfact/loss.hpp"
#include "lossfact/sample.hpp"

namespace lossfact {

class BoundError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BoundInputs {
  double X = 1.0;      // max feature norm
  double B = 1.0;      // model norm cap
  double L = 1.0;      // Lipschitz constant
  double a = 0.0;      // odd slope (sign ignored)
  std::int64_t m = 1;
  std::int64_t d = 1;
  double delta = 0.05;
  double c_XB = 0.0;   // max_y l(y X B)

  /// Throws BoundError on negative scales, m or d < 1, delta outside (0, 1).
  void validate() const;
};

/// v = 1/2 + sqrt(1/2 - 1/m)/2 for even m >= 2.
double rademacher_v(std::int64_t m);

/// v B X / sqrt(2m).
double rademacher_bound(double B, double X, std::int64_t m);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Average over random sign vectors of B ||(1/2m) sum_i sigma_i x_i|| on the
/// doubled sample, the supremum of the linear functional over the B-ball.
MonteCarloEstimate empirical_rademacher_mc(const DoubledSample& s2x, double B,
                                           std::int64_t n_draws, std::uint64_t seed);

enum class DeviationForm {
  proof,      // X sqrt((2d/m) log(d/delta))
  statement,  // X sqrt((d/m) log(d/delta))
};

/// High-probability bound on ||mu_D - mu_S||.
double mean_op_deviation_bound(double X, std::int64_t d, std::int64_t m, double delta,
                               DeviationForm form = DeviationForm::proof);

/// (sqrt2 + 1)/4, or (sqrt2 + 1)/2 with proof_constant.
double complexity_constant(bool proof_constant = false);

/// Explicit form: k XBL/sqrt(m) + (c L/2 + 2|a| X B sqrt(d log d)) sqrt(log(2/delta)/m).
double generalization_bound(const BoundInputs& b, bool proof_constant = false);

/// First form with a caller-supplied ||mu_D - mu_S||:
/// k XBL/sqrt(m) + (c L/2) sqrt(log(1/delta)/m) + 2|a| B deviation.
double generalization_bound(const BoundInputs& b, double mu_deviation,
                            bool proof_constant = false);

/// generalization_bound with the 2|a|XB term divided by 1 - p_minus - p_plus.
double noisy_generalization_bound(const BoundInputs& b, const NoiseSpec& noise,
                                  bool proof_constant = false);

/// 4 |a| B max(p_plus, p_minus) ||mu_D||.
double aln_epsilon(double a, double B, const NoiseSpec& noise, double mu_norm);

/// sqrt(2 epsilon / gamma).
double minimizer_distance_bound(double epsilon, double gamma);

/// max(l(XB), l(-XB)).
double c_of_XB(const LossSpec& loss, double X, double B);

}  // namespace lossfact

#endif  // LOSSFACT_BOUNDS_HPP
