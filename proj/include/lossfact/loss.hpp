#ifndef LOSSFACT_LOSS_HPP
#define LOSSFACT_LOSS_HPP

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lossfact {

using ScalarMap = std::function<double(double)>;

/// Error raised for invalid loss construction or queries (non-finite inputs,
/// failed symmetry checks, losses without the required structure).
class LossError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A margin loss l(x), x = y<theta, x>, together with the metadata the
/// solvers and bound calculators need.
///
/// Instances are immutable once built and may be evaluated concurrently.
class LossSpec {
 public:
  struct Traits {
    std::optional<double> odd_slope;         // a, present iff l is a-linear-odd
    std::optional<double> lipschitz;         // L
    std::optional<double> strong_convexity;  // gamma
    bool convex = false;
  };

  LossSpec(std::string name, ScalarMap eval, ScalarMap subgrad, Traits traits,
           ScalarMap curvature = {});

  const std::string& name() const { return name_; }

  double operator()(double x) const { return eval_(x); }
  double eval(double x) const { return eval_(x); }

  /// One element of the subdifferential at x. At kinks this is the
  /// right-derivative.
  double subgrad(double x) const { return subgrad_(x); }

  /// Second derivative, when the loss is twice differentiable.
  bool has_curvature() const { return static_cast<bool>(curvature_); }
  double curvature(double x) const;

  const std::optional<double>& odd_slope() const { return traits_.odd_slope; }
  const std::optional<double>& lipschitz() const { return traits_.lipschitz; }
  const std::optional<double>& strong_convexity() const {
    return traits_.strong_convexity;
  }
  bool convex() const { return traits_.convex; }
  bool is_linear_odd() const { return traits_.odd_slope.has_value(); }

  /// The odd slope, throwing LossError when the loss is not linear-odd.
  double require_odd_slope() const;

 private:
  std::string name_;
  ScalarMap eval_;
  ScalarMap subgrad_;
  ScalarMap curvature_;
  Traits traits_;
};

// Catalog members. The odd slope always follows (l(x) - l(-x)) / 2 = a x.
LossSpec logistic_loss();
LossSpec square_loss();
LossSpec matsushita_loss();
LossSpec unhinged_loss();
LossSpec perceptron_loss();
LossSpec double_hinge_loss();
LossSpec rho_loss(double rho = 1.0);
LossSpec zero_one_loss();
LossSpec hinge_loss();
LossSpec exponential_loss();

/// Smoothed (Huber-ised) hinge: 0 for x >= 1, (1-x)^2/2 on [0,1), 1/2 - x
/// below 0. Not linear-odd; used for affine odd-part bounds.
LossSpec huber_loss();

/// logistic, square, matsushita, unhinged, perceptron, double_hinge, rho:1,
/// zero_one, hinge, exponential.
std::vector<LossSpec> catalog();

/// Resolves a stable CLI identifier ("logistic", "rho:0.5", "huber", ...).
LossSpec loss_by_name(const std::string& name);

/// (l(x) - l(-x)) / 2.
double odd_part(const LossSpec& loss, double x);

/// (l(x) + l(-x)) / 2.
double even_part(const LossSpec& loss, double x);

/// Grid used for linear-odd detection when the caller has no preference.
std::vector<double> default_lol_grid();

/// Returns a when odd_part(x)/x is constant on the grid (relative 1e-9),
/// nothing otherwise.
std::optional<double> lol_slope_check(const LossSpec& loss,
                                      std::span<const double> grid);

/// Builds l(x) = even_fn(x) + a x. even_fn must be symmetric on `grid`
/// (a default grid over [-20, 20] when empty). Without `even_subgrad` the
/// subgradient is a right-sided finite difference.
LossSpec craft_lol(ScalarMap even_fn, double a, std::string name = "crafted",
                   std::span<const double> grid = {},
                   ScalarMap even_subgrad = {});

struct AffineBound {
  double slope = 0.0;
  double intercept = 0.0;
  bool exact = false;

  double operator()(double x) const { return slope * x + intercept; }
};

/// Affine upper bound slope*x + intercept on the odd part of a loss with
/// finite asymptotes at both infinities. The hinge bound is closed-form;
/// everything else is estimated from far-away evaluations and a sup over
/// `grid`.
AffineBound affine_odd_bound(const LossSpec& loss, std::span<const double> grid);

}  // namespace lossfact

#endif  // LOSSFACT_LOSS_HPP
