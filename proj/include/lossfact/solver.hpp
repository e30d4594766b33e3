#ifndef LOSSFACT_SOLVER_HPP
#define LOSSFACT_SOLVER_HPP

#include <cstdint>
#include <functional>
#include <string>

#include "lossfact/loss.hpp"
#include "lossfact/mean_operator.hpp"
#include "lossfact/risk.hpp"
#include "lossfact/sample.hpp"

namespace lossfact {

/// How the mean-operator term enters a stochastic step on the doubled sample.
///
/// paper_faithful adds a*mu/2 to the row subgradient v. risk_consistent adds
/// a*mu, so the step averaged over the 2m rows is exactly the gradient of the
/// empirical risk.
enum class UpdateMode { paper_faithful, risk_consistent };

std::string to_string(UpdateMode mode);
UpdateMode update_mode_from_string(const std::string& name);

/// Called with (t, theta^t) once before the first step (t = 0) and after
/// every projected step.
using StepObserver = std::function<void(std::int64_t, const Vector&)>;

struct SolverConfig {
  double lambda = 1e-6;
  std::int64_t T = 1;
  std::uint64_t seed = 0;
  UpdateMode update_mode = UpdateMode::paper_faithful;
  StepObserver observer;

  /// Throws SampleError unless lambda > 0 and T >= 1.
  void validate() const;

  /// Projection radius 1/sqrt(lambda).
  double radius() const;
};

/// Projected stochastic subgradient descent on the doubled sample with the
/// mean operator supplied separately. Step size 1/(1 + lambda t); iterates
/// are projected on the ball of radius 1/sqrt(lambda).
Model mosgd_train(const DoubledSample& s2x, const MeanOperator& mu,
                  const LossSpec& loss, const SolverConfig& cfg);

/// Builds the doubled sample from the noisy observations, estimates the mean
/// operator with the noise-corrected estimator and runs mosgd_train.
Model mosgd_noisy(const Sample& noisy, const LossSpec& loss, const NoiseSpec& noise,
                  const SolverConfig& cfg);

/// The stochastic direction mosgd_train uses for doubled row `row` at theta.
Vector mosgd_direction(const DoubledSample& s2x, const MeanOperator& mu,
                       const LossSpec& loss, const Vector& theta,
                       Eigen::Index row, UpdateMode mode);

/// Plain projected SGD on R_S + (lambda/2)||theta||^2 with the same step
/// sizes and projection; rows are drawn from the labelled sample.
Model sgd_baseline(const Sample& s, const LossSpec& loss, const SolverConfig& cfg);

struct Regularizer {
  enum class Kind { l2, l1 };
  Kind kind = Kind::l2;
  double lambda = 0.0;

  static Regularizer l2(double lambda) { return {Kind::l2, lambda}; }
  static Regularizer l1(double lambda) { return {Kind::l1, lambda}; }

  /// prox_{eta * Theta}(z): shrinkage by 1/(1 + eta lambda) for l2
  /// ((lambda/2)||.||^2), soft thresholding at eta lambda for l1.
  Vector prox(const Vector& z, double eta) const;
};

struct ProxConfig {
  Regularizer regularizer = Regularizer::l2(0.0);
  double eta = 0.1;
  std::int64_t T = 1000;
  std::uint64_t seed = 0;  // unused by the full-batch step; kept in records
  UpdateMode update_mode = UpdateMode::risk_consistent;
};

/// Full-batch proximal gradient: theta <- prox(theta - eta (g + c a mu)),
/// g the gradient of the doubled-sample risk, c = 1/2 (paper_faithful) or 1.
Model prox_train(const DoubledSample& s2x, const MeanOperator& mu,
                 const LossSpec& loss, const ProxConfig& cfg);

/// argmin of the square-loss risk (1/m) sum (1 - y<theta,x>)^2 plus
/// (lambda/2)||theta||^2, i.e. (2G + lambda I) theta = 2 mu with
/// G = X^T X / m. Only observations and mu enter, so any mean operator
/// (clean, expected-noise, estimated) can be plugged in.
Model exact_minimizer_square(const Matrix& observations, const Vector& mu,
                             double lambda);
Model exact_minimizer_square(const Sample& s, double lambda);

struct MinimizeResult {
  Model model;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
};

struct MinimizeOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-10;
};

/// Deterministic minimiser of factored_risk + (lambda/2)||theta||^2:
/// damped Newton when the loss has curvature, gradient descent with
/// backtracking otherwise.
MinimizeResult full_batch_minimize(const DoubledSample& s2x, const MeanOperator& mu,
                                   const LossSpec& loss, double lambda,
                                   const MinimizeOptions& options = {});

}  // namespace lossfact

#endif  // LOSSFACT_SOLVER_HPP
