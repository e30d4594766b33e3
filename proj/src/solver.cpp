#include "lossfact/solver.hpp"

#include <cassert>
#include <cmath>

#include "lossfact/rng.hpp"

namespace lossfact {

std::string to_string(UpdateMode mode) {
  return mode == UpdateMode::paper_faithful ? "paper_faithful" : "risk_consistent";
}

UpdateMode update_mode_from_string(const std::string& name) {
  if (name == "paper_faithful") return UpdateMode::paper_faithful;
  if (name == "risk_consistent") return UpdateMode::risk_consistent;
  throw std::invalid_argument("unknown update mode '" + name + "'");
}

void SolverConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw SampleError("solver needs lambda > 0");
  }
  if (T < 1) throw SampleError("solver needs T >= 1");
}

double SolverConfig::radius() const { return 1.0 / std::sqrt(lambda); }

namespace {

void project(Vector& theta, double radius) {
  const double norm = theta.norm();
  if (norm <= radius) return;
  theta *= radius / norm;
  // Rounding can leave the rescaled norm a few ulps above the radius.
  while (theta.norm() > radius) theta *= 1.0 - 0x1.0p-52;
}

double mu_coefficient(UpdateMode mode) {
  return mode == UpdateMode::paper_faithful ? 0.5 : 1.0;
}

}  // namespace

Vector mosgd_direction(const DoubledSample& s2x, const MeanOperator& mu,
                       const LossSpec& loss, const Vector& theta,
                       Eigen::Index row, UpdateMode mode) {
  const double a = loss.require_odd_slope();
  const double sigma = s2x.signs()[row];
  const auto x = s2x.observations().row(row).transpose();
  const double slope = loss.subgrad(sigma * theta.dot(x));
  return slope * sigma * x + mu_coefficient(mode) * a * mu.vector;
}

Model mosgd_train(const DoubledSample& s2x, const MeanOperator& mu,
                  const LossSpec& loss, const SolverConfig& cfg) {
  cfg.validate();
  const double a = loss.require_odd_slope();
  if (mu.dim() != s2x.dim()) {
    throw SampleError("mosgd_train: mean operator dimension mismatch");
  }
  const double radius = cfg.radius();
  const Vector mu_step = mu_coefficient(cfg.update_mode) * a * mu.vector;
  const auto rows = static_cast<std::uint64_t>(s2x.size());
  const Matrix& x = s2x.observations();
  const Vector& signs = s2x.signs();

  Rng rng(cfg.seed);
  Vector theta = Vector::Zero(s2x.dim());
  if (cfg.observer) cfg.observer(0, theta);
  for (std::int64_t t = 1; t <= cfg.T; ++t) {
    const auto i = static_cast<Eigen::Index>(rng.below(rows));
    const double eta = 1.0 / (1.0 + cfg.lambda * static_cast<double>(t));
    const double sigma = signs[i];
    const double slope = loss.subgrad(sigma * x.row(i).dot(theta));
    theta *= 1.0 - eta * cfg.lambda;
    theta -= eta * (slope * sigma * x.row(i).transpose() + mu_step);
    project(theta, radius);
    assert(theta.norm() <= radius);
    if (cfg.observer) cfg.observer(t, theta);
  }
  return Model(std::move(theta), radius);
}

Model mosgd_noisy(const Sample& noisy, const LossSpec& loss, const NoiseSpec& noise,
                  const SolverConfig& cfg) {
  const DoubledSample s2x = double_sample(noisy);
  const MeanOperator mu_hat = noise_corrected_mean_op(noisy, noise);
  return mosgd_train(s2x, mu_hat, loss, cfg);
}

Model sgd_baseline(const Sample& s, const LossSpec& loss, const SolverConfig& cfg) {
  cfg.validate();
  const double radius = cfg.radius();
  const auto rows = static_cast<std::uint64_t>(s.size());
  const Matrix& x = s.observations();
  const Vector& y = s.labels();

  Rng rng(cfg.seed);
  Vector theta = Vector::Zero(s.dim());
  if (cfg.observer) cfg.observer(0, theta);
  for (std::int64_t t = 1; t <= cfg.T; ++t) {
    const auto i = static_cast<Eigen::Index>(rng.below(rows));
    const double eta = 1.0 / (1.0 + cfg.lambda * static_cast<double>(t));
    const double slope = loss.subgrad(y[i] * x.row(i).dot(theta));
    theta *= 1.0 - eta * cfg.lambda;
    theta -= eta * slope * y[i] * x.row(i).transpose();
    project(theta, radius);
    if (cfg.observer) cfg.observer(t, theta);
  }
  return Model(std::move(theta), radius);
}

Vector Regularizer::prox(const Vector& z, double eta) const {
  const double tau = eta * lambda;
  if (kind == Kind::l2) return z / (1.0 + tau);
  return z.unaryExpr([tau](double v) {
    if (v > tau) return v - tau;
    if (v < -tau) return v + tau;
    return 0.0;
  });
}

Model prox_train(const DoubledSample& s2x, const MeanOperator& mu,
                 const LossSpec& loss, const ProxConfig& cfg) {
  const double a = loss.require_odd_slope();
  if (!(cfg.eta > 0.0)) throw SampleError("prox_train needs eta > 0");
  if (cfg.T < 1) throw SampleError("prox_train needs T >= 1");
  if (cfg.regularizer.lambda < 0.0) throw SampleError("prox_train needs lambda >= 0");
  if (mu.dim() != s2x.dim()) {
    throw SampleError("prox_train: mean operator dimension mismatch");
  }
  const Vector mu_step = mu_coefficient(cfg.update_mode) * a * mu.vector;
  const Matrix& x = s2x.observations();
  const Vector& signs = s2x.signs();
  const double rows = static_cast<double>(s2x.size());

  Vector theta = Vector::Zero(s2x.dim());
  Vector weights(s2x.size());
  for (std::int64_t t = 0; t < cfg.T; ++t) {
    const Vector margins = (x * theta).cwiseProduct(signs);
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
      weights[i] = loss.subgrad(margins[i]) * signs[i];
    }
    const Vector g = x.transpose() * weights / rows;
    theta = cfg.regularizer.prox(theta - cfg.eta * (g + mu_step), cfg.eta);
  }
  return Model(std::move(theta));
}

Model exact_minimizer_square(const Matrix& observations, const Vector& mu,
                             double lambda) {
  if (!(lambda >= 0.0)) throw SampleError("exact_minimizer_square needs lambda >= 0");
  if (observations.cols() != mu.size()) {
    throw SampleError("exact_minimizer_square: dimension mismatch");
  }
  const auto d = observations.cols();
  const double m = static_cast<double>(observations.rows());
  const Matrix system =
      2.0 * (observations.transpose() * observations) / m +
      lambda * Matrix::Identity(d, d);
  Eigen::LDLT<Matrix> ldlt(system);
  const Vector diag = ldlt.vectorD();
  const double scale = std::max(1.0, system.diagonal().cwiseAbs().maxCoeff());
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      diag.minCoeff() <= 1e-14 * scale) {
    throw SampleError("exact_minimizer_square: singular system");
  }
  return Model(ldlt.solve(2.0 * mu));
}

Model exact_minimizer_square(const Sample& s, double lambda) {
  return exact_minimizer_square(s.observations(), mean_op(s).vector, lambda);
}

namespace {

double regularized_objective(const DoubledSample& s2x, const MeanOperator& mu,
                             const LossSpec& loss, double lambda,
                             const Vector& theta) {
  return factored_risk(s2x, mu, loss, Model(theta)) + 0.5 * lambda * theta.squaredNorm();
}

}  // namespace

MinimizeResult full_batch_minimize(const DoubledSample& s2x, const MeanOperator& mu,
                                   const LossSpec& loss, double lambda,
                                   const MinimizeOptions& options) {
  if (!(lambda >= 0.0)) throw SampleError("full_batch_minimize needs lambda >= 0");
  const auto d = s2x.dim();
  const Matrix& x = s2x.observations();
  const Vector& signs = s2x.signs();
  const double rows = static_cast<double>(s2x.size());

  Vector theta = Vector::Zero(d);
  double value = regularized_objective(s2x, mu, loss, lambda, theta);
  MinimizeResult result{Model(theta)};
  double step_hint = 1.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector grad = factored_gradient(s2x, mu, loss, theta) + lambda * theta;
    result.gradient_norm = grad.norm();
    result.iterations = it;
    if (result.gradient_norm <= options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    Vector direction;
    bool newton = false;
    if (loss.has_curvature()) {
      const Vector margins = (x * theta).cwiseProduct(signs);
      Vector curv(margins.size());
      for (Eigen::Index i = 0; i < margins.size(); ++i) curv[i] = loss.curvature(margins[i]);
      Matrix hessian = x.transpose() * curv.asDiagonal() * x / rows;
      hessian.diagonal().array() += lambda;
      Eigen::LDLT<Matrix> ldlt(hessian);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        direction = -ldlt.solve(grad);
        newton = direction.allFinite() && direction.dot(grad) < 0.0;
      }
    }
    if (!newton) direction = -grad;

    // Armijo backtracking.
    double step = newton ? 1.0 : step_hint;
    const double slope = grad.dot(direction);
    Vector candidate;
    double candidate_value = value;
    bool accepted = false;
    if (newton) {
      // Near the optimum the objective is flat to rounding; judge the full
      // Newton step by the gradient instead.
      candidate = theta + direction;
      candidate_value = regularized_objective(s2x, mu, loss, lambda, candidate);
      if (std::abs(candidate_value - value) <= 1e-13 * (1.0 + std::abs(value))) {
        const Vector next = factored_gradient(s2x, mu, loss, candidate) + lambda * candidate;
        accepted = next.norm() < 0.5 * result.gradient_norm;
      }
    }
    for (int k = 0; k < 60 && !accepted; ++k) {
      candidate = theta + step * direction;
      candidate_value = regularized_objective(s2x, mu, loss, lambda, candidate);
      if (candidate_value <= value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable
    if (!newton) step_hint = std::min(1e6, step * 2.0);
    theta = std::move(candidate);
    value = candidate_value;
  }
  if (!result.converged) {
    const Vector grad = factored_gradient(s2x, mu, loss, theta) + lambda * theta;
    result.gradient_norm = grad.norm();
    result.converged = result.gradient_norm <= options.gradient_tolerance;
  }
  result.model = Model(std::move(theta));
  return result;
}

}  // namespace lossfact
