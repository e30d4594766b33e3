#include <gtest/gtest.h>

#include <cmath>

#include "lossfact/loss.hpp"
#include "lossfact/mean_operator.hpp"
#include "lossfact/risk.hpp"
#include "support.hpp"

using namespace lossfact;
using lossfact::fixtures::brute_risk;
using lossfact::fixtures::random_sample;
using lossfact::fixtures::random_theta;

namespace {

std::vector<LossSpec> lols() {
  std::vector<LossSpec> out;
  for (const auto& l : catalog()) {
    if (l.is_linear_odd()) out.push_back(l);
  }
  return out;
}

}  // namespace

TEST(EmpiricalRisk, MatchesLoopOracle) {
  Rng rng(20);
  for (const auto& l : catalog()) {
    const Sample s = random_sample(rng, 37, 4);
    const Vector theta = random_theta(rng, 4, 3.0);
    const double ref = brute_risk(s.observations(), s.labels(), theta, [&l](double v) { return l(v); });
    EXPECT_NEAR(empirical_risk(s, l, Model(theta)), ref, 1e-12 * (1.0 + std::abs(ref))) << l.name();
  }
}

TEST(EmpiricalRisk, ZeroModelIsLossAtOrigin) {
  Rng rng(21);
  const Sample s = random_sample(rng, 10, 3);
  EXPECT_NEAR(empirical_risk(s, logistic_loss(), Model(Vector::Zero(3))), std::log(2.0), 1e-15);
  const DoubledSample d = double_sample(s);
  for (const auto& l : lols()) {
    EXPECT_NEAR(factored_risk(d, mean_op(s), l, Model(Vector::Zero(3))), l(0.0), 1e-15) << l.name();
  }
}

TEST(FactoredRisk, SquareLossSmoke) {
  Matrix x(1, 2);
  x << 1, 0;
  const Sample s(x, Vector::Ones(1));
  const Model model(Eigen::Vector2d(1.0, 0.0));
  EXPECT_NEAR(factored_risk(double_sample(s), mean_op(s), square_loss(), model), 0.0, 1e-15);
  EXPECT_NEAR(empirical_risk(s, square_loss(), model), 0.0, 1e-15);
}

TEST(FactoredRisk, IdentityAcrossLinearOddLosses) {
  Rng rng(22);
  for (const auto& l : lols()) {
    for (int r = 0; r < 50; ++r) {
      const auto m = 1 + static_cast<Eigen::Index>(rng.below(64));
      const auto d = 1 + static_cast<Eigen::Index>(rng.below(16));
      const Sample s = random_sample(rng, m, d);
      const Model model(random_theta(rng, d, 10.0));
      const double direct = brute_risk(s.observations(), s.labels(), model.theta(),
                                       [&l](double v) { return l(v); });
      const double fact = factored_risk(double_sample(s), mean_op(s), l, model);
      EXPECT_LE(std::abs(direct - fact), 1e-10 * (1.0 + std::abs(direct))) << l.name();
    }
  }
}

TEST(FactoredRisk, RejectsNonLinearOdd) {
  Rng rng(23);
  const Sample s = random_sample(rng, 5, 2);
  EXPECT_THROW(factored_risk(double_sample(s), mean_op(s), hinge_loss(), Model(Vector::Zero(2))),
               LossError);
}

TEST(FactoredRisk, DimensionMismatch) {
  Rng rng(24);
  const Sample s = random_sample(rng, 5, 2);
  EXPECT_THROW(factored_risk(double_sample(s), mean_op(s), logistic_loss(), Model(Vector::Zero(3))),
               SampleError);
}

TEST(EstimatedRisk, ZeroNoiseAndZeroMeanOperator) {
  Rng rng(25);
  const Sample s = random_sample(rng, 30, 3);
  const DoubledSample d = double_sample(s);
  const Model model(random_theta(rng, 3, 2.0));
  for (const auto& l : lols()) {
    EXPECT_NEAR(estimated_risk(d, noise_corrected_mean_op(s, NoiseSpec{}), l, model),
                factored_risk(d, mean_op(s), l, model), 1e-14);
    const MeanOperator zero{Vector::Zero(3), ExactProvenance{}};
    EXPECT_NEAR(estimated_risk(d, zero, l, model), doubled_risk(d, l, model), 1e-15);
  }
}

TEST(EstimatedRisk, LinearInMeanOperator) {
  Rng rng(26);
  const Sample s = random_sample(rng, 20, 3);
  const DoubledSample d = double_sample(s);
  const Model model(random_theta(rng, 3, 2.0));
  const Vector u = random_theta(rng, 3, 1.0);
  const Vector v = random_theta(rng, 3, 1.0);
  for (const auto& l : lols()) {
    auto at = [&](const Vector& w) {
      return estimated_risk(d, MeanOperator{w, ExactProvenance{}}, l, model);
    };
    const double base = doubled_risk(d, l, model);
    EXPECT_NEAR(at(u + 2.0 * v) - base, (at(u) - base) + 2.0 * (at(v) - base), 1e-12);
    EXPECT_NEAR(at(u) - base, *l.odd_slope() * model.theta().dot(u), 1e-12);
  }
}

TEST(GeneralFactorization, AnyMarginLoss) {
  Rng rng(27);
  for (const auto& l : catalog()) {
    for (int r = 0; r < 20; ++r) {
      const Sample s = random_sample(rng, 1 + static_cast<Eigen::Index>(rng.below(64)), 5);
      const Model model(random_theta(rng, 5, 10.0));
      const double direct = empirical_risk(s, l, model);
      EXPECT_LE(std::abs(general_factored_risk(s, l, model).total() - direct),
                1e-10 * (1.0 + std::abs(direct)))
          << l.name();
    }
  }
}

TEST(GeneralFactorization, ZeroOneOddTerm) {
  Rng rng(28);
  const Sample s = random_sample(rng, 40, 3);
  const Model model(random_theta(rng, 3, 2.0));
  double ref = 0.0;
  const Vector scores = s.observations() * model.theta();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double margin = s.labels()[i] * scores[i];
    ref += margin > 0 ? -0.5 : (margin < 0 ? 0.5 : 0.0);
  }
  EXPECT_NEAR(general_factored_risk(s, zero_one_loss(), model).odd_term, ref / 40.0, 1e-15);
  EXPECT_EQ(general_factored_risk(s, hinge_loss(), Model(Vector::Zero(3))).odd_term, 0.0);
}

TEST(Regression, IdentityAndSpecialCases) {
  Rng rng(29);
  for (int r = 0; r < 20; ++r) {
    Matrix x = Matrix::Random(30, 4);
    Vector t(30);
    for (auto& v : t) v = 3.0 * rng.normal();
    const Model model(random_theta(rng, 4, 5.0));
    const auto id = regression_factored_objective(x, t, model);
    EXPECT_NEAR(id.lhs, id.rhs, 1e-10 * (1.0 + std::abs(id.lhs)));
  }
  Matrix x = Matrix::Ones(4, 2);
  Vector t(4);
  t << 1, -1, 2, 0;
  const auto zero = regression_factored_objective(x, t, Model(Vector::Zero(2)));
  EXPECT_DOUBLE_EQ(zero.lhs, t.squaredNorm() / 4.0);
  EXPECT_DOUBLE_EQ(zero.rhs, t.squaredNorm() / 4.0);
}

TEST(Regression, BinaryTargetsMatchSquareLossRisk) {
  Rng rng(30);
  const Sample s = random_sample(rng, 25, 3);
  const Model model(random_theta(rng, 3, 2.0));
  const auto id = regression_factored_objective(s.observations(), s.labels(), model);
  EXPECT_NEAR(id.lhs, empirical_risk(s, square_loss(), model), 1e-12);
}

TEST(Convexity, ChordInequalityOnFactoredRisk) {
  Rng rng(31);
  const Sample s = random_sample(rng, 30, 3);
  const DoubledSample d = double_sample(s);
  const MeanOperator mu = mean_op(s);
  for (const auto& l : lols()) {
    if (!l.convex()) continue;
    for (int r = 0; r < 30; ++r) {
      const Vector a = random_theta(rng, 3, 4.0);
      const Vector b = random_theta(rng, 3, 4.0);
      const double t = rng.uniform();
      const double mid = factored_risk(d, mu, l, Model(t * a + (1 - t) * b));
      const double chord = t * factored_risk(d, mu, l, Model(a)) +
                           (1 - t) * factored_risk(d, mu, l, Model(b));
      EXPECT_LE(mid, chord + 1e-12) << l.name();
    }
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  Rng rng(32);
  const Sample s = random_sample(rng, 30, 3);
  const DoubledSample d = double_sample(s);
  const MeanOperator mu = mean_op(s);
  for (const auto& l : {logistic_loss(), square_loss(), matsushita_loss()}) {
    const Vector theta = random_theta(rng, 3, 2.0);
    const Vector g = factored_gradient(d, mu, l, theta);
    for (Eigen::Index k = 0; k < 3; ++k) {
      Vector e = Vector::Zero(3);
      e[k] = 1e-6;
      const double fd = (factored_risk(d, mu, l, Model(theta + e)) -
                         factored_risk(d, mu, l, Model(theta - e))) / 2e-6;
      EXPECT_NEAR(g[k], fd, 1e-6) << l.name();
    }
  }
}

TEST(ExpectedNoisyRisk, EnumeratesFlipPatterns) {
  Rng rng(33);
  const Sample clean = random_sample(rng, 5, 2);
  const NoiseSpec noise(0.3, 0.1);
  const Model model(random_theta(rng, 2, 2.0));
  double expected = 0.0;
  for (int mask = 0; mask < 32; ++mask) {
    Vector y = clean.labels();
    double prob = 1.0;
    for (int i = 0; i < 5; ++i) {
      const double p = noise.rate_for(clean.labels()[i]);
      if (mask >> i & 1) {
        y[i] = -y[i];
        prob *= p;
      } else {
        prob *= 1.0 - p;
      }
    }
    expected += prob * empirical_risk(Sample(clean.observations(), y), logistic_loss(), model);
  }
  EXPECT_NEAR(expected_noisy_risk(clean, noise, logistic_loss(), model), expected, 1e-14);
}

TEST(ZeroOneError, CountsNonPositiveMargins) {
  Matrix x(4, 1);
  x << 1, -1, 0, 2;
  Vector y(4);
  y << 1, 1, 1, -1;
  EXPECT_DOUBLE_EQ(zero_one_error(Sample(x, y), Model(Vector::Ones(1))), 0.75);
}

TEST(ModelTest, NormCap) {
  EXPECT_NO_THROW(Model(Vector::Ones(2), 2.0));
  EXPECT_THROW(Model(Vector::Ones(2), 1.0), SampleError);
  EXPECT_THROW(Model(Vector::Constant(2, std::nan(""))), SampleError);
}
