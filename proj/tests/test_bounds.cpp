#include <gtest/gtest.h>

#include <cmath>

#include "lossfact/bounds.hpp"
#include "lossfact/loss.hpp"
#include "lossfact/mean_operator.hpp"
#include "support.hpp"

using namespace lossfact;

namespace {

// E|sigma_1 + ... + sigma_n| for even n.
double mean_abs_walk(int n) {
  double c = 1.0;  // C(n, n/2) / 2^n, built incrementally to stay in range
  for (int k = 1; k <= n / 2; ++k) c *= static_cast<double>(n / 2 + k) / (4.0 * k);
  return n * c;
}

}  // namespace

TEST(Rademacher, VExamplesAndLimit) {
  EXPECT_DOUBLE_EQ(rademacher_v(2), 0.5);
  EXPECT_DOUBLE_EQ(rademacher_bound(3.0, 2.0, 2), 3.0 * 2.0 / 4.0);
  for (std::int64_t m = 2; m <= 100000; m += 2) {
    EXPECT_LT(rademacher_v(m), 0.5 + 0.5 * std::sqrt(0.5));
  }
  EXPECT_NEAR(rademacher_v(100000000), 0.8536, 1e-4);
  EXPECT_THROW(rademacher_v(3), BoundError);
  EXPECT_THROW(rademacher_v(0), BoundError);
}

TEST(Rademacher, MonteCarloZeroObservations) {
  const DoubledSample d(Matrix::Zero(4, 3));
  const auto est = empirical_rademacher_mc(d, 2.0, 100, 1);
  EXPECT_EQ(est.estimate, 0.0);
  EXPECT_EQ(est.std_error, 0.0);
}

TEST(Rademacher, MonteCarloRepeatedObservationClosedForm) {
  const int m = 5;
  Matrix x(m, 2);
  for (int i = 0; i < m; ++i) x.row(i) << 3.0, 4.0;
  const DoubledSample d(x);
  const double B = 2.0;
  const double exact = B * 5.0 * mean_abs_walk(2 * m) / (2.0 * m);
  const auto est = empirical_rademacher_mc(d, B, 200000, 7);
  EXPECT_NEAR(est.estimate, exact, 4.0 * est.std_error);
}

TEST(Rademacher, MonteCarloBelowBoundOnGaussianData) {
  Rng rng(60);
  const Sample s = fixtures::random_sample(rng, 64, 8);
  const DoubledSample d = double_sample(s);
  const auto est = empirical_rademacher_mc(d, 1.5, 20000, 3);
  EXPECT_LE(est.estimate, rademacher_bound(1.5, s.feature_bound(), 64) + 3.0 * est.std_error);
}

TEST(Deviation, FormsAndMonotonicity) {
  EXPECT_EQ(mean_op_deviation_bound(0.0, 3, 10, 0.1), 0.0);
  const double proof = mean_op_deviation_bound(2.0, 5, 100, 0.05);
  EXPECT_NEAR(proof, 2.0 * std::sqrt(2.0 * 5.0 / 100.0 * std::log(5.0 / 0.05)), 1e-15);
  EXPECT_NEAR(mean_op_deviation_bound(2.0, 5, 100, 0.05, DeviationForm::statement),
              proof / std::sqrt(2.0), 1e-14);
  EXPECT_GT(mean_op_deviation_bound(1.0, 5, 100, 0.01), mean_op_deviation_bound(1.0, 5, 100, 0.1));
  EXPECT_GT(mean_op_deviation_bound(1.0, 5, 100, 0.1), mean_op_deviation_bound(1.0, 5, 400, 0.1));
  EXPECT_GT(mean_op_deviation_bound(1.0, 8, 100, 0.1), mean_op_deviation_bound(1.0, 5, 100, 0.1));
  EXPECT_THROW(mean_op_deviation_bound(1.0, 5, 100, 1.0), BoundError);
}

TEST(Deviation, CoverageOnBoundedDistribution) {
  // y = +-1 equiprobable, x = y v + u with u uniform on a cube and
  // independent of y, so mu_D = v exactly.
  const int m = 100;
  const int d = 5;
  const double h = 0.5;
  const Vector v = Eigen::VectorXd::LinSpaced(d, 0.2, 1.0);
  const double X = v.norm() + h * std::sqrt(static_cast<double>(d));
  Rng rng(61);
  const int resamples = 10000;
  for (double delta : {0.05, 0.1, 0.2}) {
    const double bound = mean_op_deviation_bound(X, d, m, delta);
    int covered = 0;
    for (int r = 0; r < resamples; ++r) {
      Vector mu = Vector::Zero(d);
      for (int i = 0; i < m; ++i) {
        const double y = rng.sign();
        for (int k = 0; k < d; ++k) mu[k] += y * (y * v[k] + h * (2.0 * rng.uniform() - 1.0));
      }
      mu /= m;
      covered += (mu - v).norm() <= bound;
    }
    EXPECT_GE(static_cast<double>(covered) / resamples, 1.0 - delta);
  }
}

TEST(Generalization, HandComputedLogistic) {
  BoundInputs b;
  b.X = 1.0;
  b.B = 1.0;
  b.L = 1.0;
  b.a = -0.5;
  b.m = 10000;
  b.d = 10;
  b.delta = 0.05;
  b.c_XB = c_of_XB(logistic_loss(), 1.0, 1.0);
  const double k = (std::sqrt(2.0) + 1.0) / 4.0;
  const double expected =
      k / 100.0 + (b.c_XB / 2.0 + std::sqrt(10.0 * std::log(10.0))) * std::sqrt(std::log(40.0) / 1e4);
  EXPECT_NEAR(generalization_bound(b), expected, 1e-14);
  EXPECT_NEAR(generalization_bound(b, true) - generalization_bound(b), k / 100.0, 1e-14);
}

TEST(Generalization, ComplexityOnlyScalesAsInverseRootM) {
  BoundInputs b;
  b.X = 2.0;
  b.B = 3.0;
  b.a = 0.0;
  b.c_XB = 0.0;
  b.m = 100;
  const double small = generalization_bound(b);
  b.m = 400;
  EXPECT_NEAR(small / generalization_bound(b), 2.0, 1e-12);
  EXPECT_NEAR(generalization_bound(b), complexity_constant() * 6.0 / 20.0, 1e-15);
}

TEST(Generalization, SingleDimensionDropsLinearTerm) {
  BoundInputs b;
  b.a = -1.0;
  b.d = 1;
  const double with_a = generalization_bound(b);
  b.a = 0.0;
  EXPECT_EQ(with_a, generalization_bound(b));
}

TEST(Generalization, FirstFormWithDeviation) {
  BoundInputs b;
  b.X = 1.0;
  b.B = 2.0;
  b.L = 1.0;
  b.a = -0.5;
  b.m = 400;
  b.c_XB = 1.0;
  b.delta = 0.1;
  const double expected = complexity_constant() * 2.0 / 20.0 +
                          0.5 * std::sqrt(std::log(10.0) / 400.0) + 2.0 * 0.5 * 2.0 * 0.3;
  EXPECT_NEAR(generalization_bound(b, 0.3), expected, 1e-14);
  EXPECT_THROW(generalization_bound(b, -0.1), BoundError);
}

TEST(Generalization, MonotoneInInputs) {
  Rng rng(62);
  for (int r = 0; r < 200; ++r) {
    BoundInputs b;
    b.X = 0.1 + rng.uniform() * 5;
    b.B = 0.1 + rng.uniform() * 5;
    b.L = 0.1 + rng.uniform() * 3;
    b.a = -rng.uniform() * 2;
    b.m = 10 + static_cast<std::int64_t>(rng.below(10000));
    b.d = 2 + static_cast<std::int64_t>(rng.below(50));
    b.delta = 0.01 + 0.9 * rng.uniform();
    b.c_XB = rng.uniform() * 4;
    const double base = generalization_bound(b);
    BoundInputs more = b;
    more.m *= 2;
    EXPECT_LT(generalization_bound(more), base);
    more = b;
    more.X *= 1.5;
    EXPECT_GT(generalization_bound(more), base);
    more = b;
    more.delta /= 2;
    EXPECT_GT(generalization_bound(more), base);
  }
}

TEST(Generalization, InputValidation) {
  BoundInputs b;
  b.m = 0;
  EXPECT_THROW(generalization_bound(b), BoundError);
  b.m = 10;
  b.delta = 0.0;
  EXPECT_THROW(generalization_bound(b), BoundError);
  b.delta = 0.1;
  b.X = -1.0;
  EXPECT_THROW(generalization_bound(b), BoundError);
}

TEST(NoisyBound, ReducesToCleanAndGrowsWithNoise) {
  BoundInputs b;
  b.a = -0.5;
  b.d = 4;
  b.m = 1000;
  b.c_XB = 1.0;
  EXPECT_DOUBLE_EQ(noisy_generalization_bound(b, NoiseSpec{}), generalization_bound(b));
  const double low = noisy_generalization_bound(b, NoiseSpec(0.1, 0.1));
  const double high = noisy_generalization_bound(b, NoiseSpec(0.3, 0.3));
  EXPECT_GT(low, generalization_bound(b));
  EXPECT_GT(high, low);
  EXPECT_GT(noisy_generalization_bound(b, NoiseSpec(0.4999, 0.4999)), 10.0 * generalization_bound(b));
  b.a = 0.0;
  EXPECT_DOUBLE_EQ(noisy_generalization_bound(b, NoiseSpec(0.3, 0.3)), generalization_bound(b));
}

TEST(Aln, EpsilonAndDistance) {
  EXPECT_DOUBLE_EQ(aln_epsilon(-0.5, 2.0, NoiseSpec(0.1, 0.3), 1.5), 4.0 * 0.5 * 2.0 * 0.3 * 1.5);
  EXPECT_EQ(aln_epsilon(-2.0, 1.0, NoiseSpec{}, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(minimizer_distance_bound(0.5, 4.0), 0.5);
  EXPECT_EQ(minimizer_distance_bound(0.0, 1.0), 0.0);
  EXPECT_THROW(minimizer_distance_bound(1.0, 0.0), BoundError);
  EXPECT_THROW(aln_epsilon(1.0, -1.0, NoiseSpec{}, 1.0), BoundError);
}

TEST(CofXB, Examples) {
  EXPECT_NEAR(c_of_XB(logistic_loss(), 1.0, 1.0), std::log1p(std::exp(1.0)), 1e-15);
  EXPECT_DOUBLE_EQ(c_of_XB(square_loss(), 1.0, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(c_of_XB(square_loss(), 0.0, 5.0), 1.0);
  EXPECT_DOUBLE_EQ(c_of_XB(hinge_loss(), 2.0, 1.5), 4.0);
}
