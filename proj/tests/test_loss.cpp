#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "lossfact/loss.hpp"
#include "support.hpp"

using namespace lossfact;
using lossfact::fixtures::linspace;

namespace {

std::vector<LossSpec> linear_odd_members() {
  std::vector<LossSpec> out;
  for (auto& l : catalog()) {
    if (l.is_linear_odd()) out.push_back(l);
  }
  return out;
}

bool near_kink(const std::string& name, double x) {
  for (double k : {-1.0, 0.0, 1.0}) {
    if (std::abs(x - k) < 1e-3) return true;
  }
  return name == "zero_one";
}

}  // namespace

TEST(Catalog, OddSlopesFollowHalfDifferenceConvention) {
  EXPECT_DOUBLE_EQ(*logistic_loss().odd_slope(), -0.5);
  EXPECT_DOUBLE_EQ(*square_loss().odd_slope(), -2.0);
  EXPECT_DOUBLE_EQ(*unhinged_loss().odd_slope(), -1.0);
  EXPECT_DOUBLE_EQ(*matsushita_loss().odd_slope(), -1.0);
  EXPECT_DOUBLE_EQ(*perceptron_loss().odd_slope(), -0.5);
  EXPECT_DOUBLE_EQ(*double_hinge_loss().odd_slope(), -0.5);
  EXPECT_DOUBLE_EQ(*rho_loss(1.0).odd_slope(), -1.0);
  EXPECT_DOUBLE_EQ(*rho_loss(2.5).odd_slope(), -2.5);
  EXPECT_FALSE(hinge_loss().odd_slope());
  EXPECT_FALSE(exponential_loss().odd_slope());
  EXPECT_FALSE(zero_one_loss().odd_slope());
}

TEST(Catalog, HasTenMembersWithSevenLinearOdd) {
  EXPECT_EQ(catalog().size(), 10u);
  EXPECT_EQ(linear_odd_members().size(), 7u);
}

TEST(Catalog, StoredSlopeMatchesDefinitionOnGrid) {
  for (const auto& l : linear_odd_members()) {
    for (double x : linspace(-20.0, 20.0, 401)) {
      const double direct = (l(x) - l(-x)) / 2.0;
      EXPECT_LE(std::abs(direct - *l.odd_slope() * x), 1e-9 * (1.0 + std::abs(x))) << l.name();
    }
  }
}

TEST(Catalog, LipschitzConstantsHoldOnGridPairs) {
  const auto grid = linspace(-10.0, 10.0, 81);
  for (const auto& l : catalog()) {
    if (!l.lipschitz()) continue;
    for (double u : grid) {
      for (double v : grid) {
        EXPECT_LE(std::abs(l(u) - l(v)), *l.lipschitz() * std::abs(u - v) + 1e-9) << l.name();
      }
    }
  }
}

TEST(Catalog, SubgradientsMatchCentralDifferences) {
  const double h = 1e-6;
  for (const auto& l : catalog()) {
    for (double x : linspace(-5.0, 5.0, 97)) {
      if (near_kink(l.name(), x)) continue;
      const double fd = (l(x + h) - l(x - h)) / (2.0 * h);
      EXPECT_NEAR(l.subgrad(x), fd, 1e-5) << l.name() << " at " << x;
    }
  }
}

TEST(Catalog, KinksUseRightDerivative) {
  EXPECT_DOUBLE_EQ(hinge_loss().subgrad(1.0), 0.0);
  EXPECT_DOUBLE_EQ(perceptron_loss().subgrad(0.0), 0.0);
  EXPECT_DOUBLE_EQ(double_hinge_loss().subgrad(-1.0), -0.5);
  EXPECT_DOUBLE_EQ(double_hinge_loss().subgrad(1.0), 0.0);
}

TEST(Catalog, NamesResolve) {
  for (const auto& l : catalog()) EXPECT_EQ(loss_by_name(l.name()).name(), l.name());
  EXPECT_EQ(loss_by_name("rho:0.5").name(), "rho:0.5");
  EXPECT_DOUBLE_EQ(*loss_by_name("rho:0.5").odd_slope(), -0.5);
  EXPECT_EQ(loss_by_name("huber").name(), "huber");
  EXPECT_THROW(loss_by_name("savage"), LossError);
  EXPECT_THROW(loss_by_name("rho:-1"), LossError);
}

TEST(OddEven, Examples) {
  EXPECT_NEAR(odd_part(logistic_loss(), 1.0), -0.5, 1e-15);
  EXPECT_NEAR(odd_part(zero_one_loss(), 2.0), -0.5, 0.0);
  EXPECT_DOUBLE_EQ(even_part(square_loss(), 2.0), 5.0);
  EXPECT_NEAR(even_part(matsushita_loss(), 3.0), std::sqrt(10.0), 1e-14);
  EXPECT_NEAR(even_part(logistic_loss(), 0.0), std::log(2.0), 1e-15);
  for (const auto& l : catalog()) EXPECT_EQ(odd_part(l, 0.0), 0.0) << l.name();
}

TEST(OddEven, ZeroOneAtOrigin) {
  EXPECT_EQ(even_part(zero_one_loss(), 0.0), 1.0);
  EXPECT_EQ(odd_part(zero_one_loss(), 0.0), 0.0);
  EXPECT_EQ(even_part(zero_one_loss(), 0.3), 0.5);
  EXPECT_EQ(odd_part(zero_one_loss(), -0.3), 0.5);
}

TEST(OddEven, RejectsNonFinite) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(odd_part(logistic_loss(), inf), LossError);
  EXPECT_THROW(even_part(logistic_loss(), std::nan("")), LossError);
}

TEST(OddEven, DecompositionIdentity) {
  for (const auto& l : catalog()) {
    for (double x : linspace(-20.0, 20.0, 161)) {
      const double sum = even_part(l, x) + odd_part(l, x);
      // The halves cancel at the scale of max(l(x), l(-x)), which reaches e^20
      // for the exponential loss.
      const double scale = std::max(std::abs(l(x)), std::abs(l(-x)));
      const double tol = l.name() == "exponential" ? 1e-12 * (1.0 + scale) : 1e-12;
      EXPECT_NEAR(sum, l(x), tol) << l.name() << " at " << x;
    }
  }
}

TEST(OddEven, ExactParity) {
  for (const auto& l : catalog()) {
    for (double x : linspace(-20.0, 20.0, 161)) {
      EXPECT_EQ(even_part(l, x), even_part(l, -x)) << l.name();
      EXPECT_EQ(odd_part(l, x), -odd_part(l, -x)) << l.name();
    }
  }
}

TEST(LolCheck, Examples) {
  const std::vector<double> grid = {-5, -2, -1, -0.5, 0.5, 1, 2, 5};
  EXPECT_NEAR(*lol_slope_check(logistic_loss(), grid), -0.5, 1e-12);
  EXPECT_FALSE(lol_slope_check(hinge_loss(), grid));
  EXPECT_NEAR(*lol_slope_check(rho_loss(1.0), grid), -1.0, 1e-12);
}

TEST(LolCheck, DefaultGridClassifiesCatalog) {
  const auto grid = default_lol_grid();
  for (const auto& l : catalog()) {
    const auto slope = lol_slope_check(l, grid);
    EXPECT_EQ(slope.has_value(), l.is_linear_odd()) << l.name();
    if (slope) EXPECT_NEAR(*slope, *l.odd_slope(), 1e-9) << l.name();
  }
}

TEST(LolCheck, RejectsDegenerateGrids) {
  const std::vector<double> zeros(10, 0.0);
  EXPECT_THROW(lol_slope_check(logistic_loss(), zeros), LossError);
  const std::vector<double> one_sided = {0.5, 1, 2, 3, 4, 5, 6, 7, 8};
  EXPECT_THROW(lol_slope_check(logistic_loss(), one_sided), LossError);
  const std::vector<double> short_grid = {-1, 1, -2, 2};
  EXPECT_THROW(lol_slope_check(logistic_loss(), short_grid), LossError);
}

TEST(Craft, RhoLossFromAbsoluteValue) {
  const double rho = 1.5;
  const LossSpec l = craft_lol([rho](double x) { return rho * std::abs(x) + 1.0; }, -rho);
  const LossSpec ref = rho_loss(rho);
  for (double x : linspace(-10.0, 10.0, 201)) {
    EXPECT_NEAR(l(x), ref(x), 1e-12);
    EXPECT_GE(l(x), zero_one_loss()(x));
  }
  EXPECT_DOUBLE_EQ(l(0.0), 1.0);
  EXPECT_DOUBLE_EQ(*l.odd_slope(), -rho);
}

TEST(Craft, SquareAndUnhinged) {
  const LossSpec sq = craft_lol([](double x) { return 1.0 + x * x; }, -2.0);
  const LossSpec un = craft_lol([](double) { return 1.0; }, -1.0);
  for (double x : linspace(-10.0, 10.0, 201)) {
    EXPECT_NEAR(sq(x), (1.0 - x) * (1.0 - x), 1e-12);
    EXPECT_NEAR(un(x), 1.0 - x, 1e-12);
  }
}

TEST(Craft, ReproducesEveryLinearOddLoss) {
  for (const auto& l : linear_odd_members()) {
    const LossSpec copy = craft_lol([l](double x) { return even_part(l, x); }, *l.odd_slope());
    for (double x : linspace(-20.0, 20.0, 161)) {
      EXPECT_NEAR(copy(x), l(x), 1e-12 * (1.0 + std::abs(l(x)))) << l.name();
    }
  }
}

TEST(Craft, RejectsAsymmetricFunction) {
  EXPECT_THROW(craft_lol([](double x) { return x * x + 0.01 * x; }, -1.0), LossError);
}

TEST(Craft, FiniteDifferenceSubgradient) {
  const LossSpec l = craft_lol([](double x) { return std::cosh(x); }, 0.5);
  EXPECT_NEAR(l.subgrad(0.7), std::sinh(0.7) + 0.5, 1e-5);
}

TEST(AffineBound, HingeClosedForm) {
  const auto b = affine_odd_bound(hinge_loss(), linspace(-50.0, 50.0, 1001));
  EXPECT_DOUBLE_EQ(b.slope, -0.5);
  EXPECT_DOUBLE_EQ(b.intercept, 0.5);
  EXPECT_TRUE(b.exact);
}

TEST(AffineBound, ExponentialHasNone) {
  try {
    affine_odd_bound(exponential_loss(), linspace(-50.0, 50.0, 101));
    FAIL() << "expected an error";
  } catch (const LossError& e) {
    EXPECT_NE(std::string(e.what()).find("no affine odd bound"), std::string::npos);
  }
}

TEST(AffineBound, DominatesOddPartOnDenseGrid) {
  const auto fit_grid = linspace(-50.0, 50.0, 1001);
  const auto dense = linspace(-50.0, 50.0, 20001);
  std::vector<LossSpec> losses = catalog();
  losses.push_back(huber_loss());
  for (const auto& l : losses) {
    if (l.name() == "exponential") continue;
    const auto b = affine_odd_bound(l, fit_grid);
    if (l.name() != "hinge") EXPECT_FALSE(b.exact) << l.name();
    for (double x : dense) EXPECT_LE(odd_part(l, x), b(x) + 1e-8) << l.name() << " at " << x;
  }
}

TEST(AffineBound, HuberSlopeFromAsymptotes) {
  const auto b = affine_odd_bound(huber_loss(), linspace(-50.0, 50.0, 1001));
  // Asymptotic slopes 0 and -1 average to -1/2.
  EXPECT_NEAR(b.slope, -0.5, 1e-9);
  EXPECT_GT(b.intercept, 0.0);
}
