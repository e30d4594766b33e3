#include "lossfact/loss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <utility>

namespace lossfact {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw LossError(std::string(what) + ": argument must be finite");
  }
}

// log(1 + e^{-x}) without overflow; l(x) - l(-x) is exactly -x in this form.
double softplus_neg(double x) {
  return std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

}  // namespace

LossSpec::LossSpec(std::string name, ScalarMap eval, ScalarMap subgrad,
                   Traits traits, ScalarMap curvature)
    : name_(std::move(name)),
      eval_(std::move(eval)),
      subgrad_(std::move(subgrad)),
      curvature_(std::move(curvature)),
      traits_(traits) {
  if (!eval_ || !subgrad_) {
    throw LossError("loss '" + name_ + "' needs both eval and subgrad");
  }
  if (traits_.lipschitz && *traits_.lipschitz < 0.0) {
    throw LossError("loss '" + name_ + "': negative Lipschitz constant");
  }
  if (traits_.strong_convexity && *traits_.strong_convexity <= 0.0) {
    throw LossError("loss '" + name_ + "': strong convexity must be > 0");
  }
}

double LossSpec::curvature(double x) const {
  if (!curvature_) {
    throw LossError("loss '" + name_ + "' has no second derivative");
  }
  return curvature_(x);
}

double LossSpec::require_odd_slope() const {
  if (!traits_.odd_slope) {
    throw LossError("loss '" + name_ + "' is not linear-odd");
  }
  return *traits_.odd_slope;
}

LossSpec logistic_loss() {
  return LossSpec(
      "logistic", softplus_neg,
      [](double x) {
        // -1 / (1 + e^x), evaluated on the stable side.
        if (x >= 0.0) {
          const double e = std::exp(-x);
          return -e / (1.0 + e);
        }
        return -1.0 / (1.0 + std::exp(x));
      },
      {.odd_slope = -0.5, .lipschitz = 1.0, .convex = true},
      [](double x) {
        const double e = std::exp(-std::abs(x));
        return e / ((1.0 + e) * (1.0 + e));
      });
}

LossSpec square_loss() {
  return LossSpec(
      "square", [](double x) { return (1.0 - x) * (1.0 - x); },
      [](double x) { return -2.0 * (1.0 - x); },
      {.odd_slope = -2.0, .strong_convexity = 2.0, .convex = true},
      [](double) { return 2.0; });
}

LossSpec matsushita_loss() {
  return LossSpec(
      "matsushita", [](double x) { return std::hypot(1.0, x) - x; },
      [](double x) { return x / std::hypot(1.0, x) - 1.0; },
      {.odd_slope = -1.0, .lipschitz = 2.0, .convex = true},
      [](double x) {
        const double s = std::hypot(1.0, x);
        return 1.0 / (s * s * s);
      });
}

LossSpec unhinged_loss() {
  return LossSpec(
      "unhinged", [](double x) { return 1.0 - x; }, [](double) { return -1.0; },
      {.odd_slope = -1.0, .lipschitz = 1.0, .convex = true},
      [](double) { return 0.0; });
}

LossSpec perceptron_loss() {
  return LossSpec(
      "perceptron", [](double x) { return std::max(0.0, -x); },
      [](double x) { return x < 0.0 ? -1.0 : 0.0; },
      {.odd_slope = -0.5, .lipschitz = 1.0, .convex = true});
}

LossSpec double_hinge_loss() {
  return LossSpec(
      "double_hinge",
      [](double x) { return std::max(-x, 0.5 * std::max(0.0, 1.0 - x)); },
      [](double x) {
        if (x < -1.0) return -1.0;
        if (x < 1.0) return -0.5;
        return 0.0;
      },
      {.odd_slope = -0.5, .lipschitz = 1.0, .convex = true});
}

LossSpec rho_loss(double rho) {
  if (!std::isfinite(rho) || rho < 0.0) {
    throw LossError("rho-loss needs a finite rho >= 0");
  }
  std::string name = "rho:";
  {
    // Shortest round-trippable spelling, e.g. "rho:1", "rho:0.25".
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", rho);
    for (int prec = 1; prec <= 17; ++prec) {
      char probe[32];
      std::snprintf(probe, sizeof probe, "%.*g", prec, rho);
      if (std::strtod(probe, nullptr) == rho) {
        std::snprintf(buf, sizeof buf, "%s", probe);
        break;
      }
    }
    name += buf;
  }
  return LossSpec(
      std::move(name),
      [rho](double x) { return rho * std::abs(x) - rho * x + 1.0; },
      [rho](double x) { return x < 0.0 ? -2.0 * rho : 0.0; },
      {.odd_slope = -rho, .lipschitz = 2.0 * rho, .convex = true});
}

LossSpec zero_one_loss() {
  // 1{x <= 0}: even part 1 at the origin and 1/2 elsewhere, odd part
  // -sgn(x)/2 with sgn(0) = 0.
  return LossSpec(
      "zero_one", [](double x) { return x <= 0.0 ? 1.0 : 0.0; },
      [](double) { return 0.0; }, {.convex = false});
}

LossSpec hinge_loss() {
  return LossSpec(
      "hinge", [](double x) { return std::max(0.0, 1.0 - x); },
      [](double x) { return x < 1.0 ? -1.0 : 0.0; },
      {.lipschitz = 1.0, .convex = true});
}

LossSpec exponential_loss() {
  return LossSpec(
      "exponential", [](double x) { return std::exp(-x); },
      [](double x) { return -std::exp(-x); }, {.convex = true},
      [](double x) { return std::exp(-x); });
}

LossSpec huber_loss() {
  return LossSpec(
      "huber",
      [](double x) {
        if (x >= 1.0) return 0.0;
        if (x >= 0.0) return 0.5 * (1.0 - x) * (1.0 - x);
        return 0.5 - x;
      },
      [](double x) {
        if (x >= 1.0) return 0.0;
        if (x >= 0.0) return x - 1.0;
        return -1.0;
      },
      {.lipschitz = 1.0, .convex = true});
}

std::vector<LossSpec> catalog() {
  return {logistic_loss(),   square_loss(),  matsushita_loss(),
          unhinged_loss(),   perceptron_loss(), double_hinge_loss(),
          rho_loss(1.0),     zero_one_loss(), hinge_loss(),
          exponential_loss()};
}

LossSpec loss_by_name(const std::string& name) {
  if (name == "logistic") return logistic_loss();
  if (name == "square") return square_loss();
  if (name == "matsushita") return matsushita_loss();
  if (name == "unhinged") return unhinged_loss();
  if (name == "perceptron") return perceptron_loss();
  if (name == "double_hinge") return double_hinge_loss();
  if (name == "zero_one") return zero_one_loss();
  if (name == "hinge") return hinge_loss();
  if (name == "exponential") return exponential_loss();
  if (name == "huber") return huber_loss();
  if (name == "rho") return rho_loss(1.0);
  if (name.rfind("rho:", 0) == 0) {
    const std::string value = name.substr(4);
    char* end = nullptr;
    const double rho = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size()) {
      throw LossError("cannot parse rho in '" + name + "'");
    }
    return rho_loss(rho);
  }
  throw LossError("unknown loss '" + name + "'");
}

double odd_part(const LossSpec& loss, double x) {
  require_finite(x, "odd_part");
  return 0.5 * (loss(x) - loss(-x));
}

double even_part(const LossSpec& loss, double x) {
  require_finite(x, "even_part");
  // Same operand order for x and -x so that symmetry is exact.
  const double a = loss(x);
  const double b = loss(-x);
  return x < 0.0 ? 0.5 * (b + a) : 0.5 * (a + b);
}

std::vector<double> default_lol_grid() {
  std::vector<double> grid;
  for (double v : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
    grid.push_back(-v);
    grid.push_back(v);
  }
  return grid;
}

std::optional<double> lol_slope_check(const LossSpec& loss,
                                      std::span<const double> grid) {
  std::vector<double> ratios;
  bool has_pos = false;
  bool has_neg = false;
  for (double x : grid) {
    require_finite(x, "lol_slope_check");
    if (x == 0.0) continue;
    has_pos |= x > 0.0;
    has_neg |= x < 0.0;
    ratios.push_back(odd_part(loss, x) / x);
  }
  if (ratios.empty()) {
    throw LossError("lol_slope_check: grid has no nonzero point");
  }
  if (ratios.size() < 8 || !has_pos || !has_neg) {
    throw LossError(
        "lol_slope_check: grid needs >= 8 nonzero points on both sides of 0");
  }
  const double ref = ratios.front();
  const double tol = 1e-9 * std::max(1.0, std::abs(ref));
  double sum = 0.0;
  for (double r : ratios) {
    if (!std::isfinite(r) || std::abs(r - ref) > tol) return std::nullopt;
    sum += r;
  }
  return sum / static_cast<double>(ratios.size());
}

LossSpec craft_lol(ScalarMap even_fn, double a, std::string name,
                   std::span<const double> grid, ScalarMap even_subgrad) {
  if (!even_fn) throw LossError("craft_lol: empty even function");
  std::vector<double> fallback;
  if (grid.empty()) {
    fallback = default_lol_grid();
    for (double x = -20.0; x <= 20.0; x += 0.375) fallback.push_back(x);
    grid = fallback;
  }
  for (double x : grid) {
    require_finite(x, "craft_lol");
    const double lhs = even_fn(x);
    const double rhs = even_fn(-x);
    if (!(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)))) {
      throw LossError("craft_lol: function is not even at x = " +
                      std::to_string(x));
    }
  }
  ScalarMap eval = [f = even_fn, a](double x) { return f(x) + a * x; };
  ScalarMap subgrad;
  if (even_subgrad) {
    subgrad = [g = std::move(even_subgrad), a](double x) { return g(x) + a; };
  } else {
    // Right-sided difference, matching the kink convention of the catalog.
    subgrad = [f = std::move(even_fn), a](double x) {
      const double h = 1e-7 * std::max(1.0, std::abs(x));
      return (f(x + h) - f(x)) / h + a;
    };
  }
  return LossSpec(std::move(name), std::move(eval), std::move(subgrad),
                  {.odd_slope = a});
}

AffineBound affine_odd_bound(const LossSpec& loss,
                             std::span<const double> grid) {
  if (loss.name() == "hinge") {
    // l_o(x) = (-2x + |1-x| - |1+x|)/4 <= (1-x)/2.
    return {.slope = -0.5, .intercept = 0.5, .exact = true};
  }

  constexpr double probes[] = {1e2, 1e3, 1e4};
  double slope = 0.0;
  if (loss.is_linear_odd()) {
    slope = *loss.odd_slope();
  } else {
    auto secant = [&](double x1, double x2) {
      return (loss(x2) - loss(x1)) / (x2 - x1);
    };
    const double c1 = secant(probes[1], probes[2]);
    const double c1_near = secant(probes[0], probes[1]);
    const double c2 = secant(-probes[1], -probes[2]);
    const double c2_near = secant(-probes[0], -probes[1]);
    auto settled = [](double far, double near) {
      return std::isfinite(far) && std::isfinite(near) &&
             std::abs(far - near) <= 1e-3 * (1.0 + std::abs(far));
    };
    if (!settled(c1, c1_near) || !settled(c2, c2_near)) {
      throw LossError("no affine odd bound for loss '" + loss.name() +
                      "': missing asymptote");
    }
    slope = 0.5 * (c1 + c2);
  }

  double intercept = -std::numeric_limits<double>::infinity();
  auto visit = [&](double x) {
    const double gap = odd_part(loss, x) - slope * x;
    if (!std::isfinite(gap)) {
      throw LossError("no affine odd bound for loss '" + loss.name() +
                      "': odd part not finite");
    }
    intercept = std::max(intercept, gap);
  };
  for (double x : grid) visit(x);
  for (double x : probes) {
    visit(x);
    visit(-x);
  }
  return {.slope = slope, .intercept = intercept, .exact = false};
}

}  // namespace lossfact
