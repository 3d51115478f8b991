#include <cmath>
#include <numbers>

#include "doctest.h"
#include "statics.hpp"

using namespace memsdde;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// independent bisection oracle on (1-x)x^2 = target, used to freeze expected roots
double oracle_root(double target, double lo, double hi) {
  auto f = [target](double x) { return (1.0 - x) * x * x - target; };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(lo) * f(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("pull-in voltage") {
  CHECK(pull_in_voltage(9.9e-6) == doctest::Approx(122.33).epsilon(1e-4));
  CHECK(pull_in_voltage(4.0 / 27.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pull_in_voltage(3.0) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("equilibria") {
  SUBCASE("reference configuration") {
    const EquilibriumPair eq = equilibria(9.9e-6, 20.0);
    CHECK(eq.x1 == doctest::Approx(6.5e-2).epsilon(2e-3));
    CHECK(eq.x2 == doctest::Approx(9.95e-1).epsilon(2e-3));
    CHECK(std::abs(eq.x1 - 0.06501) < 1e-4);
    CHECK(std::abs(eq.x2 - 0.99601) < 1e-4);
    CHECK(!eq.degenerate);
    // agree with the independent oracle
    const double target = 9.9e-6 * 400.0;
    CHECK(eq.x1 == doctest::Approx(oracle_root(target, 0.0, 2.0 / 3.0)).epsilon(1e-10));
    CHECK(eq.x2 == doctest::Approx(oracle_root(target, 2.0 / 3.0, 1.0)).epsilon(1e-10));
  }
  SUBCASE("above pull-in") {
    CHECK_THROWS_AS(equilibria(9.9e-6, 123.0), Error);
    try {
      equilibria(9.9e-6, 123.0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::PullInExceeded);
    }
  }
  SUBCASE("exact pull-in reports the degenerate double root") {
    const double e = 9.9e-6;
    const EquilibriumPair eq = equilibria(e, pull_in_voltage(e));
    CHECK(eq.degenerate);
    CHECK(eq.x1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(eq.x2 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("root residuals stay below 1e-11 on a voltage grid") {
    for (double v0 = 5.0; v0 <= 120.0; v0 += 5.0) {
      const EquilibriumPair eq = equilibria(9.9e-6, v0);
      const double target = 9.9e-6 * v0 * v0;
      CHECK(std::abs((1.0 - eq.x1) * eq.x1 * eq.x1 - target) <= 1e-11);
      CHECK(std::abs((1.0 - eq.x2) * eq.x2 * eq.x2 - target) <= 1e-11);
    }
  }
  SUBCASE("monotone in the DC voltage") {
    double prev_x1 = 0.0, prev_x2 = 1.0;
    for (double v0 = 5.0; v0 <= 120.0; v0 += 5.0) {
      const EquilibriumPair eq = equilibria(9.9e-6, v0);
      CHECK(eq.x1 > prev_x1);
      CHECK(eq.x2 < prev_x2);
      prev_x1 = eq.x1;
      prev_x2 = eq.x2;
    }
  }
}

TEST_CASE("equilibrium classification") {
  const EquilibriumPair eq = equilibria(9.9e-6, 20.0);
  SUBCASE("lower branch is a saddle") {
    const ActuatorParams p{9.9e-6, DampingModel::linear(5.4e-3), 0.0, 0.0, 0.0,
                           VoltageProfile::dc(20.0, kTwoPi)};
    const Classification c = classify_equilibrium(p, eq.x1);
    CHECK(c.type == EquilibriumType::Saddle);
    CHECK(c.eig1.real() > 0.0);
    CHECK(c.eig2.real() < 0.0);
  }
  SUBCASE("upper branch is a stable spiral for the linear reference damping") {
    const ActuatorParams p{9.9e-6, DampingModel::linear(5.4e-3), 0.0, 0.0, 0.0,
                           VoltageProfile::dc(20.0, kTwoPi)};
    const Classification c = classify_equilibrium(p, eq.x2);
    CHECK(c.type == EquilibriumType::StableSpiral);
    CHECK(c.eig1.real() < 0.0);
    CHECK(c.eig1.imag() != 0.0);
  }
  SUBCASE("upper branch stays a spiral with squeeze-film damping") {
    const ActuatorParams p{9.9e-6, DampingModel::squeeze(3e-4), 0.0, 0.0, 0.0,
                           VoltageProfile::dc(20.0, kTwoPi)};
    const Classification c = classify_equilibrium(p, eq.x2);
    CHECK(c.type == EquilibriumType::StableSpiral);
  }
  SUBCASE("strong damping yields a node") {
    const ActuatorParams p{9.9e-6, DampingModel::linear(10.0), 0.0, 0.0, 0.0,
                           VoltageProfile::dc(20.0, kTwoPi)};
    const Classification c = classify_equilibrium(p, eq.x2);
    CHECK(c.type == EquilibriumType::StableNode);
    CHECK(c.eig1.real() < 0.0);
    CHECK(c.eig2.real() < 0.0);
  }
  SUBCASE("non-equilibrium input is rejected") {
    const ActuatorParams p{9.9e-6, DampingModel::linear(5.4e-3), 0.0, 0.0, 0.0,
                           VoltageProfile::dc(20.0, kTwoPi)};
    CHECK_THROWS_AS(classify_equilibrium(p, 0.5), Error);
  }
}

TEST_CASE("bracket constants") {
  SUBCASE("DC drive collapses the brackets onto the equilibria") {
    const VoltageProfile dc = VoltageProfile::dc(20.0, kTwoPi);
    const BracketSet br = bracket_constants(9.9e-6, dc);
    const EquilibriumPair eq = equilibria(9.9e-6, 20.0);
    CHECK(br.xi1 == doctest::Approx(eq.x1).epsilon(1e-11));
    CHECK(br.eta1 == doctest::Approx(eq.x1).epsilon(1e-11));
    CHECK(br.xi2 == doctest::Approx(eq.x2).epsilon(1e-11));
    CHECK(br.eta2 == doctest::Approx(eq.x2).epsilon(1e-11));
  }
  SUBCASE("reference AC drive") {
    const VoltageProfile ac = VoltageProfile::cosine(20.0, 0.1579, kTwoPi);
    const BracketSet br = bracket_constants(9.9e-6, ac);
    // oracle targets: e Vmax^2 = 4.0228e-3, e Vmin^2 = 3.8977e-3
    const double tmax = 9.9e-6 * 20.1579 * 20.1579;
    const double tmin = 9.9e-6 * 19.8421 * 19.8421;
    CHECK(br.xi2 == doctest::Approx(oracle_root(tmax, 2.0 / 3.0, 1.0)).epsilon(1e-10));
    CHECK(br.eta2 == doctest::Approx(oracle_root(tmin, 2.0 / 3.0, 1.0)).epsilon(1e-10));
    CHECK(std::abs(br.xi2 - 0.99594) < 5e-5);
    CHECK(std::abs(br.eta2 - 0.99607) < 5e-5);
    CHECK(br.eta1 <= br.xi1);
    CHECK(br.xi1 < 2.0 / 3.0);
    CHECK(2.0 / 3.0 < br.xi2);
    CHECK(br.xi2 <= br.eta2);
    CHECK(br.eta2 < 1.0);
  }
  SUBCASE("pull-in boundary is accepted as the degenerate double root") {
    const double e = 9.9e-6;
    const VoltageProfile at_pullin = VoltageProfile::dc(pull_in_voltage(e), kTwoPi);
    const BracketSet br = bracket_constants(e, at_pullin);
    CHECK(br.degenerate);
    CHECK(br.xi1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(br.xi2 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("voltage range above pull-in is rejected") {
    const VoltageProfile bad = VoltageProfile::dc(130.0, kTwoPi);
    CHECK_THROWS_AS(bracket_constants(9.9e-6, bad), Error);
  }
  SUBCASE("brackets collapse to the equilibria as delta -> 0") {
    const EquilibriumPair eq = equilibria(9.9e-6, 20.0);
    for (double delta : {1e-3, 1e-5, 1e-7}) {
      const VoltageProfile ac = VoltageProfile::cosine(20.0, delta, kTwoPi);
      const BracketSet br = bracket_constants(9.9e-6, ac);
      CHECK(std::abs(br.xi2 - eq.x2) < 10.0 * delta);
      CHECK(std::abs(br.eta2 - eq.x2) < 10.0 * delta);
    }
  }
}

TEST_CASE("nondimensionalization") {
  SUBCASE("reference device") {
    const DimensionlessSet s = nondimensionalize(PhysicalParams::defaults());
    CHECK(s.c == doctest::Approx(5.4e-3).epsilon(1e-3));
    CHECK(s.e == doctest::Approx(9.9e-6).epsilon(1e-2));
    CHECK(s.g1 == doctest::Approx(3e-4).epsilon(2e-2));
    CHECK(std::abs(s.time_scale - 8.1e-4) < 1e-6);
    CHECK(std::abs(s.g2 - 0.375) < 1e-3);
  }
  SUBCASE("zero mechanical damping") {
    PhysicalParams p = PhysicalParams::defaults();
    p.damping = 0.0;
    CHECK(nondimensionalize(p).c == 0.0);
  }
  SUBCASE("invalid parameters are rejected") {
    PhysicalParams p = PhysicalParams::defaults();
    p.mass = -1.0;
    CHECK_THROWS_AS(nondimensionalize(p), Error);
  }
}

TEST_CASE("bracket root residuals stay below 1e-11 across drives") {
  for (double v0 : {15.0, 20.0, 60.0, 100.0, 120.0}) {
    for (double delta : {0.0, 0.05, 0.1579}) {
      if (v0 + delta >= pull_in_voltage(9.9e-6)) continue;
      const VoltageProfile drive =
          delta == 0.0 ? VoltageProfile::dc(v0, kTwoPi)
                       : VoltageProfile::cosine(v0, delta, kTwoPi);
      const BracketSet br = bracket_constants(9.9e-6, drive);
      const double tmax = 9.9e-6 * drive.max_value() * drive.max_value();
      const double tmin = 9.9e-6 * drive.min_value() * drive.min_value();
      for (auto [root, target] : {std::pair{br.xi1, tmax}, std::pair{br.xi2, tmax},
                                  std::pair{br.eta1, tmin}, std::pair{br.eta2, tmin}}) {
        CHECK(std::abs((1.0 - root) * root * root - target) <= 1e-11);
      }
    }
  }
}
