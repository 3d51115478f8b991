#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "config.hpp"
#include "doctest.h"
#include "memsdde.h"
#include "statics.hpp"

using namespace memsdde;

TEST_CASE("configuration parsing") {
  SUBCASE("defaults cover the reference device") {
    const RunConfig cfg = RunConfig::from_json_text("{}");
    CHECK(cfg.e == 9.9e-6);
    CHECK(cfg.c == 5.4e-3);
    CHECK(cfg.g1 == 3e-4);
    CHECK(cfg.g2 == 0.37);
    CHECK(cfg.v0 == 20.0);
    CHECK(cfg.delta == 0.0);
    CHECK(cfg.period() == doctest::Approx(2.0 * std::numbers::pi));
  }
  SUBCASE("scientific notation and overrides") {
    const RunConfig cfg = RunConfig::from_json_text(
        R"({"e": 1.2e-5, "delta": 1.579e-1, "damping": "squeeze", "gamma": 3e-4})");
    CHECK(cfg.e == 1.2e-5);
    CHECK(cfg.delta == 0.1579);
    CHECK(cfg.damping == DampingKind::SqueezeFilm);
    CHECK(cfg.is_explicit("e"));
    CHECK(!cfg.is_explicit("c"));
  }
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"voltage": 20})"), Error);
    try {
      RunConfig::from_json_text(R"({"voltage": 20})");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Config);
    }
  }
  SUBCASE("type and range violations are rejected") {
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"e": "big"})"), Error);
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"e": -1.0})"), Error);
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"harmonics": [[0, 1, 0]]})"), Error);
    CHECK_THROWS_AS(RunConfig::from_json_text("not json"), Error);
    CHECK_THROWS_AS(RunConfig::from_json_text(R"([1,2,3])"), Error);
  }
  SUBCASE("statics inputs merge explicit dimensionless keys") {
    const RunConfig plain = RunConfig::from_json_text("{}");
    const auto derived = plain.statics_inputs();
    CHECK(derived.e_eff == doctest::Approx(9.9795e-6).epsilon(1e-3));
    const RunConfig forced = RunConfig::from_json_text(R"({"e": 9.9e-6})");
    CHECK(forced.statics_inputs().e_eff == 9.9e-6);
  }
}

TEST_CASE("C API round trip") {
  mdde_config* cfg = nullptr;
  REQUIRE(mdde_config_create(&cfg) == MDDE_OK);

  SUBCASE("statics report matches the core computation") {
    mdde_statics_report r{};
    REQUIRE(mdde_statics(cfg, &r) == MDDE_OK);
    const auto expect = nondimensionalize(PhysicalParams::defaults());
    CHECK(r.c == expect.c);
    CHECK(r.e == expect.e);
    CHECK(r.x1 == doctest::Approx(equilibria(expect.e, 20.0).x1).epsilon(1e-12));
    CHECK(r.x1_class == MDDE_EQ_SADDLE);
    CHECK(r.x2_class == MDDE_EQ_STABLE_SPIRAL);
  }

  SUBCASE("config errors carry messages") {
    mdde_config* bad = nullptr;
    CHECK(mdde_config_from_json("{\"nope\": 1}", &bad) == MDDE_ERR_CONFIG);
    CHECK(std::strlen(mdde_last_error()) > 0);
  }

  SUBCASE("pull-in voltage override maps to the static error code") {
    REQUIRE(mdde_config_set(cfg, "v0", "123") == MDDE_OK);
    mdde_statics_report r{};
    CHECK(mdde_statics(cfg, &r) == MDDE_ERR_STATIC);
  }

  SUBCASE("delay bound") {
    mdde_d0_report r{};
    REQUIRE(mdde_delay_bound(cfg, &r) == MDDE_OK);
    CHECK(r.d0 == doctest::Approx(18.1).epsilon(1e-2));
    CHECK(!r.unbounded);
    // inapplicable with AC drive
    REQUIRE(mdde_config_set(cfg, "delta", "0.1579") == MDDE_OK);
    CHECK(mdde_delay_bound(cfg, &r) == MDDE_ERR_CONFIG);
  }

  SUBCASE("simulation handle") {
    REQUIRE(mdde_config_set(cfg, "t_end", "10.0") == MDDE_OK);
    mdde_trajectory* traj = nullptr;
    REQUIRE(mdde_simulate(cfg, 0.5, 0.0, &traj) == MDDE_OK);
    REQUIRE(mdde_trajectory_size(traj) > 2);
    double t0, x0, v0;
    REQUIRE(mdde_trajectory_sample(traj, 0, &t0, &x0, &v0) == MDDE_OK);
    CHECK(t0 == 0.0);
    CHECK(x0 == 0.5);
    double tc;
    CHECK(mdde_trajectory_pullin(traj, &tc) == 0);
    mdde_trajectory_free(traj);
  }

  SUBCASE("orbit handle with multipliers") {
    REQUIRE(mdde_config_set(cfg, "delta", "0.1579") == MDDE_OK);
    mdde_orbit* orbit = nullptr;
    REQUIRE(mdde_find_orbit(cfg, 0.0, &orbit) == MDDE_OK);
    CHECK(mdde_orbit_residual(orbit) <= 1e-10);
    double c0, s0;
    REQUIRE(mdde_orbit_coeff(orbit, 0, &c0, &s0) == MDDE_OK);
    CHECK(c0 == doctest::Approx(0.996).epsilon(1e-2));
    double re[4], im[4];
    int count = 0;
    REQUIRE(mdde_orbit_multipliers(cfg, orbit, 0, re, im, 4, &count) == MDDE_OK);
    CHECK(count == 2);
    CHECK(std::hypot(re[0], im[0]) < 1.0);
    mdde_orbit_free(orbit);
  }

  SUBCASE("checks surface") {
    mdde_check_report r{};
    // gains check inapplicable without a velocity gain
    REQUIRE(mdde_config_set(cfg, "g2", "0") == MDDE_OK);
    CHECK(mdde_check(cfg, "gains", &r) == MDDE_ERR_INAPPLICABLE);
    REQUIRE(mdde_config_set(cfg, "g2", "0.37") == MDDE_OK);
    CHECK(mdde_check(cfg, "hn", &r) == MDDE_OK);
    CHECK(r.pass == 1);
    CHECK(r.n_lines == 2);
    CHECK(mdde_check(cfg, "bogus", &r) == MDDE_ERR_CONFIG);
  }

  mdde_config_free(cfg);
}
