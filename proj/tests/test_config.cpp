#include <doctest.h>

#include "iqmr/config.hpp"
#include "testutil.hpp"

using namespace iqmr;

TEST_CASE("empty config text yields the stock defaults") {
  const SimConfig cfg = parse_config("", "inline");
  CHECK(cfg.sim.num_uavs == 50);
  CHECK(cfg.sim.episodes == 8000);
  CHECK(cfg.radio_range_m == doctest::Approx(250.0));
  CHECK(cfg.domain.radius_m == doctest::Approx(1000.0));
  CHECK(cfg.domain.h_min_m == doctest::Approx(100.0));
  CHECK(cfg.domain.h_max_m == doctest::Approx(300.0));
  CHECK(cfg.energy.initial_j == doctest::Approx(207792.0));
  CHECK(cfg.energy.threshold_j == doctest::Approx(100.0));
  CHECK(cfg.energy.crossover_m == doctest::Approx(100.0));
  CHECK(cfg.energy.eps_elec_j_per_bit == doctest::Approx(50e-9));
  CHECK(cfg.energy.eps_amp_fs_j_per_bit_m2 == doctest::Approx(41e-6));
  CHECK(cfg.energy.eps_amp_mp_j_per_bit_m4 == doctest::Approx(100e-12));
  CHECK(cfg.payload_kw_per_kg == doctest::Approx(0.217));
  CHECK(cfg.sir_threshold_db == doctest::Approx(0.0));
  CHECK(cfg.channel.sir_threshold == doctest::Approx(1.0));
  CHECK(cfg.channel.p_cov_threshold == doctest::Approx(0.1));
  CHECK(cfg.collision.xi_x_m == doctest::Approx(3.0));
  CHECK(cfg.collision.r_min_m == doctest::Approx(1.0));
  CHECK(cfg.mobility.speed_bounds.lo == doctest::Approx(10.0));
  CHECK(cfg.mobility.speed_bounds.hi == doctest::Approx(20.0));
  CHECK(cfg.discovery.expiry_ms == doctest::Approx(300.0));
  CHECK(cfg.rl.lambda == doctest::Approx(0.9));
  CHECK(cfg.rl.epsilon == doctest::Approx(0.1));
  CHECK(cfg.rl.gamma_min == doctest::Approx(0.1));
  CHECK(cfg.rl.gamma_max == doctest::Approx(0.9));
  CHECK(cfg.expiry_ticks() == 3);
  CHECK(cfg.pause_ticks() == 10);
}

TEST_CASE("unknown keys are rejected with the key name and location") {
  try {
    parse_config("[sim]\nnum_uav = 3\n", "inline");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("sim.num_uav") != std::string::npos);
    CHECK(msg.find("inline:2") != std::string::npos);
  }
}

TEST_CASE("range violations name the offending key") {
  try {
    parse_config("[rl]\nepsilon = 1.5\n", "inline");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("rl.epsilon") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[mobility]\nalpha = 1.0\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sim]\ntick_ms = 0\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_config("[rl]\nweights = [0.2, 0.2, 0.2, 0.2, 0.2]\n", "inline"),
                  ConfigError);
}

TEST_CASE("values round-trip exactly") {
  const SimConfig cfg = parse_config("[energy]\ninitial_j = 207792\n", "inline");
  CHECK(cfg.energy.initial_j == 207792.0);
  const std::string text = serialize_config(cfg);
  const SimConfig again = parse_config(text, "resolved");
  CHECK(again.energy.initial_j == 207792.0);
  CHECK(serialize_config(again) == text);
}

TEST_CASE("serialized defaults reparse to an identical resolved config") {
  const SimConfig cfg = default_config();
  const std::string text = serialize_config(cfg);
  const SimConfig again = parse_config(text, "resolved");
  CHECK(serialize_config(again) == text);
}

TEST_CASE("scenario events parse with every field") {
  const std::string text =
      "[[scenario.event]]\n"
      "episode = 100\n"
      "kind = \"fragment\"\n"
      "selector = \"top-q-half\"\n"
      "fraction = 0.5\n"
      "duration_ms = 400\n"
      "rejoin = \"staggered-quarters\"\n"
      "stagger_ms = 800\n"
      "\n"
      "[[scenario.event]]\n"
      "episode = 200\n"
      "kind = \"deplete-energy\"\n"
      "selector = \"random-fraction\"\n"
      "fraction = 0.2\n"
      "duration_ms = 200\n";
  const SimConfig cfg = parse_config(text, "inline");
  REQUIRE(cfg.scenario.size() == 2);
  CHECK(cfg.scenario[0].episode == 100);
  CHECK(cfg.scenario[0].kind == ScenarioEvent::Kind::kFragment);
  CHECK(cfg.scenario[0].selector == ScenarioEvent::Selector::kTopQHalf);
  CHECK(cfg.scenario[0].rejoin == ScenarioEvent::Rejoin::kStaggeredQuarters);
  CHECK(cfg.scenario[0].stagger_ms == doctest::Approx(800.0));
  CHECK(cfg.scenario[1].kind == ScenarioEvent::Kind::kDepleteEnergy);

  // round-trips through the canonical form
  const std::string out = serialize_config(cfg);
  CHECK(serialize_config(parse_config(out, "resolved")) == out);
}

TEST_CASE("scenario validation: selectors and sweep-param fields") {
  CHECK_THROWS_AS(parse_config("[[scenario.event]]\nkind = \"sweep-param\"\n", "inline"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config("[[scenario.event]]\nselector = \"explicit-ids\"\n", "inline"),
      ConfigError);
  CHECK_THROWS_AS(parse_config("[[scenario.event]]\nkind = \"meteor\"\n", "inline"),
                  ConfigError);
  const SimConfig ok = parse_config(
      "[[scenario.event]]\nkind = \"sweep-param\"\nparam = \"rl.epsilon\"\n"
      "value = \"0.5\"\n",
      "inline");
  CHECK(ok.scenario[0].param == "rl.epsilon");
}

TEST_CASE("plain-q baseline pins the ablated learner") {
  SimConfig cfg = parse_config("[sim]\nbaseline = \"plain-q\"\n", "inline");
  apply_baseline(cfg);
  CHECK(cfg.rl.lambda == 0.0);
  CHECK(cfg.rl.beta_mode == BetaMode::kFixed);
  CHECK(cfg.rl.beta_fixed == doctest::Approx(0.5));
  CHECK(cfg.rl.gamma_mode == GammaMode::kFixed);
  CHECK(cfg.rl.gamma_fixed == doctest::Approx(0.9));
  // idempotent through the resolved round trip
  const SimConfig again = parse_config(serialize_config(cfg), "resolved");
  SimConfig resolved = again;
  apply_baseline(resolved);
  CHECK(serialize_config(resolved) == serialize_config(cfg));
}

TEST_CASE("set_config_value: sweepable keys validated before any run") {
  SimConfig cfg = default_config();
  set_config_value(cfg, "rl.epsilon", "0.5");
  CHECK(cfg.rl.epsilon == doctest::Approx(0.5));
  set_config_value(cfg, "channel.sir_threshold_db", "-5");
  CHECK(cfg.channel.sir_threshold == doctest::Approx(db_to_linear(-5.0)));
  CHECK_THROWS_AS(set_config_value(cfg, "rl.exploration", "0.5"), ConfigError);
  CHECK_THROWS_AS(set_config_value(cfg, "rl.epsilon", "2.0"), ConfigError);
}

TEST_CASE("comments, bare-word strings and top-level keys parse") {
  const SimConfig cfg = parse_config(
      "# stock radio range\n"
      "radio_range_m = 300  # meters\n"
      "[rl]\n"
      "beta_mode = exp-decay\n",
      "inline");
  CHECK(cfg.radio_range_m == doctest::Approx(300.0));
  CHECK(cfg.rl.beta_mode == BetaMode::kExpDecay);
}
