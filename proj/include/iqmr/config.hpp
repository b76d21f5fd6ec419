#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "iqmr/discovery.hpp"
#include "iqmr/energetics.hpp"
#include "iqmr/geometry.hpp"
#include "iqmr/link_metrics.hpp"
#include "iqmr/mobility.hpp"
#include "iqmr/radio.hpp"
#include "iqmr/routing.hpp"

namespace iqmr {

/// Config file problem: parse error, unknown key, or range violation. The
/// message carries the offending key and location.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimSection {
  int num_uavs = 50;
  std::int64_t episodes = 8000;
  std::uint64_t seed = 1;
  double tick_ms = 100.0;
  std::string baseline = "iqmr";  // or "plain-q" (ablated: lambda=0, fixed beta/gamma)
  int episode_tick_budget = 600;
  int burst_packets = 1;
  bool audit = true;
};

struct DiscoverySection {
  double base_hello_interval_ms = 100.0;
  double max_hello_interval_ms = 5000.0;
  double expiry_ms = 300.0;
  double sector_half_angle_rad = M_PI / 4.0;
};

struct RlSection {
  RewardWeights weights;
  double lambda = 0.9;
  double epsilon = 0.1;
  BetaMode beta_mode = BetaMode::kExpDecay;
  double beta_min = 0.01;
  double beta_max = 1.0;
  double beta_fixed = 0.5;
  GammaMode gamma_mode = GammaMode::kAdaptive;
  double gamma_min = 0.1;
  double gamma_max = 0.9;
  double gamma_fixed = 0.9;
  int max_hops = 25;
};

struct ScenarioEvent {
  enum class Kind { kDepleteEnergy, kFragment, kSweepParam };
  enum class Selector { kRandomFraction, kTopQHalf, kBottomQHalf, kExplicitIds };
  enum class Rejoin { kAllAtOnce, kStaggeredQuarters };

  std::int64_t episode = 0;
  Kind kind = Kind::kFragment;
  Selector selector = Selector::kRandomFraction;
  double fraction = 0.2;
  std::vector<int> ids;        // for explicit-ids
  double duration_ms = 200.0;
  Rejoin rejoin = Rejoin::kAllAtOnce;
  double stagger_ms = 2.5;     // per-quarter step for staggered rejoin
  std::string param;           // for sweep-param
  std::string value;           // literal, reparsed on application
};

/// Fully resolved simulation configuration. Defaults are the stock parameter
/// set; a config file overrides selectively and unknown keys are rejected.
struct SimConfig {
  SimSection sim;
  CylinderDomain domain;
  MobilityParams mobility;
  double radio_range_m = 250.0;
  ChannelParams channel;           // sir_threshold kept linear
  double sir_threshold_db = 0.0;   // as configured
  EnergyParams energy;             // payload stored in W/kg
  double payload_kw_per_kg = 0.217;
  CollisionParams collision;
  DiscoverySection discovery;
  RlSection rl;
  std::vector<ScenarioEvent> scenario;

  double tick_s() const { return sim.tick_ms / 1000.0; }
  Tick ms_to_ticks(double ms) const {
    return std::max<Tick>(1, static_cast<Tick>(std::llround(ms / sim.tick_ms)));
  }
  Tick expiry_ticks() const {
    return std::max<Tick>(1,
                          static_cast<Tick>(std::llround(discovery.expiry_ms / sim.tick_ms)));
  }
  Tick base_hello_ticks() const { return ms_to_ticks(discovery.base_hello_interval_ms); }
  Tick max_hello_ticks() const { return ms_to_ticks(discovery.max_hello_interval_ms); }
  Tick pause_ticks() const {
    return static_cast<Tick>(std::llround(mobility.pause_time_s * 1000.0 / sim.tick_ms));
  }
};

SimConfig default_config();

/// Parse config text over the defaults. `origin` names the source in errors.
SimConfig parse_config(const std::string& text, const std::string& origin);

/// Load and validate a config file.
SimConfig load_config(const std::string& path);

/// Parse a scenario file (same syntax; only scenario.event blocks allowed)
/// and append its events to cfg.
void load_scenario_file(SimConfig& cfg, const std::string& path);

/// Set one dotted key from its literal text value (sweep driver and
/// sweep-param events). Throws ConfigError for unknown keys or bad values.
void set_config_value(SimConfig& cfg, const std::string& key,
                      const std::string& literal);

/// Apply the baseline selection: "plain-q" pins lambda=0, beta=0.5 fixed,
/// gamma=0.9 fixed. Idempotent.
void apply_baseline(SimConfig& cfg);

/// Cross-field validation; throws ConfigError naming the offending key.
void validate(const SimConfig& cfg);

/// Canonical text form. serialize(parse(serialize(c))) == serialize(c).
std::string serialize_config(const SimConfig& cfg);

}  // namespace iqmr
