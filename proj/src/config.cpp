#include "iqmr/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace iqmr {

namespace {

// ---- value model -----------------------------------------------------------

struct RawValue {
  enum class Type { kNumber, kString, kBool, kArray };
  Type type = Type::kNumber;
  double num = 0.0;
  bool boolean = false;
  std::string str;
  std::vector<double> arr;
};

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError("config key '" + key + "': " + what);
}

double as_number(const RawValue& v, const std::string& key) {
  if (v.type != RawValue::Type::kNumber) fail(key, "expected a number");
  return v.num;
}

std::int64_t as_int(const RawValue& v, const std::string& key) {
  const double d = as_number(v, key);
  if (d != std::floor(d)) fail(key, "expected an integer");
  return static_cast<std::int64_t>(d);
}

bool as_bool(const RawValue& v, const std::string& key) {
  if (v.type != RawValue::Type::kBool) fail(key, "expected true/false");
  return v.boolean;
}

std::string as_string(const RawValue& v, const std::string& key) {
  if (v.type != RawValue::Type::kString) fail(key, "expected a string");
  return v.str;
}

std::vector<double> as_array(const RawValue& v, const std::string& key,
                             std::size_t expected = 0) {
  if (v.type != RawValue::Type::kArray) fail(key, "expected an array");
  if (expected != 0 && v.arr.size() != expected)
    fail(key, "expected " + std::to_string(expected) + " entries");
  return v.arr;
}

double positive(double d, const std::string& key) {
  if (!(d > 0.0)) fail(key, "must be > 0");
  return d;
}

double non_negative(double d, const std::string& key) {
  if (!(d >= 0.0)) fail(key, "must be >= 0");
  return d;
}

double unit_interval(double d, const std::string& key) {
  if (!(d >= 0.0 && d <= 1.0)) fail(key, "must be in [0, 1]");
  return d;
}

Interval ordered_interval(const RawValue& v, const std::string& key) {
  auto a = as_array(v, key, 2);
  if (!(a[0] <= a[1])) fail(key, "range must be ordered [lo, hi]");
  return {a[0], a[1]};
}

// ---- enum spellings --------------------------------------------------------

BetaMode beta_mode_from(const std::string& s, const std::string& key) {
  if (s == "exp-decay") return BetaMode::kExpDecay;
  if (s == "saturating") return BetaMode::kSaturating;
  if (s == "fixed") return BetaMode::kFixed;
  fail(key, "expected one of exp-decay, saturating, fixed");
}

std::string to_string(BetaMode m) {
  switch (m) {
    case BetaMode::kExpDecay: return "exp-decay";
    case BetaMode::kSaturating: return "saturating";
    case BetaMode::kFixed: return "fixed";
  }
  return "exp-decay";
}

GammaMode gamma_mode_from(const std::string& s, const std::string& key) {
  if (s == "adaptive") return GammaMode::kAdaptive;
  if (s == "fixed") return GammaMode::kFixed;
  fail(key, "expected one of adaptive, fixed");
}

std::string to_string(GammaMode m) {
  return m == GammaMode::kAdaptive ? "adaptive" : "fixed";
}

ScenarioEvent::Kind kind_from(const std::string& s, const std::string& key) {
  if (s == "deplete-energy") return ScenarioEvent::Kind::kDepleteEnergy;
  if (s == "fragment") return ScenarioEvent::Kind::kFragment;
  if (s == "sweep-param") return ScenarioEvent::Kind::kSweepParam;
  fail(key, "expected one of deplete-energy, fragment, sweep-param");
}

std::string to_string(ScenarioEvent::Kind k) {
  switch (k) {
    case ScenarioEvent::Kind::kDepleteEnergy: return "deplete-energy";
    case ScenarioEvent::Kind::kFragment: return "fragment";
    case ScenarioEvent::Kind::kSweepParam: return "sweep-param";
  }
  return "fragment";
}

ScenarioEvent::Selector selector_from(const std::string& s,
                                      const std::string& key) {
  if (s == "random-fraction") return ScenarioEvent::Selector::kRandomFraction;
  if (s == "top-q-half") return ScenarioEvent::Selector::kTopQHalf;
  if (s == "bottom-q-half") return ScenarioEvent::Selector::kBottomQHalf;
  if (s == "explicit-ids") return ScenarioEvent::Selector::kExplicitIds;
  fail(key,
       "expected one of random-fraction, top-q-half, bottom-q-half, "
       "explicit-ids");
}

std::string to_string(ScenarioEvent::Selector s) {
  switch (s) {
    case ScenarioEvent::Selector::kRandomFraction: return "random-fraction";
    case ScenarioEvent::Selector::kTopQHalf: return "top-q-half";
    case ScenarioEvent::Selector::kBottomQHalf: return "bottom-q-half";
    case ScenarioEvent::Selector::kExplicitIds: return "explicit-ids";
  }
  return "random-fraction";
}

ScenarioEvent::Rejoin rejoin_from(const std::string& s,
                                  const std::string& key) {
  if (s == "all-at-once") return ScenarioEvent::Rejoin::kAllAtOnce;
  if (s == "staggered-quarters") return ScenarioEvent::Rejoin::kStaggeredQuarters;
  fail(key, "expected one of all-at-once, staggered-quarters");
}

std::string to_string(ScenarioEvent::Rejoin r) {
  return r == ScenarioEvent::Rejoin::kAllAtOnce ? "all-at-once"
                                                : "staggered-quarters";
}

// ---- key table -------------------------------------------------------------

using Setter = std::function<void(SimConfig&, const RawValue&, const std::string&)>;

const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = {
      {"radio_range_m",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.radio_range_m = positive(as_number(v, k), k);
       }},

      {"sim.num_uavs",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto n = as_int(v, k);
         if (n < 1) fail(k, "must be >= 1");
         c.sim.num_uavs = static_cast<int>(n);
       }},
      {"sim.episodes",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto n = as_int(v, k);
         if (n < 1) fail(k, "must be >= 1");
         c.sim.episodes = n;
       }},
      {"sim.seed",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto n = as_int(v, k);
         if (n < 0) fail(k, "must be >= 0");
         c.sim.seed = static_cast<std::uint64_t>(n);
       }},
      {"sim.tick_ms",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.sim.tick_ms = positive(as_number(v, k), k);
       }},
      {"sim.baseline",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto s = as_string(v, k);
         if (s != "iqmr" && s != "plain-q")
           fail(k, "expected one of iqmr, plain-q");
         c.sim.baseline = s;
       }},
      {"sim.episode_tick_budget",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto n = as_int(v, k);
         if (n < 1) fail(k, "must be >= 1");
         c.sim.episode_tick_budget = static_cast<int>(n);
       }},
      {"sim.burst_packets",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto n = as_int(v, k);
         if (n < 1) fail(k, "must be >= 1");
         c.sim.burst_packets = static_cast<int>(n);
       }},
      {"sim.audit",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.sim.audit = as_bool(v, k);
       }},

      {"domain.radius_m",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.domain.radius_m = positive(as_number(v, k), k);
       }},
      {"domain.height_range_m",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto r = ordered_interval(v, k);
         if (!(r.lo < r.hi)) fail(k, "altitude band must have lo < hi");
         c.domain.h_min_m = r.lo;
         c.domain.h_max_m = r.hi;
       }},

      {"mobility.alpha",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const double a = as_number(v, k);
         if (!(a > 0.0 && a < 1.0)) fail(k, "must be in (0, 1)");
         c.mobility.alpha = a;
       }},
      {"mobility.mean_speed",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.mobility.mean_speed = non_negative(as_number(v, k), k);
       }},
      {"mobility.mean_direction",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.mobility.mean_direction = as_number(v, k);
       }},
      {"mobility.mean_pitch",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.mobility.mean_pitch = as_number(v, k);
       }},
      {"mobility.speed_range",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto r = ordered_interval(v, k);
         if (r.lo < 0.0) fail(k, "speeds must be >= 0");
         c.mobility.speed_bounds = r;
       }},
      {"mobility.direction_range",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.mobility.direction_bounds = ordered_interval(v, k);
       }},
      {"mobility.pitch_range",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.mobility.pitch_bounds = ordered_interval(v, k);
       }},
      {"mobility.pause_time_s",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.mobility.pause_time_s = non_negative(as_number(v, k), k);
       }},

      {"channel.zeta",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.channel.zeta = positive(as_number(v, k), k);
       }},
      {"channel.rician_k",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const double kf = non_negative(as_number(v, k), k);
         c.channel.rician_k = kf;
         c.channel.nakagami_m = nakagami_m_from_k(kf);
       }},
      {"channel.sir_threshold_db",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.sir_threshold_db = as_number(v, k);
         c.channel.sir_threshold = db_to_linear(c.sir_threshold_db);
       }},
      {"channel.coverage_samples",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto n = as_int(v, k);
         if (n < 1) fail(k, "must be >= 1");
         c.channel.coverage_samples = static_cast<int>(n);
       }},
      {"channel.noise_floor",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.channel.noise_floor = positive(as_number(v, k), k);
       }},
      {"channel.p_cov_threshold",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.channel.p_cov_threshold = unit_interval(as_number(v, k), k);
       }},

      {"energy.initial_j",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.energy.initial_j = positive(as_number(v, k), k);
       }},
      {"energy.threshold_j",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.energy.threshold_j = non_negative(as_number(v, k), k);
       }},
      {"energy.eps_elec",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.energy.eps_elec_j_per_bit = non_negative(as_number(v, k), k);
       }},
      {"energy.eps_amp_fs",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.energy.eps_amp_fs_j_per_bit_m2 = non_negative(as_number(v, k), k);
       }},
      {"energy.eps_amp_mp",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.energy.eps_amp_mp_j_per_bit_m4 = non_negative(as_number(v, k), k);
       }},
      {"energy.r0_m",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.energy.crossover_m = positive(as_number(v, k), k);
       }},
      {"energy.payload_kw_per_kg",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.payload_kw_per_kg = non_negative(as_number(v, k), k);
         c.energy.payload_w_per_kg = c.payload_kw_per_kg * 1000.0;
       }},
      {"energy.mass_kg",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.energy.mass_kg = positive(as_number(v, k), k);
       }},
      {"energy.charge_rate_j_per_s",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.energy.charge_rate_j_per_s = positive(as_number(v, k), k);
       }},

      {"collision.xi_x_m",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.collision.xi_x_m = positive(as_number(v, k), k);
       }},
      {"collision.xi_y_m",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.collision.xi_y_m = positive(as_number(v, k), k);
       }},
      {"collision.r_min_m",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.collision.r_min_m = positive(as_number(v, k), k);
       }},
      {"collision.p_coll_threshold",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.collision.p_coll_threshold = unit_interval(as_number(v, k), k);
       }},

      {"discovery.base_hello_interval_ms",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.discovery.base_hello_interval_ms = positive(as_number(v, k), k);
       }},
      {"discovery.max_hello_interval_ms",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.discovery.max_hello_interval_ms = positive(as_number(v, k), k);
       }},
      {"discovery.expiry_ms",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.discovery.expiry_ms = positive(as_number(v, k), k);
       }},
      {"discovery.sector_half_angle_rad",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const double a = as_number(v, k);
         if (!(a > 0.0 && a <= M_PI / 2.0)) fail(k, "must be in (0, pi/2]");
         c.discovery.sector_half_angle_rad = a;
       }},

      {"rl.weights",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto a = as_array(v, k, 5);
         RewardWeights w{a[0], a[1], a[2], a[3], a[4]};
         try {
           w.validate();
         } catch (const std::invalid_argument& e) {
           fail(k, e.what());
         }
         c.rl.weights = w;
       }},
      {"rl.lambda",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.rl.lambda = unit_interval(as_number(v, k), k);
       }},
      {"rl.epsilon",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.rl.epsilon = unit_interval(as_number(v, k), k);
       }},
      {"rl.beta_mode",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.rl.beta_mode = beta_mode_from(as_string(v, k), k);
       }},
      {"rl.beta_min",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.rl.beta_min = positive(as_number(v, k), k);
       }},
      {"rl.beta_max",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const double b = as_number(v, k);
         if (!(b > 0.0 && b <= 1.0)) fail(k, "must be in (0, 1]");
         c.rl.beta_max = b;
       }},
      {"rl.beta_fixed",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const double b = as_number(v, k);
         if (!(b > 0.0 && b <= 1.0)) fail(k, "must be in (0, 1]");
         c.rl.beta_fixed = b;
       }},
      {"rl.gamma_mode",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         c.rl.gamma_mode = gamma_mode_from(as_string(v, k), k);
       }},
      {"rl.gamma_min",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const double g = as_number(v, k);
         if (!(g >= 0.0 && g < 1.0)) fail(k, "must be in [0, 1)");
         c.rl.gamma_min = g;
       }},
      {"rl.gamma_max",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const double g = as_number(v, k);
         if (!(g >= 0.0 && g < 1.0)) fail(k, "must be in [0, 1)");
         c.rl.gamma_max = g;
       }},
      {"rl.gamma_fixed",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const double g = as_number(v, k);
         if (!(g >= 0.0 && g < 1.0)) fail(k, "must be in [0, 1)");
         c.rl.gamma_fixed = g;
       }},
      {"rl.max_hops",
       [](SimConfig& c, const RawValue& v, const std::string& k) {
         const auto n = as_int(v, k);
         if (n < 1) fail(k, "must be >= 1");
         c.rl.max_hops = static_cast<int>(n);
       }},
  };
  return table;
}

void set_event_key(ScenarioEvent& ev, const std::string& key,
                   const RawValue& v) {
  const std::string full = "scenario.event." + key;
  if (key == "episode") {
    const auto n = as_int(v, full);
    if (n < 0) fail(full, "must be >= 0");
    ev.episode = n;
  } else if (key == "kind") {
    ev.kind = kind_from(as_string(v, full), full);
  } else if (key == "selector") {
    ev.selector = selector_from(as_string(v, full), full);
  } else if (key == "fraction") {
    const double f = as_number(v, full);
    if (!(f > 0.0 && f <= 1.0)) fail(full, "must be in (0, 1]");
    ev.fraction = f;
  } else if (key == "ids") {
    ev.ids.clear();
    for (double d : as_array(v, full)) {
      if (d != std::floor(d) || d < 0.0)
        fail(full, "ids must be non-negative integers");
      ev.ids.push_back(static_cast<int>(d));
    }
  } else if (key == "duration_ms") {
    ev.duration_ms = positive(as_number(v, full), full);
  } else if (key == "rejoin") {
    ev.rejoin = rejoin_from(as_string(v, full), full);
  } else if (key == "stagger_ms") {
    ev.stagger_ms = positive(as_number(v, full), full);
  } else if (key == "param") {
    ev.param = as_string(v, full);
  } else if (key == "value") {
    ev.value = as_string(v, full);
  } else {
    fail(full, "unknown scenario event key");
  }
}

// ---- text parsing ----------------------------------------------------------

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& s, double& out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end != begin && *end == '\0';
}

RawValue parse_value(const std::string& text, const std::string& where) {
  RawValue v;
  if (text.empty()) throw ConfigError(where + ": missing value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"')
      throw ConfigError(where + ": unterminated string");
    v.type = RawValue::Type::kString;
    v.str = text.substr(1, text.size() - 2);
    return v;
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw ConfigError(where + ": unterminated array");
    v.type = RawValue::Type::kArray;
    std::string body = text.substr(1, text.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      double d = 0.0;
      if (!parse_number(item, d))
        throw ConfigError(where + ": bad array entry '" + item + "'");
      v.arr.push_back(d);
    }
    return v;
  }
  if (text == "true" || text == "false") {
    v.type = RawValue::Type::kBool;
    v.boolean = (text == "true");
    return v;
  }
  double d = 0.0;
  if (parse_number(text, d)) {
    v.type = RawValue::Type::kNumber;
    v.num = d;
    return v;
  }
  // bare word: treated as a string so enums can be written unquoted
  v.type = RawValue::Type::kString;
  v.str = text;
  return v;
}

// ---- serialization ---------------------------------------------------------

std::string fmt(double d) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fmt(const Interval& r) {
  return "[" + fmt(r.lo) + ", " + fmt(r.hi) + "]";
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

SimConfig default_config() { return SimConfig{}; }

SimConfig parse_config(const std::string& text, const std::string& origin) {
  SimConfig cfg = default_config();
  std::istringstream in(text);
  std::string raw;
  std::string section;
  bool in_event = false;
  int lineno = 0;

  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line == "[[scenario.event]]") {
        cfg.scenario.emplace_back();
        in_event = true;
        continue;
      }
      if (line.size() >= 2 && line[1] == '[')
        throw ConfigError(where + ": only [[scenario.event]] may repeat");
      if (line.back() != ']')
        throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(where + ": empty section header");
      in_event = false;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value_text = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    const RawValue value = parse_value(value_text, where);

    if (in_event) {
      try {
        set_event_key(cfg.scenario.back(), key, value);
      } catch (const ConfigError& e) {
        throw ConfigError(where + ": " + e.what());
      }
      continue;
    }

    const std::string full = section.empty() ? key : section + "." + key;
    const auto& table = key_table();
    auto it = table.find(full);
    if (it == table.end())
      throw ConfigError(where + ": unknown key '" + full + "'");
    try {
      it->second(cfg, value, full);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }

  validate(cfg);
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  SimConfig cfg = parse_config(ss.str(), path);
  apply_baseline(cfg);
  return cfg;
}

void load_scenario_file(SimConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  SimConfig extra = parse_config(ss.str(), path);
  for (auto& ev : extra.scenario) cfg.scenario.push_back(ev);
  validate(cfg);
}

void set_config_value(SimConfig& cfg, const std::string& key,
                      const std::string& literal) {
  if (key.rfind("scenario.", 0) == 0)
    throw ConfigError("config key '" + key + "': not settable directly");
  const auto& table = key_table();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
  it->second(cfg, parse_value(trim(literal), key), key);
  validate(cfg);
}

void apply_baseline(SimConfig& cfg) {
  if (cfg.sim.baseline == "plain-q") {
    cfg.rl.lambda = 0.0;
    cfg.rl.beta_mode = BetaMode::kFixed;
    cfg.rl.beta_fixed = 0.5;
    cfg.rl.gamma_mode = GammaMode::kFixed;
    cfg.rl.gamma_fixed = 0.9;
  }
}

void validate(const SimConfig& cfg) {
  if (!(cfg.domain.h_min_m < cfg.domain.h_max_m))
    fail("domain.height_range_m", "altitude band must have lo < hi");
  if (!(cfg.energy.threshold_j < cfg.energy.initial_j))
    fail("energy.threshold_j", "must be below energy.initial_j");
  if (!(cfg.discovery.base_hello_interval_ms <=
        cfg.discovery.max_hello_interval_ms))
    fail("discovery.max_hello_interval_ms", "must be >= base interval");
  if (!(cfg.rl.beta_min < cfg.rl.beta_max))
    fail("rl.beta_min", "must be below rl.beta_max");
  if (!(cfg.rl.gamma_min <= cfg.rl.gamma_max))
    fail("rl.gamma_min", "must be <= rl.gamma_max");
  try {
    cfg.rl.weights.validate();
  } catch (const std::invalid_argument& e) {
    fail("rl.weights", e.what());
  }
  for (std::size_t i = 0; i < cfg.scenario.size(); ++i) {
    const auto& ev = cfg.scenario[i];
    const std::string where = "scenario.event[" + std::to_string(i) + "]";
    if (ev.kind == ScenarioEvent::Kind::kSweepParam) {
      if (ev.param.empty() || ev.value.empty())
        throw ConfigError(where + ": sweep-param needs 'param' and 'value'");
      if (!key_table().count(ev.param))
        throw ConfigError(where + ": unknown param '" + ev.param + "'");
    }
    if (ev.selector == ScenarioEvent::Selector::kExplicitIds && ev.ids.empty())
      throw ConfigError(where + ": explicit-ids needs a non-empty 'ids' list");
    for (int id : ev.ids)
      if (id >= cfg.sim.num_uavs)
        throw ConfigError(where + ": id " + std::to_string(id) +
                          " out of range");
  }
}

std::string serialize_config(const SimConfig& c) {
  std::ostringstream out;
  out << "radio_range_m = " << fmt(c.radio_range_m) << "\n\n";

  out << "[sim]\n";
  out << "num_uavs = " << c.sim.num_uavs << "\n";
  out << "episodes = " << c.sim.episodes << "\n";
  out << "seed = " << c.sim.seed << "\n";
  out << "tick_ms = " << fmt(c.sim.tick_ms) << "\n";
  out << "baseline = " << quoted(c.sim.baseline) << "\n";
  out << "episode_tick_budget = " << c.sim.episode_tick_budget << "\n";
  out << "burst_packets = " << c.sim.burst_packets << "\n";
  out << "audit = " << (c.sim.audit ? "true" : "false") << "\n\n";

  out << "[domain]\n";
  out << "radius_m = " << fmt(c.domain.radius_m) << "\n";
  out << "height_range_m = [" << fmt(c.domain.h_min_m) << ", "
      << fmt(c.domain.h_max_m) << "]\n\n";

  out << "[mobility]\n";
  out << "alpha = " << fmt(c.mobility.alpha) << "\n";
  out << "mean_speed = " << fmt(c.mobility.mean_speed) << "\n";
  out << "mean_direction = " << fmt(c.mobility.mean_direction) << "\n";
  out << "mean_pitch = " << fmt(c.mobility.mean_pitch) << "\n";
  out << "speed_range = " << fmt(c.mobility.speed_bounds) << "\n";
  out << "direction_range = " << fmt(c.mobility.direction_bounds) << "\n";
  out << "pitch_range = " << fmt(c.mobility.pitch_bounds) << "\n";
  out << "pause_time_s = " << fmt(c.mobility.pause_time_s) << "\n\n";

  out << "[channel]\n";
  out << "zeta = " << fmt(c.channel.zeta) << "\n";
  out << "rician_k = " << fmt(c.channel.rician_k) << "\n";
  out << "sir_threshold_db = " << fmt(c.sir_threshold_db) << "\n";
  out << "coverage_samples = " << c.channel.coverage_samples << "\n";
  out << "noise_floor = " << fmt(c.channel.noise_floor) << "\n";
  out << "p_cov_threshold = " << fmt(c.channel.p_cov_threshold) << "\n\n";

  out << "[energy]\n";
  out << "initial_j = " << fmt(c.energy.initial_j) << "\n";
  out << "threshold_j = " << fmt(c.energy.threshold_j) << "\n";
  out << "eps_elec = " << fmt(c.energy.eps_elec_j_per_bit) << "\n";
  out << "eps_amp_fs = " << fmt(c.energy.eps_amp_fs_j_per_bit_m2) << "\n";
  out << "eps_amp_mp = " << fmt(c.energy.eps_amp_mp_j_per_bit_m4) << "\n";
  out << "r0_m = " << fmt(c.energy.crossover_m) << "\n";
  out << "payload_kw_per_kg = " << fmt(c.payload_kw_per_kg) << "\n";
  out << "mass_kg = " << fmt(c.energy.mass_kg) << "\n";
  out << "charge_rate_j_per_s = " << fmt(c.energy.charge_rate_j_per_s)
      << "\n\n";

  out << "[collision]\n";
  out << "xi_x_m = " << fmt(c.collision.xi_x_m) << "\n";
  out << "xi_y_m = " << fmt(c.collision.xi_y_m) << "\n";
  out << "r_min_m = " << fmt(c.collision.r_min_m) << "\n";
  out << "p_coll_threshold = " << fmt(c.collision.p_coll_threshold) << "\n\n";

  out << "[discovery]\n";
  out << "base_hello_interval_ms = " << fmt(c.discovery.base_hello_interval_ms)
      << "\n";
  out << "max_hello_interval_ms = " << fmt(c.discovery.max_hello_interval_ms)
      << "\n";
  out << "expiry_ms = " << fmt(c.discovery.expiry_ms) << "\n";
  out << "sector_half_angle_rad = " << fmt(c.discovery.sector_half_angle_rad)
      << "\n\n";

  out << "[rl]\n";
  out << "weights = [" << fmt(c.rl.weights.w1) << ", " << fmt(c.rl.weights.w2)
      << ", " << fmt(c.rl.weights.w3) << ", " << fmt(c.rl.weights.w4) << ", "
      << fmt(c.rl.weights.w5) << "]\n";
  out << "lambda = " << fmt(c.rl.lambda) << "\n";
  out << "epsilon = " << fmt(c.rl.epsilon) << "\n";
  out << "beta_mode = " << quoted(to_string(c.rl.beta_mode)) << "\n";
  out << "beta_min = " << fmt(c.rl.beta_min) << "\n";
  out << "beta_max = " << fmt(c.rl.beta_max) << "\n";
  out << "beta_fixed = " << fmt(c.rl.beta_fixed) << "\n";
  out << "gamma_mode = " << quoted(to_string(c.rl.gamma_mode)) << "\n";
  out << "gamma_min = " << fmt(c.rl.gamma_min) << "\n";
  out << "gamma_max = " << fmt(c.rl.gamma_max) << "\n";
  out << "gamma_fixed = " << fmt(c.rl.gamma_fixed) << "\n";
  out << "max_hops = " << c.rl.max_hops << "\n";

  for (const auto& ev : c.scenario) {
    out << "\n[[scenario.event]]\n";
    out << "episode = " << ev.episode << "\n";
    out << "kind = " << quoted(to_string(ev.kind)) << "\n";
    out << "selector = " << quoted(to_string(ev.selector)) << "\n";
    out << "fraction = " << fmt(ev.fraction) << "\n";
    if (!ev.ids.empty()) {
      out << "ids = [";
      for (std::size_t i = 0; i < ev.ids.size(); ++i)
        out << (i ? ", " : "") << ev.ids[i];
      out << "]\n";
    }
    out << "duration_ms = " << fmt(ev.duration_ms) << "\n";
    out << "rejoin = " << quoted(to_string(ev.rejoin)) << "\n";
    out << "stagger_ms = " << fmt(ev.stagger_ms) << "\n";
    if (!ev.param.empty()) out << "param = " << quoted(ev.param) << "\n";
    if (!ev.value.empty()) out << "value = " << quoted(ev.value) << "\n";
  }
  return out.str();
}

}  // namespace iqmr
