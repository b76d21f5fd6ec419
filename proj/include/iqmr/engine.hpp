#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iqmr/config.hpp"
#include "iqmr/discovery.hpp"
#include "iqmr/energetics.hpp"
#include "iqmr/geometry.hpp"
#include "iqmr/link_metrics.hpp"
#include "iqmr/mobility.hpp"
#include "iqmr/radio.hpp"
#include "iqmr/rng.hpp"
#include "iqmr/routing.hpp"

namespace iqmr {

/// Simulation invariant violation (only raised with sim.audit enabled) or an
/// unrecoverable runtime fault.
class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { kNeighbourDiscovery, kReceive, kTransmit, kCharge };
const char* to_string(Mode m);

/// A routable surveillance payload. The visited path doubles as the loop
/// guard and as the eligibility-trace footprint.
struct Packet {
  std::int64_t id = 0;
  int source = -1;
  std::int64_t created_episode = 0;
  double bits = 1200.0;  // 150-byte payload
  std::vector<int> path;  // visited node ids, source first
  int retries = 0;        // consecutive failures on the current leg

  bool visited(int node) const {
    for (int n : path)
      if (n == node) return true;
    return false;
  }
};

/// Cumulative per-UAV transmission/acknowledgement counters; the per-layer
/// running delivery ratios feed the reward.
struct ReceptionCounters {
  std::int64_t pac_l2 = 0;
  std::int64_t ack_l2 = 0;
  std::int64_t pac_l3 = 0;
  std::int64_t ack_l3 = 0;

  // 0 until the first transmission at that layer
  double ratio_l2() const {
    return pac_l2 > 0 ? static_cast<double>(ack_l2) / static_cast<double>(pac_l2) : 0.0;
  }
  double ratio_l3() const {
    return pac_l3 > 0 ? static_cast<double>(ack_l3) / static_cast<double>(pac_l3) : 0.0;
  }
};

struct UavState {
  int id = -1;
  Vec3 position = Vec3::Zero();
  Kinematics kinematics;
  Battery battery;
  Mode mode = Mode::kNeighbourDiscovery;

  bool absent = false;    // out of the airspace (charging pad or fragmentation event)
  bool charging = false;
  bool fragmented = true; // no candidate neighbours
  Tick pause_left = 0;
  Tick next_hello = 0;
  bool steer_rerandomize = false;  // separation-violation remedy

  std::deque<Packet> rx_queue;
  std::deque<Packet> tx_queue;
  NeighbourTable table;
  QTable qtable;
  ReceptionCounters counters;

  double p_coll = 0.0;     // max pairwise collision probability vs candidates
  double last_beta = 1.0;  // advertised in hellos
  double last_gamma = 0.1;

  bool present() const { return !absent; }
};

/// Pure mode step (one call per UAV per tick). Energy gates dominate, then
/// the discovery/receive/transmit cycle. Pending data takes precedence over
/// a due hello so relaying is never starved; fragmentation always forces
/// discovery.
Mode transition_mode(const UavState& u, Tick now, double threshold_j);

/// Observer payloads for tests and tooling. kRelay bootstraps from the
/// receiving node's best Q; kTerminal (delivery) and kFailure (drop or
/// fragmentation) bootstrap from zero.
enum class UpdateKind { kRelay, kTerminal, kFailure };

struct QUpdateEvent {
  int node = -1;
  int action = -1;
  double q_old = 0.0;
  double q_new = 0.0;
  double reward = 0.0;
  double max_q_next = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double trace = 0.0;
  UpdateKind kind = UpdateKind::kRelay;
};

struct HopEvent {
  Tick tick = 0;
  int from = -1;
  int to = -1;
  bool success = false;
  double sir = 0.0;
};

/// One row of per-episode outputs (per-episode values; cumulative columns
/// are accumulated by the metrics layer).
struct EpisodeResult {
  std::int64_t episode = 0;
  double reward = 0.0;
  double residual_j = 0.0;
  std::int64_t injected = 0;
  std::int64_t delivered = 0;
  std::int64_t dropped = 0;
  int fragmented_uavs = 0;
  double mean_q = 0.0;
  Tick ticks_used = 0;
};

/// Deterministic single-threaded simulation engine: owns the fleet, the
/// base station, all RNG substreams and the episode loop.
class Engine {
 public:
  explicit Engine(SimConfig cfg);

  /// One packet's source->TBS attempt: inject, tick until resolved or the
  /// budget runs out, return the episode's metrics row.
  EpisodeResult run_episode();

  const SimConfig& config() const { return cfg_; }
  int tbs_id() const { return static_cast<int>(uavs_.size()); }
  const Vec3& tbs_position() const { return tbs_; }
  Tick tick() const { return tick_; }
  std::int64_t episode() const { return episode_; }

  std::vector<UavState>& uavs() { return uavs_; }
  const std::vector<UavState>& uavs() const { return uavs_; }

  /// Test hooks: pin a deterministic topology before the first episode.
  void set_position(int id, const Vec3& p) { uavs_.at(id).position = p; }
  void set_kinematics(int id, const Kinematics& k) { uavs_.at(id).kinematics = k; }

  std::function<void(const QUpdateEvent&)> on_q_update;
  std::function<void(const HopEvent&)> on_hop;

 private:
  struct PendingRejoin {
    Tick tick = 0;
    int id = -1;
  };

  // episode phases
  void apply_scheduled_events();
  void inject_burst(EpisodeResult& ep);
  void step_tick(EpisodeResult& ep, std::set<int>& fragmented_set);

  // tick sub-phases
  void process_rejoin_queue();
  void run_transitions(EpisodeResult& ep);
  void run_charging();
  void run_mobility();
  void run_hello();
  void refresh_candidates(std::set<int>& fragmented_set);
  void run_receive();
  void run_transmit(EpisodeResult& ep, std::set<int>& fragmented_set);

  // helpers
  std::vector<int> candidate_ids_of(const UavState& u) const;  // table + TBS
  int candidate_count_of(const UavState& u) const;
  bool tbs_in_range(const UavState& u) const;
  Sector sector_of(const UavState& u) const;
  double link_coverage(int tx, int rx);   // memoized per tick
  double uav_coverage(UavState& u);       // max over candidates, memoized
  double pairwise_collision(const UavState& a, const UavState& b) const;
  double beta_of(UavState& u);
  double gamma_of(const UavState& u) const;
  std::vector<int> interferer_ids(int tx, int rx_uav_or_tbs) const;
  double sample_hop_sir(int tx, int rx);
  void traced_update(double reward, double max_q_next, double beta,
                     double gamma, UpdateKind kind);
  void make_absent(int id, EpisodeResult* ep);
  void reenter(int id, bool randomize_position);
  void drop_episode_packets(UavState& u, EpisodeResult* ep);
  std::optional<int> pick_source() const;
  double network_residual_j() const;
  double mean_q_value() const;
  void select_targets(const ScenarioEvent& ev, std::vector<int>& out) const;

  // audits (active with sim.audit)
  void audit_transition(int id, Mode from, Mode to) const;
  void audit_tick(const EpisodeResult& ep) const;

  SimConfig cfg_;
  std::vector<UavState> uavs_;
  Vec3 tbs_ = Vec3::Zero();
  Tick tick_ = 0;
  std::int64_t episode_ = 0;
  std::int64_t packet_seq_ = 0;
  int next_source_ = 0;

  EligibilityTraces traces_;
  std::vector<PendingRejoin> rejoin_queue_;

  // per-tick caches
  std::map<std::pair<int, int>, double> coverage_memo_;
  std::vector<std::optional<double>> uav_cov_memo_;

  // run-level accounting (audited for conservation)
  std::int64_t total_injected_ = 0;
  std::int64_t total_delivered_ = 0;
  std::int64_t total_dropped_ = 0;
  std::int64_t in_flight_ = 0;

  std::vector<double> prev_residual_;  // per-tick energy monotonicity audit
};

}  // namespace iqmr
