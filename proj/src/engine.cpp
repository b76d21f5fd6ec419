#include "iqmr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iqmr {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kNeighbourDiscovery: return "neighbour-discovery";
    case Mode::kReceive: return "receive";
    case Mode::kTransmit: return "transmit";
    case Mode::kCharge: return "charge";
  }
  return "?";
}

Mode transition_mode(const UavState& u, Tick now, double threshold_j) {
  if (u.charging) return u.battery.full() ? Mode::kNeighbourDiscovery : Mode::kCharge;
  if (u.battery.below(threshold_j)) return Mode::kCharge;
  switch (u.mode) {
    case Mode::kNeighbourDiscovery:
      // one broadcast tick, then back to the receive/transmit cycle
      return u.fragmented ? Mode::kNeighbourDiscovery : Mode::kReceive;
    case Mode::kReceive:
      if (u.fragmented) return Mode::kNeighbourDiscovery;
      if (u.rx_queue.empty() && !u.tx_queue.empty()) return Mode::kTransmit;
      if (now >= u.next_hello) return Mode::kNeighbourDiscovery;
      return Mode::kReceive;
    case Mode::kTransmit:
      if (u.fragmented) return Mode::kNeighbourDiscovery;
      if (!u.tx_queue.empty()) return Mode::kTransmit;
      if (now >= u.next_hello) return Mode::kNeighbourDiscovery;
      return Mode::kReceive;
    case Mode::kCharge:
      return Mode::kCharge;  // unreachable: charging handled above
  }
  return u.mode;
}

namespace {

bool allowed_edge(Mode from, Mode to) {
  if (from == to) return true;
  switch (from) {
    case Mode::kNeighbourDiscovery:
      return to == Mode::kReceive || to == Mode::kCharge;
    case Mode::kReceive:
      return to == Mode::kTransmit || to == Mode::kNeighbourDiscovery ||
             to == Mode::kCharge;
    case Mode::kTransmit:
      return to == Mode::kReceive || to == Mode::kNeighbourDiscovery ||
             to == Mode::kCharge;
    case Mode::kCharge:
      return to == Mode::kNeighbourDiscovery;
  }
  return false;
}

constexpr int kMaxRetries = 3;  // consecutive L2 failures before the drop

}  // namespace

Engine::Engine(SimConfig cfg) : cfg_(std::move(cfg)), traces_(cfg_.rl.lambda) {
  apply_baseline(cfg_);
  validate(cfg_);
  traces_ = EligibilityTraces(cfg_.rl.lambda);

  const int m = cfg_.sim.num_uavs;
  uavs_.resize(m);
  uav_cov_memo_.resize(m);
  prev_residual_.assign(m, cfg_.energy.initial_j);
  for (int i = 0; i < m; ++i) {
    UavState& u = uavs_[i];
    u.id = i;
    auto rng = substream(cfg_.sim.seed, Stream::kDeploy, static_cast<std::uint64_t>(i));
    const double rho = cfg_.domain.radius_m * std::sqrt(rng.uniform());
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    u.position = {rho * std::cos(theta), rho * std::sin(theta),
                  rng.uniform(cfg_.domain.h_min_m, cfg_.domain.h_max_m)};
    u.kinematics = {cfg_.mobility.mean_speed, cfg_.mobility.mean_direction,
                    cfg_.mobility.mean_pitch};
    u.battery = {cfg_.energy.initial_j, cfg_.energy.initial_j};
    u.mode = Mode::kNeighbourDiscovery;
    u.next_hello = 0;
    u.last_beta = cfg_.rl.beta_max;
    u.last_gamma = cfg_.rl.gamma_min;
  }
}

// ---- episode loop ----------------------------------------------------------

EpisodeResult Engine::run_episode() {
  EpisodeResult ep;
  ep.episode = episode_;
  std::set<int> fragmented_set;

  apply_scheduled_events();
  traces_.clear();
  inject_burst(ep);

  const Tick budget = cfg_.sim.episode_tick_budget;
  for (Tick t = 0; t < budget; ++t) {
    step_tick(ep, fragmented_set);
    ++ep.ticks_used;
    if (ep.delivered + ep.dropped >= ep.injected) break;
  }

  // unresolved packets at the budget: recorded as undelivered
  for (auto& u : uavs_) drop_episode_packets(u, &ep);

  ep.residual_j = network_residual_j();
  ep.fragmented_uavs = static_cast<int>(fragmented_set.size());
  ep.mean_q = mean_q_value();
  ++episode_;
  return ep;
}

void Engine::inject_burst(EpisodeResult& ep) {
  const auto source = pick_source();
  if (!source) return;  // whole fleet off the air
  next_source_ = (*source + 1) % cfg_.sim.num_uavs;
  UavState& src = uavs_[*source];
  for (int b = 0; b < cfg_.sim.burst_packets; ++b) {
    Packet pkt;
    pkt.id = packet_seq_++;
    pkt.source = *source;
    pkt.created_episode = episode_;
    pkt.path.push_back(*source);
    src.tx_queue.push_back(std::move(pkt));
    src.counters.pac_l3 += 1;
    ++ep.injected;
    ++total_injected_;
    ++in_flight_;
  }
}

std::optional<int> Engine::pick_source() const {
  const int m = cfg_.sim.num_uavs;
  for (int k = 0; k < m; ++k) {
    const int id = (next_source_ + k) % m;
    if (uavs_[id].present()) return id;
  }
  return std::nullopt;
}

void Engine::step_tick(EpisodeResult& ep, std::set<int>& fragmented_set) {
  ++tick_;
  coverage_memo_.clear();
  std::fill(uav_cov_memo_.begin(), uav_cov_memo_.end(), std::nullopt);
  for (const auto& u : uavs_) prev_residual_[u.id] = u.battery.residual_j;

  process_rejoin_queue();
  run_transitions(ep);
  run_charging();
  run_mobility();
  run_hello();
  refresh_candidates(fragmented_set);
  run_receive();
  run_transmit(ep, fragmented_set);

  if (cfg_.sim.audit) audit_tick(ep);
}

// ---- scenario events -------------------------------------------------------

void Engine::select_targets(const ScenarioEvent& ev, std::vector<int>& out) const {
  std::vector<int> pool;
  for (const auto& u : uavs_)
    if (u.present()) pool.push_back(u.id);
  if (pool.empty()) return;

  switch (ev.selector) {
    case ScenarioEvent::Selector::kExplicitIds:
      for (int id : ev.ids)
        if (uavs_[id].present()) out.push_back(id);
      return;
    case ScenarioEvent::Selector::kRandomFraction: {
      auto rng = substream(cfg_.sim.seed, Stream::kScenario,
                           static_cast<std::uint64_t>(episode_));
      std::size_t want = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(ev.fraction * pool.size())));
      want = std::min(want, pool.size());
      for (std::size_t k = 0; k < want; ++k) {
        const std::size_t pick = k + rng.below(pool.size() - k);
        std::swap(pool[k], pool[pick]);
        out.push_back(pool[k]);
      }
      std::sort(out.begin(), out.end());
      return;
    }
    case ScenarioEvent::Selector::kTopQHalf:
    case ScenarioEvent::Selector::kBottomQHalf: {
      std::sort(pool.begin(), pool.end(), [&](int a, int b) {
        const double qa = uavs_[a].qtable.best();
        const double qb = uavs_[b].qtable.best();
        return qa != qb ? qa > qb : a < b;
      });
      const std::size_t half = pool.size() / 2;
      if (ev.selector == ScenarioEvent::Selector::kTopQHalf)
        out.assign(pool.begin(), pool.begin() + half);
      else
        out.assign(pool.end() - half, pool.end());
      std::sort(out.begin(), out.end());
      return;
    }
  }
}

void Engine::apply_scheduled_events() {
  for (const auto& ev : cfg_.scenario) {
    if (ev.episode != episode_) continue;
    switch (ev.kind) {
      case ScenarioEvent::Kind::kSweepParam: {
        // config override mid-run; scenario list stays untouched
        auto events = cfg_.scenario;
        set_config_value(cfg_, ev.param, ev.value);
        cfg_.scenario = std::move(events);
        break;
      }
      case ScenarioEvent::Kind::kDepleteEnergy: {
        std::vector<int> targets;
        select_targets(ev, targets);
        for (int id : targets)
          uavs_[id].battery.residual_j =
              std::min(uavs_[id].battery.residual_j, 0.5 * cfg_.energy.threshold_j);
        break;
      }
      case ScenarioEvent::Kind::kFragment: {
        std::vector<int> targets;
        select_targets(ev, targets);
        for (int id : targets) make_absent(id, nullptr);
        const Tick back = tick_ + cfg_.ms_to_ticks(ev.duration_ms);
        if (ev.rejoin == ScenarioEvent::Rejoin::kAllAtOnce) {
          for (int id : targets) rejoin_queue_.push_back({back, id});
        } else {
          const Tick step = cfg_.ms_to_ticks(ev.stagger_ms);
          const std::size_t quarter = (targets.size() + 3) / 4;
          for (std::size_t i = 0; i < targets.size(); ++i) {
            const Tick offset = static_cast<Tick>(i / std::max<std::size_t>(1, quarter)) * step;
            rejoin_queue_.push_back({back + offset, targets[i]});
          }
        }
        break;
      }
    }
  }
}

void Engine::process_rejoin_queue() {
  for (auto it = rejoin_queue_.begin(); it != rejoin_queue_.end();) {
    if (it->tick <= tick_) {
      reenter(it->id, /*randomize_position=*/true);
      it = rejoin_queue_.erase(it);
    } else {
      ++it;
    }
  }
}

void Engine::make_absent(int id, EpisodeResult* ep) {
  UavState& u = uavs_[id];
  if (u.absent) return;
  u.absent = true;
  drop_episode_packets(u, ep);
  u.table.clear();
  for (auto& other : uavs_)
    if (other.id != id) other.table.erase(id);
}

void Engine::reenter(int id, bool randomize_position) {
  UavState& u = uavs_[id];
  if (cfg_.sim.audit) audit_transition(id, u.mode, Mode::kNeighbourDiscovery);
  u.absent = false;
  u.charging = false;
  u.fragmented = true;
  u.mode = Mode::kNeighbourDiscovery;
  u.next_hello = tick_;
  u.pause_left = 0;
  u.table.clear();
  if (randomize_position) {
    auto rng = substream(cfg_.sim.seed, Stream::kReentry,
                         static_cast<std::uint64_t>(id),
                         static_cast<std::uint64_t>(tick_));
    const double rho = cfg_.domain.radius_m * std::sqrt(rng.uniform());
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    u.position = {rho * std::cos(theta), rho * std::sin(theta),
                  rng.uniform(cfg_.domain.h_min_m, cfg_.domain.h_max_m)};
    u.kinematics = {cfg_.mobility.mean_speed, cfg_.mobility.mean_direction,
                    cfg_.mobility.mean_pitch};
  }
}

void Engine::drop_episode_packets(UavState& u, EpisodeResult* ep) {
  auto drain = [&](std::deque<Packet>& q) {
    for (auto it = q.begin(); it != q.end();) {
      if (it->created_episode == episode_) {
        if (ep) {
          ++ep->dropped;
        }
        ++total_dropped_;
        --in_flight_;
        it = q.erase(it);
      } else {
        ++it;
      }
    }
  };
  drain(u.rx_queue);
  drain(u.tx_queue);
}

// ---- tick sub-phases -------------------------------------------------------

void Engine::run_transitions(EpisodeResult& ep) {
  for (auto& u : uavs_) {
    if (u.absent && !u.charging) continue;  // frozen while out of the network
    const Mode from = u.mode;
    const Mode to = transition_mode(u, tick_, cfg_.energy.threshold_j);
    if (cfg_.sim.audit) audit_transition(u.id, from, to);
    if (to == Mode::kCharge && !u.charging) {
      u.mode = Mode::kCharge;
      u.charging = true;
      make_absent(u.id, &ep);
      continue;
    }
    u.mode = to;
  }
}

void Engine::run_charging() {
  for (auto& u : uavs_) {
    if (!u.charging) continue;
    u.battery = charge_step(u.battery, cfg_.tick_s(), cfg_.energy);
    if (u.battery.full()) reenter(u.id, /*randomize_position=*/true);
  }
}

void Engine::run_mobility() {
  const double dt = cfg_.tick_s();
  for (auto& u : uavs_) {
    if (!u.present()) continue;
    u.battery = debit(u.battery, flight_drain(dt, cfg_.energy));
    if (u.pause_left > 0) {  // kinematics frozen; relaying continues
      --u.pause_left;
      continue;
    }
    if (u.steer_rerandomize) {
      auto rng = substream(cfg_.sim.seed, Stream::kSteer,
                           static_cast<std::uint64_t>(u.id),
                           static_cast<std::uint64_t>(tick_));
      u.kinematics.direction = rng.uniform(cfg_.mobility.direction_bounds.lo,
                                           cfg_.mobility.direction_bounds.hi);
      u.steer_rerandomize = false;
    }
    auto rng = substream(cfg_.sim.seed, Stream::kMobility,
                         static_cast<std::uint64_t>(u.id),
                         static_cast<std::uint64_t>(tick_));
    const MobilityNoise noise{
        rng.uniform(cfg_.mobility.speed_bounds.lo, cfg_.mobility.speed_bounds.hi),
        rng.uniform(cfg_.mobility.direction_bounds.lo, cfg_.mobility.direction_bounds.hi),
        rng.uniform(cfg_.mobility.pitch_bounds.lo, cfg_.mobility.pitch_bounds.hi)};
    u.kinematics = gmm_step(u.kinematics, cfg_.mobility, noise);
    const Vec3 prev = u.position;
    const Vec3 raw = advance_position(prev, u.kinematics, dt);
    const Vec3 bounced = reflect_into_domain(raw, cfg_.domain);
    if ((bounced - raw).squaredNorm() > 0.0)
      u.kinematics = kinematics_from_displacement(bounced - prev, dt, u.kinematics.speed);
    u.position = bounced;
    u.pause_left = cfg_.pause_ticks();
  }
}

Sector Engine::sector_of(const UavState& u) const {
  Sector s;
  s.apex = u.position;
  const Vec3 to_tbs = tbs_ - u.position;
  const double dist = to_tbs.norm();
  s.axis = dist > 0.0 ? Vec3(to_tbs / dist) : Vec3::UnitX();
  s.radius_m = cfg_.radio_range_m;
  s.half_angle_rad = cfg_.discovery.sector_half_angle_rad;
  return s;
}

bool Engine::tbs_in_range(const UavState& u) const {
  return relative_distance(u.position, tbs_) <= cfg_.radio_range_m;
}

std::vector<int> Engine::candidate_ids_of(const UavState& u) const {
  std::vector<int> ids = u.table.candidate_ids();
  if (tbs_in_range(u)) ids.push_back(tbs_id());
  return ids;
}

int Engine::candidate_count_of(const UavState& u) const {
  return static_cast<int>(u.table.candidate_count()) + (tbs_in_range(u) ? 1 : 0);
}

void Engine::run_hello() {
  const Tick expiry = cfg_.expiry_ticks();
  for (auto& u : uavs_)
    if (u.present()) u.table.purge(tick_, expiry);

  for (auto& u : uavs_) {
    if (!u.present() || u.mode != Mode::kNeighbourDiscovery) continue;

    HelloMessage msg;
    msg.originator = u.id;
    msg.location = u.position;
    msg.residual_j = u.battery.residual_j;
    msg.prs_l2 = u.counters.ratio_l2();
    msg.prs_l3 = u.counters.ratio_l3();
    msg.beta = u.last_beta;
    msg.gamma = u.last_gamma;
    msg.best_q = u.qtable.best();

    // control plane: same-tick, loss-free delivery to everyone in range
    for (auto& v : uavs_) {
      if (v.id == u.id || !v.present()) continue;
      if (relative_distance(u.position, v.position) > cfg_.radio_range_m) continue;
      process_hello(v.table, msg, sector_of(v), tick_, expiry);
    }

    // the most urgent candidate link governs the next refresh
    LstResult agg = LstResult::same_distance();
    bool any_finite = false;
    for (int cid : u.table.candidate_ids()) {
      const UavState& c = uavs_[cid];
      const double dist = relative_distance(u.position, c.position);
      const auto rel = classify_relative_motion(u.position, u.kinematics,
                                                c.position, c.kinematics);
      const auto lst = link_sustenance_time(dist, u.kinematics.speed,
                                            c.kinematics.speed, rel,
                                            cfg_.radio_range_m,
                                            cfg_.collision.r_min_m);
      if (!lst.equidistant && (!any_finite || lst.seconds < agg.seconds)) {
        agg = lst;
        any_finite = true;
      }
    }
    u.next_hello = next_hello_interval(tick_, agg, cfg_.base_hello_ticks(),
                                       cfg_.max_hello_ticks(), cfg_.tick_s());
  }
}

void Engine::refresh_candidates(std::set<int>& fragmented_set) {
  for (auto& u : uavs_) {
    if (!u.present()) continue;
    const auto cand = u.table.candidate_ids();
    u.fragmented = cand.empty() && !tbs_in_range(u);
    if (u.fragmented) fragmented_set.insert(u.id);
    double worst = 0.0;
    for (int cid : cand)
      worst = std::max(worst, pairwise_collision(u, uavs_[cid]));
    u.p_coll = worst;
  }
}

double Engine::pairwise_collision(const UavState& a, const UavState& b) const {
  return collision_probability(relative_distance(a.position, b.position),
                               cfg_.collision);
}

void Engine::run_receive() {
  for (auto& u : uavs_) {
    if (!u.present() || u.mode != Mode::kReceive) continue;
    while (!u.rx_queue.empty()) {  // surveillance data moves to the tx queue
      u.tx_queue.push_back(std::move(u.rx_queue.front()));
      u.rx_queue.pop_front();
    }
  }
}

// ---- channel composition ----------------------------------------------------

std::vector<int> Engine::interferer_ids(int tx, int rx) const {
  std::vector<int> ids;
  for (const auto& u : uavs_) {
    if (u.id == tx || u.id == rx || !u.present()) continue;
    if (u.mode != Mode::kReceive && u.mode != Mode::kTransmit) continue;
    ids.push_back(u.id);
  }
  return ids;
}

namespace {
double horiz_dist(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x() - b.x(), a.y() - b.y());
}
}  // namespace

double Engine::link_coverage(int tx, int rx) {
  const auto key = std::make_pair(tx, rx);
  auto it = coverage_memo_.find(key);
  if (it != coverage_memo_.end()) return it->second;

  const Vec3 rx_pos = rx == tbs_id() ? tbs_ : uavs_[rx].position;
  const TransmitterView desired{horiz_dist(uavs_[tx].position, rx_pos),
                                uavs_[tx].position.z()};
  std::vector<TransmitterView> views;
  for (int id : interferer_ids(tx, rx))
    views.push_back({horiz_dist(uavs_[id].position, rx_pos), uavs_[id].position.z()});

  const double cov = coverage_probability(
      desired, views, cfg_.channel,
      substream(cfg_.sim.seed, Stream::kCoverage, static_cast<std::uint64_t>(tick_),
                static_cast<std::uint64_t>(tx), static_cast<std::uint64_t>(rx)));
  coverage_memo_[key] = cov;
  return cov;
}

double Engine::uav_coverage(UavState& u) {
  if (uav_cov_memo_[u.id]) return *uav_cov_memo_[u.id];
  double best = 0.0;
  for (int cid : candidate_ids_of(u)) best = std::max(best, link_coverage(u.id, cid));
  uav_cov_memo_[u.id] = best;
  return best;
}

double Engine::beta_of(UavState& u) {
  const double beta =
      adaptive_learning_rate(uav_coverage(u), cfg_.rl.beta_mode, cfg_.rl.beta_min,
                             cfg_.rl.beta_max, cfg_.rl.beta_fixed);
  u.last_beta = beta;
  return beta;
}

double Engine::gamma_of(const UavState& u) const {
  if (cfg_.rl.gamma_mode == GammaMode::kFixed) return cfg_.rl.gamma_fixed;
  return adaptive_discount_factor(candidate_count_of(u), cfg_.sim.num_uavs,
                                  cfg_.rl.gamma_min, cfg_.rl.gamma_max);
}

double Engine::sample_hop_sir(int tx, int rx) {
  auto rng = substream(cfg_.sim.seed, Stream::kFading, static_cast<std::uint64_t>(tick_),
                       static_cast<std::uint64_t>(tx), static_cast<std::uint64_t>(rx));
  const Vec3 rx_pos = rx == tbs_id() ? tbs_ : uavs_[rx].position;
  const TransmitterView desired{horiz_dist(uavs_[tx].position, rx_pos),
                                uavs_[tx].position.z()};
  const double desired_gain = sample_fading_gain(cfg_.channel.nakagami_m, rng);
  std::vector<TransmitterView> views;
  std::vector<double> gains;
  for (int id : interferer_ids(tx, rx)) {
    views.push_back({horiz_dist(uavs_[id].position, rx_pos), uavs_[id].position.z()});
    gains.push_back(sample_fading_gain(cfg_.channel.nakagami_m, rng));
  }
  return compute_sir(desired_gain, desired, gains, views, cfg_.channel.zeta,
                     cfg_.channel.noise_floor);
}

void Engine::traced_update(double reward, double max_q_next, double beta,
                           double gamma, UpdateKind kind) {
  for (const auto& [pair, e] : traces_.entries()) {
    if (e <= 0.0) continue;
    UavState& holder = uavs_[pair.first];
    const double q_old = holder.qtable.value(pair.second);
    const double q_new = q_update(q_old, reward, max_q_next, beta, gamma, e);
    holder.qtable.set(pair.second, q_new);
    if (on_q_update)
      on_q_update({pair.first, pair.second, q_old, q_new, reward, max_q_next,
                   beta, gamma, e, kind});
  }
}

// ---- forwarding -------------------------------------------------------------

void Engine::run_transmit(EpisodeResult& ep, std::set<int>& fragmented_set) {
  const Constraints constraints{cfg_.energy.threshold_j, cfg_.channel.p_cov_threshold,
                                cfg_.collision.p_coll_threshold, cfg_.collision.r_min_m};

  for (auto& u : uavs_) {
    if (!u.present() || u.mode != Mode::kTransmit || u.tx_queue.empty()) continue;
    Packet& pkt = u.tx_queue.front();

    std::vector<Candidate> cands;
    for (int cid : u.table.candidate_ids()) {
      const UavState& c = uavs_[cid];
      const auto* rec = u.table.find(cid);
      const double dist = relative_distance(u.position, c.position);
      Candidate cand;
      cand.id = cid;
      cand.q = u.qtable.value(cid);
      cand.residual_j = rec->hello.residual_j;
      cand.coverage = link_coverage(u.id, cid);
      cand.p_coll = pairwise_collision(u, c);
      cand.dist_m = dist;
      cand.axis_divergence = [&] {
        const Vec3 to_c = c.position - u.position;
        const Vec3 axis = tbs_ - u.position;
        const double n = to_c.norm() * axis.norm();
        if (n <= 0.0) return 0.0;
        return std::acos(std::clamp(to_c.dot(axis) / n, -1.0, 1.0));
      }();
      cand.on_path = pkt.visited(cid);
      // separation-violation remedy: excluded by feasibility AND steered away
      if (dist < cfg_.collision.r_min_m) uavs_[cid].steer_rerandomize = true;
      cands.push_back(cand);
    }
    if (tbs_in_range(u)) {
      Candidate tbs;
      tbs.id = tbs_id();
      tbs.q = u.qtable.value(tbs_id());
      tbs.residual_j = std::numeric_limits<double>::infinity();
      tbs.coverage = link_coverage(u.id, tbs_id());
      tbs.dist_m = relative_distance(u.position, tbs_);
      tbs.infrastructure = true;
      cands.push_back(tbs);
    }

    auto rng = substream(cfg_.sim.seed, Stream::kPolicy,
                         static_cast<std::uint64_t>(u.id),
                         static_cast<std::uint64_t>(tick_));
    const auto sel = select_next_hop(cands, cfg_.rl.epsilon, rng, constraints);

    if (!sel) {
      // no feasible next hop: fragmentation signal, zero reward, keep trying
      u.fragmented = true;
      fragmented_set.insert(u.id);
      traced_update(0.0, 0.0, beta_of(u), gamma_of(u), UpdateKind::kFailure);
      continue;
    }

    const double beta = beta_of(u);
    const double gamma = gamma_of(u);
    traces_.visit({u.id, sel->id}, sel->greedy, beta);

    const double sir = sample_hop_sir(u.id, sel->id);
    const bool success = sir >= cfg_.channel.sir_threshold;
    if (on_hop) on_hop({tick_, u.id, sel->id, success, sir});
    u.counters.pac_l2 += 1;

    if (!success) {
      pkt.retries += 1;
      if (pkt.retries >= kMaxRetries) {
        traced_update(0.0, 0.0, beta, gamma, UpdateKind::kFailure);
        u.tx_queue.pop_front();
        ++ep.dropped;
        ++total_dropped_;
        --in_flight_;
      }
      continue;
    }

    // L2 delivery
    u.counters.ack_l2 += 1;
    const double dist = relative_distance(
        u.position, sel->id == tbs_id() ? tbs_ : uavs_[sel->id].position);
    u.battery = debit(u.battery, transmission_energy(pkt.bits, dist, cfg_.energy));
    pkt.retries = 0;
    pkt.path.push_back(sel->id);

    if (sel->id == tbs_id()) {
      // end-to-end delivery: L3 ack at the source, terminal update
      const StateSnapshot terminal_state{1.0, 1.0, 1.0, link_coverage(u.id, tbs_id()), 0.0};
      const double reward = compute_reward(terminal_state, 1, cfg_.rl.weights);
      ep.reward += reward;
      traced_update(reward, 0.0, beta, gamma, UpdateKind::kTerminal);
      uavs_[pkt.source].counters.ack_l3 += 1;
      u.tx_queue.pop_front();
      ++ep.delivered;
      ++total_delivered_;
      --in_flight_;
      continue;
    }

    UavState& j = uavs_[sel->id];
    const StateSnapshot snap{j.battery.normalized(), j.counters.ratio_l2(),
                             j.counters.ratio_l3(), link_coverage(u.id, j.id),
                             j.p_coll};
    const double reward = compute_reward(snap, candidate_count_of(j), cfg_.rl.weights);
    ep.reward += reward;
    traced_update(reward, j.qtable.best(), beta, gamma, UpdateKind::kRelay);

    if (static_cast<int>(pkt.path.size()) - 1 >= cfg_.rl.max_hops) {
      // hop budget exhausted: counted as an end-to-end failure at the source
      traced_update(0.0, 0.0, beta, gamma, UpdateKind::kFailure);
      u.tx_queue.pop_front();
      ++ep.dropped;
      ++total_dropped_;
      --in_flight_;
      continue;
    }

    j.rx_queue.push_back(std::move(pkt));
    u.tx_queue.pop_front();
  }
}

// ---- accounting -------------------------------------------------------------

double Engine::network_residual_j() const {
  double total = 0.0;
  for (const auto& u : uavs_) total += u.battery.residual_j;
  return total;
}

double Engine::mean_q_value() const {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const auto& u : uavs_) {
    for (const auto& [a, q] : u.qtable.entries()) {
      sum += q;
      ++n;
    }
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

// ---- audits ------------------------------------------------------------------

void Engine::audit_transition(int id, Mode from, Mode to) const {
  if (!allowed_edge(from, to))
    throw SimError("mode transition outside the allowed edge set: uav " +
                   std::to_string(id) + " " + to_string(from) + " -> " +
                   to_string(to));
}

void Engine::audit_tick(const EpisodeResult& ep) const {
  (void)ep;
  const double cap = cfg_.energy.initial_j;
  double total = 0.0;

  // records may be up to expiry old; both ends can move in the meantime
  const double slack = 2.0 * cfg_.mobility.speed_bounds.hi *
                       static_cast<double>(cfg_.expiry_ticks()) * cfg_.tick_s();

  for (const auto& u : uavs_) {
    if (u.battery.residual_j < -1e-9 || u.battery.residual_j > cap + 1e-9)
      throw SimError("battery out of range: uav " + std::to_string(u.id));
    total += u.battery.residual_j;

    if (u.counters.ack_l2 > u.counters.pac_l2 || u.counters.ack_l3 > u.counters.pac_l3)
      throw SimError("ack exceeds transmissions: uav " + std::to_string(u.id));

    if (u.charging) {
      if (u.battery.residual_j + 1e-9 < prev_residual_[u.id])
        throw SimError("charging battery decreased: uav " + std::to_string(u.id));
    } else if (u.battery.residual_j > prev_residual_[u.id] + 1e-9) {
      throw SimError("airborne battery increased: uav " + std::to_string(u.id));
    }

    if (u.mode == Mode::kCharge && !u.absent)
      throw SimError("charging uav still in the airspace: uav " + std::to_string(u.id));

    for (const auto& [nid, rec] : u.table.records()) {
      if (nid == u.id) throw SimError("uav is its own neighbour: " + std::to_string(u.id));
      if (uavs_[nid].absent)
        throw SimError("absent uav in a neighbour table: " + std::to_string(nid));
      if (tick_ - rec.last_heard > cfg_.expiry_ticks())
        throw SimError("stale neighbour record survived the purge: uav " +
                       std::to_string(u.id));
      if (relative_distance(u.position, uavs_[nid].position) >
          cfg_.radio_range_m + slack)
        throw SimError("neighbour record beyond radio range: uav " +
                       std::to_string(u.id));
    }

    for (const auto& pkt : u.tx_queue)
      if (static_cast<int>(pkt.path.size()) > cfg_.rl.max_hops + 1)
        throw SimError("packet path exceeds the hop budget");
  }

  if (total > cap * static_cast<double>(cfg_.sim.num_uavs) + 1e-6)
    throw SimError("network residual energy exceeds fleet capacity");

  if (total_injected_ != total_delivered_ + total_dropped_ + in_flight_)
    throw SimError("packet conservation violated");
}

}  // namespace iqmr
