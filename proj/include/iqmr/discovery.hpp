#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "iqmr/geometry.hpp"
#include "iqmr/link_metrics.hpp"

namespace iqmr {

using Tick = std::int64_t;

/// Snapshot a UAV advertises about itself every hello.
struct HelloMessage {
  int originator = -1;
  Vec3 location = Vec3::Zero();
  double residual_j = 0.0;
  double prs_l2 = 0.0;  // per-layer running delivery ratios
  double prs_l3 = 0.0;
  double beta = 1.0;
  double gamma = 0.1;
  double best_q = 0.0;  // max Q toward the base station, 0 for a fresh table
};

struct NeighbourRecord {
  HelloMessage hello;
  Tick last_heard = 0;
  bool candidate = false;  // inside the forwarding sector when last heard
};

/// Forwarding sector: cone of half_angle around the apex->TBS axis, capped at
/// the radio range. Candidates must sit inside it so every hop makes progress
/// toward the base station.
struct Sector {
  Vec3 apex = Vec3::Zero();
  Vec3 axis = Vec3::UnitX();  // unit vector toward the destination
  double radius_m = 250.0;
  double half_angle_rad = M_PI / 4.0;
};

/// Inclusive membership test: within radius AND within half_angle of the
/// axis. A point at the apex counts as inside (zero divergence).
inline bool in_sector(const Vec3& point, const Sector& sector) {
  const Vec3 offset = point - sector.apex;
  const double dist = offset.norm();
  // tiny slack keeps both boundaries inclusive under fp rounding
  if (dist > sector.radius_m * (1.0 + 1e-12) + 1e-12) return false;
  if (dist <= 0.0) return true;
  const double cosang =
      std::clamp(offset.dot(sector.axis) / dist, -1.0, 1.0);
  return std::acos(cosang) <= sector.half_angle_rad + 1e-9;
}

/// Per-UAV neighbour table: every heard node, with the in-sector subset
/// flagged as candidates. Records expire when not refreshed within the hello
/// expiry window.
class NeighbourTable {
 public:
  /// Upsert on hello receipt; refreshes last_heard and the candidate flag.
  void observe(const HelloMessage& msg, bool candidate, Tick now) {
    auto& rec = records_[msg.originator];
    rec.hello = msg;
    rec.last_heard = now;
    rec.candidate = candidate;
  }

  /// Drop records older than the expiry window.
  void purge(Tick now, Tick expiry_ticks) {
    std::erase_if(records_, [&](const auto& kv) {
      return now - kv.second.last_heard > expiry_ticks;
    });
  }

  void erase(int id) { records_.erase(id); }
  void clear() { records_.clear(); }

  bool contains(int id) const { return records_.count(id) != 0; }
  std::size_t size() const { return records_.size(); }

  const NeighbourRecord* find(int id) const {
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
  }

  /// Candidate ids in ascending order (deterministic iteration).
  std::vector<int> candidate_ids() const {
    std::vector<int> out;
    for (const auto& [id, rec] : records_)
      if (rec.candidate) out.push_back(id);
    return out;
  }

  std::size_t candidate_count() const {
    std::size_t n = 0;
    for (const auto& [id, rec] : records_) n += rec.candidate ? 1 : 0;
    return n;
  }

  const std::map<int, NeighbourRecord>& records() const { return records_; }

 private:
  std::map<int, NeighbourRecord> records_;
};

/// Fold one received hello into the table: in-sector senders become
/// candidates, others stay plain neighbours; stale records are purged.
inline void process_hello(NeighbourTable& table, const HelloMessage& msg,
                          const Sector& sector, Tick now, Tick expiry_ticks) {
  table.observe(msg, in_sector(msg.location, sector), now);
  table.purge(now, expiry_ticks);
}

/// Next hello tick. A finite link sustenance time drives the interval (the
/// sooner a link may break, the sooner the next refresh), clamped into
/// [base, max]. The equidistant marker repeats the base interval.
inline Tick next_hello_interval(Tick now, const LstResult& lst,
                                Tick base_ticks, Tick max_ticks,
                                double tick_seconds) {
  if (lst.equidistant) return now + base_ticks;
  const Tick lst_ticks =
      static_cast<Tick>(std::llround(lst.seconds / tick_seconds));
  return now + std::clamp(lst_ticks, base_ticks, max_ticks);
}

}  // namespace iqmr
