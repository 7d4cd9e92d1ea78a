#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "cv2x/grid.hpp"
#include "cv2x/rng.hpp"

namespace cv2x {

// Everything a vehicle remembers about a neighbor, taken from that neighbor's
// most recent decoded beacon. All receivers of the same beacon hold identical
// records, which is what makes the distributed queue consistent.
struct NeighborRecord {
  int id = 0;
  double x_m = 0.0;          // position along the road in the last beacon
  double y_m = 0.0;          // signed lateral offset
  double speed_mps = 0.0;    // signed road speed
  double timestamp_ms = 0.0; // beacon generation time
  int pos_index = 0;
  std::uint32_t rx_bitmap = 0;  // bit k set: a beacon arrived k periods ago

  static constexpr std::uint32_t kWindowMask = 0x3FF;  // last ten periods
  bool eligible() const { return (rx_bitmap & kWindowMask) != 0; }
  void start_new_period() { rx_bitmap = (rx_bitmap << 1) & kWindowMask; }
  void mark_received() { rx_bitmap |= 1u; }
};

/// Dead-reckons a neighbor to `now` from its last beacon contents. Pure in
/// the beacon fields, so every receiver obtains the same estimate.
inline double estimate_position(const NeighborRecord& r, double now_ms) {
  return r.x_m + r.speed_mps * (now_ms - r.timestamp_ms) * 1e-3;
}

struct QueueEntry {
  int id = 0;
  int pos_index = 0;
  double distance_m = 0.0;  // to the vehicle building the queue
  double est_x_m = 0.0;
};

// Preceding vehicles (strictly ahead along the road axis), nearest first.
// Ties in estimated position break by ascending id so that every vehicle
// derives the same order no matter how its records are stored.
inline std::vector<QueueEntry> build_queue(double self_x_m, double self_y_m,
                                           std::span<const NeighborRecord> neighbors,
                                           double now_ms) {
  std::vector<QueueEntry> queue;
  for (const NeighborRecord& r : neighbors) {
    if (!r.eligible()) continue;
    const double ex = estimate_position(r, now_ms);
    if (ex <= self_x_m) continue;
    queue.push_back({r.id, r.pos_index, std::hypot(ex - self_x_m, r.y_m - self_y_m), ex});
  }
  std::sort(queue.begin(), queue.end(), [](const QueueEntry& a, const QueueEntry& b) {
    if (a.est_x_m != b.est_x_m) return a.est_x_m < b.est_x_m;
    return a.id < b.id;
  });
  return queue;
}

struct SchedulerState {
  int pos_index = 0;
  int window_countdown = 1;  // transmissions left before the next random one
};

struct GeoWeights {
  double mu = 10.0;
  double eta = 0.1;  // per meter
};

// Picks the PosIndex that the largest distance-weighted set of predecessors
// implies. Each predecessor u (1-based, nearest first) votes for
// (PI_u + u) mod N with weight mu + eta * distance; a far predecessor with a
// settled PosIndex can therefore outvote a couple of stale nearby ones.
inline int compute_posindex(std::span<const QueueEntry> preceding_nearest_first,
                            int current_pos_index, const PoolConfig& cfg,
                            const GeoWeights& w = {}) {
  if (preceding_nearest_first.empty()) return current_pos_index;

  struct Candidate {
    int pi;
    double score;
  };
  std::vector<Candidate> candidates;
  for (size_t u = 1; u <= preceding_nearest_first.size(); ++u) {
    const QueueEntry& e = preceding_nearest_first[u - 1];
    const int cand = static_cast<int>((e.pos_index + u) % cfg.n);
    const double weight = w.mu + w.eta * e.distance_m;
    auto it = std::find_if(candidates.begin(), candidates.end(),
                           [cand](const Candidate& c) { return c.pi == cand; });
    if (it == candidates.end())
      candidates.push_back({cand, weight});
    else
      it->score += weight;
  }
  // Strict comparison: a tie keeps the candidate proposed by the nearer
  // predecessor, which appears earlier in the list.
  const Candidate* best = &candidates.front();
  for (const Candidate& c : candidates)
    if (c.score > best->score) best = &c;
  return best->pi;
}

/// Advances the normal/random alternation by one transmission. When the
/// countdown hits zero this transmission is the random one and a fresh run
/// length is drawn uniformly from [w_min, w_max].
inline TxMode next_mode(SchedulerState& state, const PoolConfig& cfg, Rng& rng) {
  state.window_countdown -= 1;
  if (state.window_countdown <= 0) {
    state.window_countdown = uniform_int(rng, cfg.w_min, cfg.w_max);
    return TxMode::random;
  }
  return TxMode::normal;
}

/// Maps the scheduler state to a concrete slot. Normal mode is the
/// deterministic slot of the own PosIndex; random mode draws uniformly from
/// the random transmission window, which by construction never contains the
/// own slot. The beacon itself still carries the vehicle's PosIndex.
inline ResourceAssignment select_assignment(const SchedulerState& state, TxMode mode, int np,
                                            const PoolConfig& cfg, Rng& rng) {
  if (mode == TxMode::normal) return assignment_for(state.pos_index, np, cfg);
  const std::vector<int> window = window_set(random_center(state.pos_index, cfg), cfg.m, cfg.n);
  const int pick = window[uniform_int(rng, 0, static_cast<int>(window.size()) - 1)];
  return assignment_for(pick, np, cfg);
}

}  // namespace cv2x
