#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cv2x/grid.hpp"
#include "cv2x/phy.hpp"
#include "cv2x/rng.hpp"

namespace cv2x {

// A decoded sidelink control message: the sender reserves `np` sub-channels
// starting at `sc` every `rri_ms` from the sub-frame it was heard in.
struct SciRecord {
  int sc = 0;
  int np = 1;
  int rri_ms = 100;
  double rsrp_dbm = 0.0;
};

// Ring buffer over the previous 1000 sub-frames: per sub-channel energy,
// decoded reservations, and a flag for sub-frames the vehicle spent
// transmitting (half-duplex, nothing was sensed).
class SensingHistory {
 public:
  static constexpr int kDepth = 1000;

  SensingHistory() = default;
  SensingHistory(int sc, double noise_floor_mw)
      : sc_(sc), noise_floor_mw_(noise_floor_mw), rssi_mw_(kDepth * sc, 0.0),
        own_tx_(kDepth, 0), recorded_(kDepth, 0), scis_(kDepth) {}

  int subchannels() const { return sc_; }

  /// Opens the ring slot for sub-frame `t`: idle level is the noise floor.
  void advance(std::int64_t t) {
    const int i = idx(t);
    newest_ = t;
    own_tx_[i] = 0;
    recorded_[i] = 1;
    scis_[i].clear();
    std::fill_n(rssi_mw_.begin() + static_cast<std::ptrdiff_t>(i) * sc_, sc_, noise_floor_mw_);
  }

  void add_energy(std::int64_t t, int sc_first, int np, double per_subchannel_mw) {
    const int i = idx(t);
    for (int c = sc_first; c < sc_first + np && c < sc_; ++c)
      rssi_mw_[static_cast<std::ptrdiff_t>(i) * sc_ + c] += per_subchannel_mw;
  }

  void add_sci(std::int64_t t, const SciRecord& sci) { scis_[idx(t)].push_back(sci); }

  void mark_own_tx(std::int64_t t) { own_tx_[idx(t)] = 1; }

  bool in_window(std::int64_t t) const {
    return t >= 0 && t <= newest_ && newest_ - t < kDepth;
  }
  bool known(std::int64_t t) const { return in_window(t) && recorded_[idx(t)] && !own_tx_[idx(t)]; }
  bool own_tx(std::int64_t t) const { return in_window(t) && own_tx_[idx(t)]; }

  double rssi_dbm(std::int64_t t, int sc) const {
    return mw_to_dbm(rssi_mw_[static_cast<std::ptrdiff_t>(idx(t)) * sc_ + sc]);
  }

  /// Linear-average RSSI over `np` sub-channels of one sensed sub-frame.
  double avg_rssi_mw(std::int64_t t, int sc_first, int np) const {
    double sum = 0.0;
    for (int c = sc_first; c < sc_first + np; ++c)
      sum += rssi_mw_[static_cast<std::ptrdiff_t>(idx(t)) * sc_ + c];
    return sum / np;
  }

  const std::vector<SciRecord>& scis(std::int64_t t) const { return scis_[idx(t)]; }

 private:
  int idx(std::int64_t t) const { return static_cast<int>(t % kDepth); }

  int sc_ = 0;
  double noise_floor_mw_ = 0.0;
  std::int64_t newest_ = -1;
  std::vector<double> rssi_mw_;
  std::vector<std::uint8_t> own_tx_;
  std::vector<std::uint8_t> recorded_;
  std::vector<std::vector<SciRecord>> scis_;
};

struct Reservation {
  std::int64_t next_tx = 0;  // absolute sub-frame of the next reserved slot
  int sc = 0;
  int np = 1;
  int counter = 0;  // remaining transmissions before reselection
};

inline int draw_reselection_counter(const PoolConfig& cfg, Rng& rng) {
  // The standard's counter ranges coincide with the normal-mode run bounds:
  // [5,15], [10,30], [25,75] for 10/20/50 pps.
  return uniform_int(rng, cfg.w_min, cfg.w_max);
}

/// Decrements the counter after a transmission. Returns true while the
/// reservation remains valid; at zero the vehicle must pick new resources
/// (the keep-probability P is configured to 0).
inline bool tick_reservation(Reservation& res) {
  res.counter -= 1;
  return res.counter > 0;
}

namespace detail {
struct Csr {
  int offset;  // sub-frames after the selection time, 1..SF
  int sc;
  double avg_rssi_mw = 0.0;
  int rssi_samples = 0;
  bool excluded = false;
  std::uint32_t tie = 0;
};
}  // namespace detail

// Single-subframe candidate resource selection following the Release 14
// sensing procedure: enumerate all CSRs in the selection window, drop those
// covered by a decoded reservation above the RSRP threshold (escalating the
// threshold in 3 dB steps until at least 20% survive), keep the 20% with the
// lowest average RSSI, and draw one uniformly.
inline Reservation select_csr(const SensingHistory& history, int np, std::int64_t now,
                              const PoolConfig& cfg, Rng& rng,
                              double rsrp_threshold_dbm = -120.0) {
  if (np < 1 || np > cfg.sc) throw std::domain_error("packet does not fit in a sub-frame");
  const int window = cfg.sf;  // selection window length = max latency = one period
  const int positions = cfg.sc - np + 1;
  const int total = window * positions;
  const int quota = (total + 4) / 5;  // ceil(20%)

  std::vector<detail::Csr> csrs;
  csrs.reserve(total);
  for (int off = 1; off <= window; ++off)
    for (int sc = 0; sc < positions; ++sc) csrs.push_back({off, sc});

  // Average RSSI per CSR over the sensed sub-frames one reservation period
  // apart; sub-frames the vehicle spent transmitting are unknown and skipped.
  const int j_max = SensingHistory::kDepth / cfg.sf;
  for (detail::Csr& c : csrs) {
    double sum = 0.0;
    int count = 0;
    for (int j = 1; j <= j_max; ++j) {
      const std::int64_t t = now + c.offset - static_cast<std::int64_t>(j) * cfg.sf;
      if (!history.known(t)) continue;
      sum += history.avg_rssi_mw(t, c.sc, np);
      ++count;
    }
    c.avg_rssi_mw = count > 0 ? sum / count : -1.0;  // unknown: most favorable
    c.rssi_samples = count;
    c.tie = static_cast<std::uint32_t>(rng());
  }

  // Decoded reservations repeat every rri_ms; with everyone on the same
  // period a reservation heard at t collides with a CSR exactly when their
  // sub-frames match modulo the period.
  struct Blocker {
    int stride;
    int offset_mod;
    int sc;
    int np;
    double rsrp_dbm;
  };
  std::vector<Blocker> blockers;
  for (std::int64_t t = now - SensingHistory::kDepth + 1; t <= now; ++t) {
    if (!history.in_window(t) || !history.known(t)) continue;
    for (const SciRecord& sci : history.scis(t)) {
      const int stride = sci.rri_ms;  // sub-frames per reservation interval
      const int mod = static_cast<int>(((t - now) % stride + stride) % stride);
      blockers.push_back({stride, mod, sci.sc, sci.np, sci.rsrp_dbm});
    }
  }

  double threshold = rsrp_threshold_dbm;
  int admitted = 0;
  while (true) {
    for (detail::Csr& c : csrs) c.excluded = false;
    for (const Blocker& b : blockers) {
      if (b.rsrp_dbm <= threshold) continue;
      for (detail::Csr& c : csrs) {
        if (c.excluded) continue;
        // The CSR is hit when its sub-frame falls on the reservation's grid.
        const bool same_phase = c.offset % b.stride == b.offset_mod;
        const bool overlap = c.sc < b.sc + b.np && b.sc < c.sc + np;
        if (same_phase && overlap) c.excluded = true;
      }
    }
    admitted = 0;
    for (const detail::Csr& c : csrs)
      if (!c.excluded) ++admitted;
    if (admitted * 5 >= total) break;
    threshold += 3.0;
  }

  std::vector<const detail::Csr*> l1;
  l1.reserve(admitted);
  for (const detail::Csr& c : csrs)
    if (!c.excluded) l1.push_back(&c);

  // L2: the 20% of all CSRs with the lowest average RSSI. Ties (common while
  // the sensing window is still empty) break by a per-selection random key so
  // cold starts do not cluster on the earliest sub-frames.
  std::sort(l1.begin(), l1.end(), [](const detail::Csr* a, const detail::Csr* b) {
    if (a->avg_rssi_mw != b->avg_rssi_mw) return a->avg_rssi_mw < b->avg_rssi_mw;
    return a->tie < b->tie;
  });
  const int l2_size = std::min<int>(quota, static_cast<int>(l1.size()));
  const detail::Csr* pick = l1[uniform_int(rng, 0, l2_size - 1)];

  Reservation res;
  res.next_tx = now + pick->offset;
  res.sc = pick->sc;
  res.np = np;
  res.counter = draw_reselection_counter(cfg, rng);
  return res;
}

}  // namespace cv2x
