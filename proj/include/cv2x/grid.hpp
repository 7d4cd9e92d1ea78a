#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cv2x {

// A transmission either uses the deterministic slot of the own PosIndex or,
// once per run of w transmissions, a slot from the random window.
enum class TxMode { normal, random };

// Geometry of one resource pool: all sub-channels of the SF consecutive 1 ms
// sub-frames spanning one beacon period, plus the randomization constants
// that go with the packet rate.
struct PoolConfig {
  int lambda = 10;  // packets per second
  int sf = 100;     // sub-frames per pool, 1000 / lambda
  int sc = 4;       // sub-channels per sub-frame
  int n = 400;      // total sub-channels per pool, sf * sc
  int m = 5;        // half-width of the random transmission window
  int w_min = 5;    // bounds of the normal-mode run length
  int w_max = 15;

  // Long-run fraction of transmissions done on a randomly drawn sub-channel.
  double p_random() const { return 2.0 / (w_min + w_max); }
  double p_normal() const { return 1.0 - p_random(); }
  int period_ms() const { return sf; }
};

struct ResourceAssignment {
  int sf = 0;  // sub-frame index in the pool
  int sc = 0;  // first sub-channel index
  int np = 1;  // number of occupied sub-channels

  bool overlaps(const ResourceAssignment& other) const {
    return sf == other.sf && sc < other.sc + other.np && other.sc < sc + np;
  }
  bool operator==(const ResourceAssignment& other) const = default;
};

inline PoolConfig pool_dims(int lambda, int sc) {
  if (sc < 1) throw std::invalid_argument("sub-channels per sub-frame must be >= 1");
  PoolConfig cfg;
  cfg.lambda = lambda;
  cfg.sc = sc;
  switch (lambda) {
    case 10: cfg.m = 5; cfg.w_min = 5;  cfg.w_max = 15; break;
    case 20: cfg.m = 2; cfg.w_min = 10; cfg.w_max = 30; break;
    case 50: cfg.m = 1; cfg.w_min = 25; cfg.w_max = 75; break;
    default:
      throw std::invalid_argument("unsupported packet rate: " + std::to_string(lambda) +
                                  " pps (supported: 10, 20, 50)");
  }
  cfg.sf = 1000 / lambda;
  cfg.n = cfg.sf * cfg.sc;
  return cfg;
}

inline void check_pos_index(int pi, const PoolConfig& cfg) {
  if (pi < 0 || pi >= cfg.n)
    throw std::domain_error("PosIndex " + std::to_string(pi) + " outside [0, " +
                            std::to_string(cfg.n) + ")");
}

/// Sub-frame of the pool used by PosIndex `pi`.
inline int subframe_of(int pi, const PoolConfig& cfg) {
  check_pos_index(pi, cfg);
  return pi % cfg.sf;
}

/// First sub-channel used by PosIndex `pi` for a packet occupying `np`
/// sub-channels. Columns are interleaved so that PosIndices sharing a
/// sub-frame land on sub-channels as far apart as possible.
inline int first_subchannel(int pi, int np, const PoolConfig& cfg) {
  check_pos_index(pi, cfg);
  if (np < 1 || np > cfg.sc)
    throw std::domain_error("packet occupies " + std::to_string(np) +
                            " sub-channels but the sub-frame has " + std::to_string(cfg.sc));
  const int r = (pi / cfg.sf) % (cfg.sc / np);
  return (2 * r * np) % cfg.sc + ((2 * r * np) / cfg.sc) * np;
}

inline ResourceAssignment assignment_for(int pi, int np, const PoolConfig& cfg) {
  return ResourceAssignment{subframe_of(pi, cfg), first_subchannel(pi, np, cfg), np};
}

// Center of the random transmission window for PosIndex `pi`. The window sits
// half a pool away; with an even sub-channel count it is additionally shifted
// by half a sub-frame stride so a random transmission can never land next to
// the sub-frame of the vehicle's own slot.
inline int random_center(int pi, const PoolConfig& cfg) {
  check_pos_index(pi, cfg);
  int center = pi + (cfg.n + 1) / 2;
  if (cfg.sc % 2 == 0) center -= cfg.sf / 2;
  return ((center % cfg.n) + cfg.n) % cfg.n;
}

/// The 2M+1 PosIndex values centered at `center`, modulo `n`.
inline std::vector<int> window_set(int center, int m, int n) {
  if (center < 0 || center >= n) throw std::domain_error("window center outside pool");
  if (2 * m + 1 > n) throw std::domain_error("window wider than the pool");
  std::vector<int> out;
  out.reserve(2 * m + 1);
  for (int off = -m; off <= m; ++off) out.push_back(((center + off) % n + n) % n);
  return out;
}

/// True if `value` lies in the 2M+1-wide window centered at `center` (mod n).
inline bool in_window(int value, int center, int m, int n) {
  const int d = ((value - center) % n + n) % n;
  return d <= m || d >= n - m;
}

/// PosIndex difference implied by a distance along the road: nearest integer
/// of beta*distance (half away from zero), then modulo n.
inline int delta_pi(double distance_m, double beta_veh_per_m, int n) {
  const long long r = static_cast<long long>(std::round(beta_veh_per_m * distance_m));
  return static_cast<int>(((r % n) + n) % n);
}

}  // namespace cv2x
