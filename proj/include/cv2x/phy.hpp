#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "cv2x/rng.hpp"

namespace cv2x {

enum class PacketClass { hf, lf };

inline int subchannels_for(PacketClass cls) { return cls == PacketClass::hf ? 1 : 2; }
inline const char* to_string(PacketClass cls) { return cls == PacketClass::hf ? "HF" : "LF"; }

struct RadioConfig {
  double tx_power_dbm = 23.0;
  double carrier_ghz = 5.9;          // informational
  double channel_mhz = 10.0;         // informational
  int rb_per_subchannel = 12;
  double rb_bandwidth_hz = 180e3;
  double noise_figure_db = 9.0;
  double sensing_threshold_dbm = -90.4;
  double shadowing_sigma_db = 3.0;
  double shadowing_decorr_m = 25.0;

  // Dual-slope log-distance pathloss.
  double pl_intercept_db = 41.1;
  double pl_slope_db_decade = 22.7;
  double pl_breakpoint_m = 160.0;
  double pl_slope2_db_decade = 40.0;
  double pl_min_distance_m = 1.0;

  // In-band emission mask: attenuation (dB, negative) of the leakage reaching
  // a victim offset by 1, 2, ... sub-channels. Empty means no leakage at all.
  std::vector<double> ibe_mask_db;
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) {
  return mw > 0.0 ? 10.0 * std::log10(mw) : -std::numeric_limits<double>::infinity();
}

/// Noise power over a packet occupying np sub-channels, in dBm.
inline double noise_power_dbm(int np, const RadioConfig& cfg) {
  const double bw = np * cfg.rb_per_subchannel * cfg.rb_bandwidth_hz;
  return -174.0 + 10.0 * std::log10(bw) + cfg.noise_figure_db;
}

/// Deterministic pathloss in dB at distance d (clamped to the configured minimum).
inline double path_loss_db(double d_m, const RadioConfig& cfg) {
  d_m = std::max(d_m, cfg.pl_min_distance_m);
  if (d_m <= cfg.pl_breakpoint_m)
    return cfg.pl_intercept_db + cfg.pl_slope_db_decade * std::log10(d_m);
  return cfg.pl_intercept_db + cfg.pl_slope_db_decade * std::log10(cfg.pl_breakpoint_m) +
         cfg.pl_slope2_db_decade * std::log10(d_m / cfg.pl_breakpoint_m);
}

/// Leakage attenuation for an interferer `offset` sub-channels away from the
/// victim. Offset 0 is co-channel; outside the configured mask nothing leaks.
inline double ibe_attenuation_db(int offset, const RadioConfig& cfg) {
  if (offset == 0) return 0.0;
  offset = std::abs(offset);
  if (cfg.ibe_mask_db.empty() || offset > static_cast<int>(cfg.ibe_mask_db.size()))
    return -std::numeric_limits<double>::infinity();
  return cfg.ibe_mask_db[offset - 1];
}

// Block error rate vs SNR, one monotone point list per packet class. Linear
// interpolation between points, saturation outside.
class BlerTable {
 public:
  struct Point {
    double snr_db;
    double bler;
  };

  void set_curve(PacketClass cls, std::vector<Point> points) {
    if (points.empty()) throw std::invalid_argument("empty BLER curve");
    for (size_t i = 0; i < points.size(); ++i) {
      points[i].bler = std::clamp(points[i].bler, 0.0, 1.0);
      if (i > 0 && points[i].snr_db <= points[i - 1].snr_db)
        throw std::invalid_argument("BLER curve SNR values must be strictly increasing");
      if (i > 0 && points[i].bler > points[i - 1].bler + 1e-12)
        throw std::invalid_argument("BLER must be non-increasing in SNR");
    }
    curve(cls) = std::move(points);
  }

  bool has_curve(PacketClass cls) const { return !curve(cls).empty(); }

  double bler(PacketClass cls, double snr_db) const {
    const std::vector<Point>& pts = curve(cls);
    if (pts.empty()) throw std::invalid_argument("BLER table missing a packet class");
    if (snr_db <= pts.front().snr_db) return pts.front().bler;
    if (snr_db >= pts.back().snr_db) return pts.back().bler;
    auto hi = std::lower_bound(pts.begin(), pts.end(), snr_db,
                               [](const Point& p, double s) { return p.snr_db < s; });
    auto lo = hi - 1;
    const double t = (snr_db - lo->snr_db) / (hi->snr_db - lo->snr_db);
    return lo->bler + t * (hi->bler - lo->bler);
  }

  const std::vector<Point>& points(PacketClass cls) const { return curve(cls); }

  // Stand-in for real link-level curves: logistic fall-off with the LF knee
  // below the HF one (larger packet, more robust MCS, but 3 dB more noise
  // bandwidth at the receiver).
  static BlerTable logistic_default() {
    BlerTable t;
    t.set_curve(PacketClass::hf, logistic_points(5.0, 2.0));
    t.set_curve(PacketClass::lf, logistic_points(3.5, 2.0));
    return t;
  }

  static std::vector<Point> logistic_points(double mid_snr_db, double steepness) {
    std::vector<Point> pts;
    for (double s = -10.0; s <= 30.0 + 1e-9; s += 0.5)
      pts.push_back({s, 1.0 / (1.0 + std::exp(steepness * (s - mid_snr_db)))});
    return pts;
  }

 private:
  std::vector<Point>& curve(PacketClass cls) { return cls == PacketClass::hf ? hf_ : lf_; }
  const std::vector<Point>& curve(PacketClass cls) const {
    return cls == PacketClass::hf ? hf_ : lf_;
  }
  std::vector<Point> hf_;
  std::vector<Point> lf_;
};

enum class RxOutcomeKind { ok, hd, sen, pro, col };

inline const char* to_string(RxOutcomeKind k) {
  switch (k) {
    case RxOutcomeKind::ok: return "OK";
    case RxOutcomeKind::hd: return "HD";
    case RxOutcomeKind::sen: return "SEN";
    case RxOutcomeKind::pro: return "PRO";
    case RxOutcomeKind::col: return "COL";
  }
  return "?";
}

struct RxOutcome {
  RxOutcomeKind kind = RxOutcomeKind::ok;
  double rx_power_dbm = 0.0;
  double interference_mw = 0.0;
  double snr_db = 0.0;
  double sinr_db = 0.0;
};

struct PacketTx {
  PacketClass cls = PacketClass::hf;
  int np = 1;
};

// Classifies one reception into exactly one of OK/HD/SEN/PRO/COL.
// Precedence: a transmitting receiver hears nothing (HD); below the sensing
// threshold nothing is attempted (SEN); then one uniform draw is checked
// against BLER(SNR) and BLER(SINR) so that PRO and COL are nested: a draw
// failing at SINR but not at SNR is a collision loss.
inline RxOutcome receive(const PacketTx& pkt, bool rx_transmitting, double rx_power_dbm,
                         std::span<const double> interferer_dbm, const RadioConfig& cfg,
                         const BlerTable& bler, double u01) {
  RxOutcome out;
  out.rx_power_dbm = rx_power_dbm;
  double interference_mw = 0.0;
  for (double i_dbm : interferer_dbm) interference_mw += dbm_to_mw(i_dbm);
  out.interference_mw = interference_mw;

  const double noise_dbm = noise_power_dbm(pkt.np, cfg);
  out.snr_db = rx_power_dbm - noise_dbm;
  out.sinr_db = rx_power_dbm - mw_to_dbm(dbm_to_mw(noise_dbm) + interference_mw);

  if (rx_transmitting) {
    out.kind = RxOutcomeKind::hd;
    return out;
  }
  if (rx_power_dbm <= cfg.sensing_threshold_dbm) {
    out.kind = RxOutcomeKind::sen;
    return out;
  }
  const double bler_snr = bler.bler(pkt.cls, out.snr_db);
  const double bler_sinr = std::max(bler.bler(pkt.cls, out.sinr_db), bler_snr);
  if (u01 < bler_snr)
    out.kind = RxOutcomeKind::pro;
  else if (u01 < bler_sinr)
    out.kind = RxOutcomeKind::col;
  else
    out.kind = RxOutcomeKind::ok;
  return out;
}

// Log-normal shadowing, one correlated process per unordered vehicle pair.
// The value decorrelates exponentially with the relative displacement of the
// link endpoints; each link seeds its own compact generator so results do not
// depend on lookup order.
class ShadowingField {
 public:
  ShadowingField(std::uint64_t seed, double sigma_db, double decorr_m)
      : seed_(seed), sigma_db_(sigma_db), decorr_m_(decorr_m) {}

  double sample(int a, int b, double ax, double ay, double bx, double by) {
    if (a > b) {
      std::swap(a, b);
      std::swap(ax, bx);
      std::swap(ay, by);
    }
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
        static_cast<std::uint32_t>(b);
    const double rel_x = ax - bx;
    const double rel_y = ay - by;
    auto [it, inserted] = links_.try_emplace(key);
    LinkState& link = it->second;
    if (inserted) {
      link.rng_state = mix_seed(seed_, key, 0x5348u);
      link.value = sigma_db_ * standard_normal(link.rng_state);
    } else {
      const double moved = std::hypot(rel_x - link.rel_x, rel_y - link.rel_y);
      if (moved > 0.0) {
        const double rho = decorr_m_ > 0.0 ? std::exp(-moved / decorr_m_) : 0.0;
        link.value = rho * link.value +
                     std::sqrt(std::max(0.0, 1.0 - rho * rho)) * sigma_db_ *
                         standard_normal(link.rng_state);
      }
    }
    link.rel_x = rel_x;
    link.rel_y = rel_y;
    return link.value;
  }

  size_t link_count() const { return links_.size(); }

 private:
  struct LinkState {
    double value = 0.0;
    double rel_x = 0.0;
    double rel_y = 0.0;
    std::uint64_t rng_state = 0;
  };
  std::uint64_t seed_;
  double sigma_db_;
  double decorr_m_;
  std::unordered_map<std::uint64_t, LinkState> links_;
};

}  // namespace cv2x
