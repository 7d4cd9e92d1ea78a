#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cv2x/grid.hpp"
#include "cv2x/phy.hpp"

namespace cv2x {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Uniform dB grid shared by every discretized distribution in the model.
struct DbGrid {
  double min_db = -40.0;
  double max_db = 60.0;
  double res_db = 0.1;

  int size() const { return static_cast<int>(std::lround((max_db - min_db) / res_db)) + 1; }
  double value(int i) const { return min_db + i * res_db; }
};

// Probability mass over the dB grid; sums to one after normalization.
struct DbDistribution {
  std::vector<double> mass;
  double total() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
  }
};

struct AnalyticConfig {
  PoolConfig pool;
  RadioConfig radio;
  BlerTable bler = BlerTable::logistic_default();
  double beta_veh_per_m = 0.06;
  double p_lf = 0.2;
  DbGrid grid;
  double interferer_radius_m = 1000.0;
};

// Closed-form packet delivery ratio for the geo-based scheme on the
// single-file equal-spacing highway abstraction: vehicles every 1/beta meters
// with perfectly consecutive PosIndices.
class AnalyticModel {
 public:
  explicit AnalyticModel(AnalyticConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.pool.sc != 4)
      throw std::invalid_argument("the closed-form model is derived for 4 sub-channels per sub-frame");
    if (cfg_.pool.n % 2 != 0) throw std::invalid_argument("pool size must be even");
    if (cfg_.beta_veh_per_m <= 0.0) throw std::invalid_argument("density must be positive");
    if (!cfg_.bler.has_curve(PacketClass::hf) || !cfg_.bler.has_curve(PacketClass::lf))
      throw std::invalid_argument("BLER table missing a packet class");
    k_ = cfg_.pool.n / (cfg_.pool.sc / 2);
    if (k_ % 4 != 0) throw std::invalid_argument("window centers must be integral");
    bler_grid_hf_.resize(cfg_.grid.size());
    bler_grid_lf_.resize(cfg_.grid.size());
    for (int i = 0; i < cfg_.grid.size(); ++i) {
      bler_grid_hf_[i] = cfg_.bler.bler(PacketClass::hf, cfg_.grid.value(i));
      bler_grid_lf_[i] = cfg_.bler.bler(PacketClass::lf, cfg_.grid.value(i));
    }
  }

  const AnalyticConfig& config() const { return cfg_; }
  int k() const { return k_; }

  // ---- half-duplex ----

  /// HD probability for a transmitter in normal mode, as a function of the
  /// PosIndex difference between transmitter and receiver.
  double hd_normal(int dpi) const {
    const int n = cfg_.pool.n, m = cfg_.pool.m;
    if (dpi == 0 || dpi == k_ / 2 || dpi == k_ || dpi == 3 * k_ / 2) return cfg_.pool.p_normal();
    if (in_window(dpi, k_ / 4, m, n) || in_window(dpi, 3 * k_ / 4, m, n) ||
        in_window(dpi, 5 * k_ / 4, m, n) || in_window(dpi, 7 * k_ / 4, m, n))
      return cfg_.pool.p_random() / (2 * m + 1);
    return 0.0;
  }

  /// HD probability for a transmitter in random mode.
  double hd_random(int dpi) const {
    const int n = cfg_.pool.n, m = cfg_.pool.m;
    if (in_window(dpi, k_ / 4, m, n) || in_window(dpi, 3 * k_ / 4, m, n) ||
        in_window(dpi, 5 * k_ / 4, m, n) || in_window(dpi, 7 * k_ / 4, m, n))
      return cfg_.pool.p_normal() / (2 * m + 1);
    if (in_window(dpi, 0, m, n) || in_window(dpi, k_ / 2, m, n) || in_window(dpi, k_, m, n) ||
        in_window(dpi, 3 * k_ / 2, m, n))
      return cfg_.pool.p_random() / (2 * m + 1);
    return 0.0;
  }

  double hd_prob(int dpi) const {
    return cfg_.pool.p_random() * hd_random(dpi) + cfg_.pool.p_normal() * hd_normal(dpi);
  }

  double delta_hd(double d_m) const {
    return hd_prob(delta_pi(d_m, cfg_.beta_veh_per_m, cfg_.pool.n));
  }

  // ---- sensing ----

  double delta_sen(double d_m) const {
    const double margin =
        cfg_.radio.tx_power_dbm - path_loss_db(d_m, cfg_.radio) - cfg_.radio.sensing_threshold_dbm;
    return 0.5 * (1.0 - std::erf(margin / (cfg_.radio.shadowing_sigma_db * std::numbers::sqrt2)));
  }

  // ---- propagation ----

  /// SNR distribution at distance d for one packet class, truncated below the
  /// sensing threshold and renormalized. Overflow past the grid top is folded
  /// into the top cell (BLER is saturated there anyway).
  DbDistribution snr_pmf(double d_m, PacketClass cls) const {
    const double n0 = noise_power_dbm(subchannels_for(cls), cfg_.radio);
    const double mean = cfg_.radio.tx_power_dbm - path_loss_db(d_m, cfg_.radio) - n0;
    const double s_min = cfg_.radio.sensing_threshold_dbm - n0;
    const double sigma = cfg_.radio.shadowing_sigma_db;
    const DbGrid& g = cfg_.grid;

    DbDistribution dist;
    dist.mass.assign(g.size(), 0.0);
    for (int i = 0; i < g.size(); ++i) {
      double lo = g.value(i) - g.res_db / 2.0;
      double hi = g.value(i) + g.res_db / 2.0;
      if (i == g.size() - 1) hi = std::numeric_limits<double>::infinity();
      lo = std::max(lo, s_min);
      if (hi <= lo) continue;
      dist.mass[i] = normal_cdf((hi - mean) / sigma) - normal_cdf((lo - mean) / sigma);
    }
    const double total = dist.total();
    if (total > 0.0)
      for (double& m : dist.mass) m /= total;
    return dist;
  }

  double delta_pro(double d_m, PacketClass cls) const {
    DbDistribution f = snr_pmf(d_m, cls);
    if (f.total() <= 0.0) {
      const double n0 = noise_power_dbm(subchannels_for(cls), cfg_.radio);
      return cfg_.bler.bler(cls, cfg_.radio.sensing_threshold_dbm - n0);
    }
    return bler_average(f, cls);
  }

  double delta_pro(double d_m) const {
    return (1.0 - cfg_.p_lf) * delta_pro(d_m, PacketClass::hf) +
           cfg_.p_lf * delta_pro(d_m, PacketClass::lf);
  }

  // ---- collisions ----

  /// Probability that the interferer's slot coincides with the transmitter's
  /// for each transmitter mode and packet class. `dpi` is the PosIndex of the
  /// interferer minus the PosIndex of the transmitter, modulo N.
  double p_sim(TxMode mode, PacketClass cls, int dpi) const {
    const int n = cfg_.pool.n, m = cfg_.pool.m;
    const double p_nor = cfg_.pool.p_normal();
    const double p_ran = cfg_.pool.p_random();
    const double win = 2.0 * m + 1.0;
    const double p_lf = cfg_.p_lf;

    if (mode == TxMode::normal && cls == PacketClass::hf) {
      if (dpi == 0) return p_nor;
      if (dpi == k_) return p_nor * p_lf;
      if (in_window(dpi, 5 * k_ / 4, m, n)) return p_ran / win;
      if (in_window(dpi, k_ / 4, m, n)) return p_ran * p_lf / win;
      return 0.0;
    }
    if (mode == TxMode::normal && cls == PacketClass::lf) {
      if (dpi == 0 || dpi == k_) return p_nor;
      if (in_window(dpi, k_ / 4, m, n) || in_window(dpi, 5 * k_ / 4, m, n)) return p_ran / win;
      return 0.0;
    }
    if (mode == TxMode::random && cls == PacketClass::hf) {
      // A normal-mode interferer of either class can cover the random slot
      // when it sits a window's offset behind (3K/4); a window's offset ahead
      // (7K/4) only a two-sub-channel packet reaches across.
      if (in_window(dpi, 3 * k_ / 4, m, n)) return p_nor / win;
      if (in_window(dpi, 7 * k_ / 4, m, n)) return p_nor * p_lf / win;
      if (in_window(dpi, 0, m, n)) return p_ran / win;
      if (in_window(dpi, k_, m, n)) return p_ran * p_lf / win;
      return 0.0;
    }
    // random, LF
    if (in_window(dpi, 3 * k_ / 4, m, n) || in_window(dpi, 7 * k_ / 4, m, n)) return p_nor / win;
    if (in_window(dpi, 0, m, n) || in_window(dpi, k_, m, n)) return p_ran / win;
    return 0.0;
  }

  /// Distribution of the SINR at a receiver `d_tr` from the transmitter with
  /// one interferer `d_ir` away, on the dB grid. Mass that falls below the
  /// grid is folded into the lowest cell.
  DbDistribution sinr_pmf(double d_tr, double d_ir, PacketClass cls) const {
    const DbDistribution snr = snr_pmf(d_tr, cls);
    const std::vector<double> z = interference_rise_pmf(d_ir, cls);
    const DbGrid& g = cfg_.grid;
    DbDistribution out;
    out.mass.assign(g.size(), 0.0);
    for (int i = 0; i < g.size(); ++i) {
      if (snr.mass[i] <= 0.0) continue;
      for (int kz = 0; kz < static_cast<int>(z.size()); ++kz) {
        if (z[kz] <= 0.0) continue;
        const int j = std::max(i - kz, 0);
        out.mass[j] += snr.mass[i] * z[kz];
      }
    }
    return out;
  }

  /// Conditional probability that a packet surviving propagation is lost to
  /// one co-slot interferer at distance d_ir from the receiver.
  double p_int(double d_tr, double d_ir, PacketClass cls) const {
    const DbDistribution snr = snr_pmf(d_tr, cls);
    return p_int_given_pro(snr, bler_average(snr, cls), d_ir, cls);
  }

  double delta_col(double d_m, TxMode mode, PacketClass cls) const {
    return delta_col_sides(d_m, mode, cls);
  }

  double delta_col(double d_m) const {
    const double p_nor = cfg_.pool.p_normal();
    const double p_ran = cfg_.pool.p_random();
    const double hf = p_nor * delta_col_sides(d_m, TxMode::normal, PacketClass::hf) +
                      p_ran * delta_col_sides(d_m, TxMode::random, PacketClass::hf);
    const double lf = p_nor * delta_col_sides(d_m, TxMode::normal, PacketClass::lf) +
                      p_ran * delta_col_sides(d_m, TxMode::random, PacketClass::lf);
    return (1.0 - cfg_.p_lf) * hf + cfg_.p_lf * lf;
  }

  double pdr(double d_m) const {
    return (1.0 - delta_sen(d_m)) * (1.0 - delta_pro(d_m)) * (1.0 - delta_hd(d_m)) *
           (1.0 - delta_col(d_m));
  }

  struct Row {
    double d_m, hd, sen, pro, col, pdr;
  };

  std::vector<Row> sweep(const std::vector<double>& distances) const {
    std::vector<Row> rows;
    rows.reserve(distances.size());
    for (double d : distances) {
      Row r;
      r.d_m = d;
      r.hd = delta_hd(d);
      r.sen = delta_sen(d);
      r.pro = delta_pro(d);
      r.col = delta_col(d);
      r.pdr = (1.0 - r.sen) * (1.0 - r.pro) * (1.0 - r.hd) * (1.0 - r.col);
      rows.push_back(r);
    }
    return rows;
  }

 private:
  // Distribution of Z = 10*log10(1 + I/N): how far the interferer lifts the
  // noise floor of the victim class. Indexed from z = 0 on the same grid
  // resolution; mass is split linearly between neighbouring cells.
  std::vector<double> interference_rise_pmf(double d_ir, PacketClass cls) const {
    const double n0 = noise_power_dbm(subchannels_for(cls), cfg_.radio);
    const double mean_inr = cfg_.radio.tx_power_dbm - path_loss_db(d_ir, cfg_.radio) - n0;
    const double sigma = cfg_.radio.shadowing_sigma_db;
    const double h = cfg_.grid.res_db;

    const double inr_lo = mean_inr - 8.0 * sigma;
    const double inr_hi = mean_inr + 8.0 * sigma;
    const int cells = static_cast<int>(std::ceil((inr_hi - inr_lo) / h)) + 1;

    const double z_max = 10.0 * std::log10(1.0 + std::pow(10.0, inr_hi / 10.0));
    std::vector<double> z(static_cast<size_t>(std::ceil(z_max / h)) + 2, 0.0);

    double below = normal_cdf((inr_lo - mean_inr) / sigma);
    z[0] += below;  // interferer far under the noise floor: no rise
    for (int c = 0; c < cells; ++c) {
      const double lo = inr_lo + c * h;
      const double hi = std::min(lo + h, inr_hi);
      if (hi <= lo) continue;
      const double mass = normal_cdf((hi - mean_inr) / sigma) - normal_cdf((lo - mean_inr) / sigma);
      if (mass <= 0.0) continue;
      const double inr = 0.5 * (lo + hi);
      const double rise = 10.0 * std::log10(1.0 + std::pow(10.0, inr / 10.0));
      const double pos = rise / h;
      const int i0 = std::min(static_cast<int>(pos), static_cast<int>(z.size()) - 2);
      const double frac = pos - i0;
      z[i0] += mass * (1.0 - frac);
      z[i0 + 1] += mass * frac;
    }
    const double above = 1.0 - normal_cdf((inr_hi - mean_inr) / sigma);
    z.back() += above;
    return z;
  }

  double bler_average(const DbDistribution& f, PacketClass cls) const {
    const std::vector<double>& bg = cls == PacketClass::hf ? bler_grid_hf_ : bler_grid_lf_;
    double sum = 0.0;
    for (int i = 0; i < cfg_.grid.size(); ++i)
      if (f.mass[i] > 0.0) sum += bg[i] * f.mass[i];
    return std::clamp(sum, 0.0, 1.0);
  }

  double p_int_given_pro(const DbDistribution& snr, double pro, double d_ir,
                         PacketClass cls) const {
    const std::vector<double> z = interference_rise_pmf(d_ir, cls);
    const std::vector<double>& bg = cls == PacketClass::hf ? bler_grid_hf_ : bler_grid_lf_;
    double p_sinr = 0.0;
    for (int i = 0; i < cfg_.grid.size(); ++i) {
      if (snr.mass[i] <= 0.0) continue;
      for (int kz = 0; kz < static_cast<int>(z.size()); ++kz) {
        if (z[kz] <= 0.0) continue;
        p_sinr += snr.mass[i] * z[kz] * bg[std::max(i - kz, 0)];
      }
    }
    if (pro >= 1.0) return 0.0;
    return std::clamp((p_sinr - pro) / (1.0 - pro), 0.0, 1.0);
  }

  // One-interferer relevance pruning: skip interferers whose received power
  // stays so far under the noise floor that the SINR equals the SNR on the
  // whole grid.
  bool negligible(double d_ir, PacketClass cls) const {
    const double n0 = noise_power_dbm(subchannels_for(cls), cfg_.radio);
    const double inr_peak = cfg_.radio.tx_power_dbm - path_loss_db(d_ir, cfg_.radio) - n0 +
                            8.0 * cfg_.radio.shadowing_sigma_db;
    return inr_peak < 10.0 * std::log10(std::pow(10.0, cfg_.grid.res_db / 10.0) - 1.0);
  }

  double delta_col_sides(double d_m, TxMode mode, PacketClass cls) const {
    const double beta = cfg_.beta_veh_per_m;
    const double radius = cfg_.interferer_radius_m;
    if (radius < 1.0 / beta)
      throw std::invalid_argument("interferer truncation radius shorter than the vehicle spacing");
    const DbDistribution snr = snr_pmf(d_m, cls);
    const double pro = bler_average(snr, cls);

    double acc = 0.0;
    for (int side = 0; side < 2; ++side) {
      const double rx_pos = side == 0 ? d_m : -d_m;
      const int rx_k = static_cast<int>(std::lround(beta * rx_pos));
      const int k_lo = static_cast<int>(std::floor(beta * (rx_pos - radius)));
      const int k_hi = static_cast<int>(std::ceil(beta * (rx_pos + radius)));
      double survive = 1.0;
      for (int k = k_lo; k <= k_hi; ++k) {
        if (k == 0 || k == rx_k) continue;  // the transmitter / the receiver
        const double pos = k / beta;
        const double d_ir = std::abs(pos - rx_pos);
        if (d_ir > radius) continue;
        const int dpi = ((k % cfg_.pool.n) + cfg_.pool.n) % cfg_.pool.n;
        const double sim = p_sim(mode, cls, dpi);
        if (sim <= 0.0) continue;
        if (negligible(d_ir, cls)) continue;
        survive *= 1.0 - sim * p_int_given_pro(snr, pro, d_ir, cls);
      }
      acc += 1.0 - survive;
    }
    return acc / 2.0;
  }

  AnalyticConfig cfg_;
  int k_ = 0;
  std::vector<double> bler_grid_hf_;
  std::vector<double> bler_grid_lf_;
};

}  // namespace cv2x
