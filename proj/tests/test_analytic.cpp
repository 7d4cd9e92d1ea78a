#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

#include "cv2x/analytic.hpp"
#include "cv2x/geo_sched.hpp"

using namespace cv2x;
using Catch::Approx;

namespace {

AnalyticConfig default_cfg(int lambda = 10, double beta = 0.06) {
  AnalyticConfig cfg;
  cfg.pool = pool_dims(lambda, 4);
  cfg.beta_veh_per_m = beta;
  return cfg;
}

// Stochastic mode/slot oracle for the HD probability: both vehicles draw
// their mode from the long-run random fraction and their slot through the
// actual grid mapping; an HD loss is a shared sub-frame.
double hd_oracle(const PoolConfig& pool, int dpi, int trials, std::uint64_t seed) {
  Rng rng = make_rng(seed, dpi);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double p_ran = pool.p_random();
  int hd = 0;
  for (int t = 0; t < trials; ++t) {
    const int pi_t = uniform_int(rng, 0, pool.n - 1);
    const int pi_r = (pi_t + dpi) % pool.n;
    auto slot_sf = [&](int pi) {
      if (u01(rng) < p_ran) {
        const auto win = window_set(random_center(pi, pool), pool.m, pool.n);
        return subframe_of(win[uniform_int(rng, 0, static_cast<int>(win.size()) - 1)], pool);
      }
      return subframe_of(pi, pool);
    };
    if (slot_sf(pi_t) == slot_sf(pi_r)) ++hd;
  }
  return static_cast<double>(hd) / trials;
}

// Stochastic oracle for the same-slot probability: the interferer draws mode
// and class, the transmitter's own slot is fixed by its mode; counts overlap
// of the occupied sub-channel ranges in the same sub-frame.
double p_sim_oracle(const PoolConfig& pool, TxMode tx_mode, PacketClass tx_cls, int dpi,
                    double p_lf, int trials, std::uint64_t seed) {
  Rng rng = make_rng(seed, dpi * 4 + static_cast<int>(tx_mode) * 2 + static_cast<int>(tx_cls));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double p_ran = pool.p_random();
  const int np_tx = subchannels_for(tx_cls);
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const int pi_t = uniform_int(rng, 0, pool.n - 1);
    const int pi_i = (pi_t + dpi) % pool.n;

    auto slot = [&](int pi, TxMode mode, int np) {
      if (mode == TxMode::random) {
        const auto win = window_set(random_center(pi, pool), pool.m, pool.n);
        return assignment_for(win[uniform_int(rng, 0, static_cast<int>(win.size()) - 1)], np,
                              pool);
      }
      return assignment_for(pi, np, pool);
    };

    const ResourceAssignment tx = slot(pi_t, tx_mode, np_tx);
    const TxMode mode_i = u01(rng) < p_ran ? TxMode::random : TxMode::normal;
    const PacketClass cls_i = u01(rng) < p_lf ? PacketClass::lf : PacketClass::hf;
    const ResourceAssignment ix = slot(pi_i, mode_i, subchannels_for(cls_i));
    if (tx.overlaps(ix)) ++hits;
  }
  return static_cast<double>(hits) / trials;
}

}  // namespace

TEST_CASE("analytic model validates its inputs") {
  AnalyticConfig cfg = default_cfg();
  cfg.pool = pool_dims(10, 2);
  CHECK_THROWS_AS(AnalyticModel(cfg), std::invalid_argument);

  cfg = default_cfg();
  cfg.beta_veh_per_m = 0.0;
  CHECK_THROWS_AS(AnalyticModel(cfg), std::invalid_argument);

  cfg = default_cfg();
  cfg.bler = BlerTable();
  CHECK_THROWS_AS(AnalyticModel(cfg), std::invalid_argument);

  cfg = default_cfg();
  cfg.interferer_radius_m = 5.0;  // shorter than 1/beta
  AnalyticModel m(cfg);
  CHECK_THROWS_AS(m.delta_col(100.0), std::invalid_argument);
}

TEST_CASE("delta_hd branch values") {
  AnalyticModel m(default_cfg(10, 0.06));
  const PoolConfig& pool = m.config().pool;
  const int k = m.k();
  CHECK(k == 200);

  // dpi = 0: p_nor^2 + p_ran^2/(2M+1)
  CHECK(m.hd_prob(0) == Approx(0.81 + 0.1 * 0.1 / 11.0).epsilon(1e-12));
  // Outside every set.
  CHECK(m.hd_prob(7) == 0.0);
  CHECK(pool.p_random() == Approx(0.1));

  // Window edge membership: K/4 +- M in, K/4 +- (M+1) out.
  CHECK(m.hd_prob(k / 4 + pool.m) > 0.0);
  CHECK(m.hd_prob(k / 4 + pool.m + 1) == 0.0);
}

TEST_CASE("delta_hd is periodic and symmetric in the PosIndex difference") {
  for (int lambda : {10, 20, 50}) {
    AnalyticModel m(default_cfg(lambda, 0.06));
    const int n = m.config().pool.n;
    for (int dpi = 0; dpi < n; ++dpi) {
      CHECK(m.hd_prob(dpi) == m.hd_prob((dpi + n) % n));
      CHECK(m.hd_prob(dpi) == Approx(m.hd_prob((n - dpi) % n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("delta_hd matches the stochastic mode-draw oracle") {
  for (int lambda : {10, 20, 50}) {
    AnalyticModel m(default_cfg(lambda, 0.06));
    const PoolConfig& pool = m.config().pool;
    const int k = m.k();
    std::set<int> dpis = {0,         1,          7,          k / 4,     k / 4 + pool.m,
                          k / 2,     3 * k / 4,  k,          5 * k / 4, 3 * k / 2,
                          7 * k / 4, k / 4 - pool.m, k / 2 + pool.m + 1};
    for (int dpi : dpis) {
      dpi = ((dpi % pool.n) + pool.n) % pool.n;
      const double mc = hd_oracle(pool, dpi, 100000, 1234);
      CHECK_THAT(m.hd_prob(dpi), Catch::Matchers::WithinAbs(mc, 1e-2));
    }
  }
}

TEST_CASE("p_sim tables match the stochastic slot-overlap oracle") {
  AnalyticModel m(default_cfg(10, 0.06));
  const PoolConfig& pool = m.config().pool;
  const int k = m.k();
  const std::set<int> dpis = {0,     1,         k / 4,      k / 4 + pool.m, k / 2,
                              k,     3 * k / 4, 5 * k / 4,  7 * k / 4,      17,
                              k + 3};
  for (TxMode mode : {TxMode::normal, TxMode::random}) {
    for (PacketClass cls : {PacketClass::hf, PacketClass::lf}) {
      for (int dpi : dpis) {
        const double mc = p_sim_oracle(pool, mode, cls, dpi, 0.2, 100000, 777);
        CHECK_THAT(m.p_sim(mode, cls, dpi), Catch::Matchers::WithinAbs(mc, 1e-2));
      }
    }
  }
}

TEST_CASE("p_sim spot values") {
  AnalyticModel m(default_cfg(10, 0.06));
  const int k = m.k();
  CHECK(m.p_sim(TxMode::normal, PacketClass::hf, 0) == Approx(0.9));
  CHECK(m.p_sim(TxMode::normal, PacketClass::hf, k) == Approx(0.18));
  CHECK(m.p_sim(TxMode::normal, PacketClass::lf, k) == Approx(0.9));
  CHECK(m.p_sim(TxMode::normal, PacketClass::hf, 7) == 0.0);
}

TEST_CASE("delta_sen closed form") {
  AnalyticModel m(default_cfg());
  const RadioConfig& r = m.config().radio;

  // Distance where the mean received power sits exactly on the threshold:
  // margin 0, probability 1/2.
  const double pl_target = r.tx_power_dbm - r.sensing_threshold_dbm;
  const double d_at =
      r.pl_breakpoint_m *
      std::pow(10.0, (pl_target - path_loss_db(r.pl_breakpoint_m, r)) / r.pl_slope2_db_decade);
  CHECK(m.delta_sen(d_at) == Approx(0.5).margin(1e-9));

  // Margin of 3*sigma*sqrt(2): the erf(3) Gaussian tail.
  const double margin = 3.0 * r.shadowing_sigma_db * std::numbers::sqrt2;
  const double pl2 = r.tx_power_dbm - r.sensing_threshold_dbm - margin;
  const double d2 =
      r.pl_breakpoint_m *
      std::pow(10.0, (pl2 - path_loss_db(r.pl_breakpoint_m, r)) / r.pl_slope2_db_decade);
  CHECK(m.delta_sen(d2) == Approx(0.5 * (1.0 - std::erf(3.0))).epsilon(1e-6));

  CHECK(m.delta_sen(1.0) < 1e-12);

  // Monotone non-decreasing over a sweep.
  double prev = 0.0;
  for (double d = 10.0; d <= 1000.0; d += 10.0) {
    const double v = m.delta_sen(d);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("delta_sen matches shadowing-draw Monte Carlo") {
  AnalyticModel m(default_cfg());
  const RadioConfig& r = m.config().radio;
  std::uint64_t s = 2024;
  for (double d : {100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0, 900.0, 1000.0}) {
    const int n = 1000000;
    int below = 0;
    const double mean = r.tx_power_dbm - path_loss_db(d, r);
    for (int i = 0; i < n; ++i)
      if (mean + r.shadowing_sigma_db * standard_normal(s) <= r.sensing_threshold_dbm) ++below;
    CHECK_THAT(m.delta_sen(d), Catch::Matchers::WithinAbs(static_cast<double>(below) / n, 1e-3));
  }
}

TEST_CASE("delta_pro degenerate BLER tables") {
  AnalyticConfig cfg = default_cfg();
  BlerTable zero, one;
  zero.set_curve(PacketClass::hf, {{-10.0, 0.0}, {30.0, 0.0}});
  zero.set_curve(PacketClass::lf, {{-10.0, 0.0}, {30.0, 0.0}});
  cfg.bler = zero;
  CHECK(AnalyticModel(cfg).delta_pro(300.0) == 0.0);

  one.set_curve(PacketClass::hf, {{-10.0, 1.0}, {30.0, 1.0}});
  one.set_curve(PacketClass::lf, {{-10.0, 1.0}, {30.0, 1.0}});
  cfg.bler = one;
  CHECK(AnalyticModel(cfg).delta_pro(300.0) == Approx(1.0));
}

TEST_CASE("delta_pro with a step BLER equals the truncated-Gaussian tail") {
  AnalyticConfig cfg = default_cfg();
  const double s0 = 14.0;
  BlerTable step;
  step.set_curve(PacketClass::hf, {{s0 - 1e-6, 1.0}, {s0 + 1e-6, 0.0}});
  step.set_curve(PacketClass::lf, {{s0 - 1e-6, 1.0}, {s0 + 1e-6, 0.0}});
  cfg.bler = step;
  AnalyticModel m(cfg);

  const RadioConfig& r = cfg.radio;
  for (double d : {300.0, 450.0, 600.0}) {
    for (PacketClass cls : {PacketClass::hf, PacketClass::lf}) {
      const double n0 = noise_power_dbm(subchannels_for(cls), r);
      const double mean = r.tx_power_dbm - path_loss_db(d, r) - n0;
      const double s_min = r.sensing_threshold_dbm - n0;
      const double sigma = r.shadowing_sigma_db;
      // P(SNR < s0 | SNR > s_min), zero if s0 is below the truncation point.
      const double denom = 1.0 - normal_cdf((s_min - mean) / sigma);
      const double num =
          std::max(0.0, normal_cdf((s0 - mean) / sigma) - normal_cdf((s_min - mean) / sigma));
      const double expected = denom > 0.0 ? num / denom : 0.0;
      CHECK_THAT(m.delta_pro(d, cls), Catch::Matchers::WithinAbs(expected, 2e-3));
    }
  }
}

TEST_CASE("snr and sinr distributions are normalized on the grid") {
  AnalyticModel m(default_cfg());
  for (double d : {50.0, 300.0, 700.0}) {
    CHECK(m.snr_pmf(d, PacketClass::hf).total() == Approx(1.0).margin(1e-6));
    CHECK(m.sinr_pmf(d, 400.0, PacketClass::hf).total() == Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("sinr cross-correlation matches two-variable Monte Carlo") {
  AnalyticModel m(default_cfg());
  const RadioConfig& r = m.config().radio;
  const double d_tr = 350.0, d_ir = 500.0;
  const PacketClass cls = PacketClass::hf;
  const DbDistribution grid_pmf = m.sinr_pmf(d_tr, d_ir, cls);
  const DbGrid& g = m.config().grid;

  // Direct sampling of SINR = Pr - 10log10(N + Pi), conditioned on Pr above
  // the sensing threshold, aggregated to 1 dB for the comparison.
  const double n0 = noise_power_dbm(subchannels_for(cls), r);
  const double mean_pr = r.tx_power_dbm - path_loss_db(d_tr, r);
  const double mean_pi = r.tx_power_dbm - path_loss_db(d_ir, r);
  std::uint64_t s = 31337;
  const int n = 1000000;
  const int agg = static_cast<int>(std::lround(1.0 / g.res_db));
  const int coarse_bins = g.size() / agg + 2;
  std::vector<double> mc(coarse_bins, 0.0), an(coarse_bins, 0.0);
  int kept = 0;
  while (kept < n) {
    const double pr = mean_pr + r.shadowing_sigma_db * standard_normal(s);
    if (pr <= r.sensing_threshold_dbm) continue;
    const double pi = mean_pi + r.shadowing_sigma_db * standard_normal(s);
    const double sinr = pr - mw_to_dbm(dbm_to_mw(n0) + dbm_to_mw(pi));
    int idx = static_cast<int>(std::lround((sinr - g.min_db) / g.res_db));
    idx = std::clamp(idx, 0, g.size() - 1);
    mc[idx / agg] += 1.0 / n;
    ++kept;
  }
  for (int i = 0; i < g.size(); ++i) an[i / agg] += grid_pmf.mass[i];

  double tv = 0.0;
  for (int i = 0; i < coarse_bins; ++i) tv += std::abs(mc[i] - an[i]);
  CHECK(tv / 2.0 < 1e-2);
}

TEST_CASE("delta_col structure") {
  AnalyticConfig cfg = default_cfg(50, 0.06);
  cfg.interferer_radius_m = 1000.0;
  AnalyticModel m(cfg);

  // Zero density beyond the pair: radius admits no lattice interferer.
  AnalyticConfig lonely = default_cfg(50, 1.0 / 900.0);
  lonely.interferer_radius_m = 1000.0;
  AnalyticModel ml(lonely);
  CHECK(ml.delta_col(900.0) == 0.0);

  // All deltas within [0,1] on a sweep; pdr composes them.
  for (double d = 10.0; d <= 1000.0; d += 30.0) {
    for (double v : {m.delta_hd(d), m.delta_sen(d), m.delta_pro(d), m.delta_col(d), m.pdr(d)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("pdr composition limits") {
  AnalyticModel m(default_cfg());
  // Nearest-neighbor distance: distinct PosIndex, only the tiny
  // random-random window overlap term remains in the HD component.
  const double d1 = 1.0 / m.config().beta_veh_per_m;
  CHECK(m.delta_hd(d1) == Approx(0.1 * 0.1 / 11.0));

  // Seven positions apart: outside every half-duplex set; at short range the
  // residual loss is the random-mode collision chance with close neighbors.
  const double d7 = 7.0 / m.config().beta_veh_per_m;
  CHECK(m.delta_hd(d7) == 0.0);
  CHECK(m.pdr(d7) == Approx(1.0).margin(1e-2));

  // pdr is exactly the product of the four survival factors.
  for (double d : {d1, d7, 350.0, 620.0}) {
    CHECK(m.pdr(d) == Approx((1.0 - m.delta_sen(d)) * (1.0 - m.delta_pro(d)) *
                             (1.0 - m.delta_hd(d)) * (1.0 - m.delta_col(d))));
  }

  // A same-PosIndex distance is dominated by the HD term.
  const double d0 = 1.0;  // dpi = 0
  CHECK(m.delta_hd(d0) == Approx(0.81 + 0.01 / 11.0));
  CHECK(m.pdr(d0) == Approx(1.0 - m.delta_hd(d0)).margin(1e-3));
}

TEST_CASE("halving the grid resolution moves no curve point by 1e-3") {
  AnalyticConfig cfg = default_cfg(10, 0.06);
  AnalyticConfig fine = cfg;
  fine.grid.res_db = cfg.grid.res_db / 2.0;
  AnalyticModel coarse_m(cfg), fine_m(fine);
  for (double d = 10.0; d <= 810.0; d += 100.0) {
    CHECK_THAT(coarse_m.pdr(d), Catch::Matchers::WithinAbs(fine_m.pdr(d), 1e-3));
    CHECK_THAT(coarse_m.delta_pro(d), Catch::Matchers::WithinAbs(fine_m.delta_pro(d), 1e-3));
    CHECK_THAT(coarse_m.delta_col(d), Catch::Matchers::WithinAbs(fine_m.delta_col(d), 1e-3));
  }
}
