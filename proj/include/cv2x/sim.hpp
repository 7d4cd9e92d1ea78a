#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "cv2x/geo_sched.hpp"
#include "cv2x/grid.hpp"
#include "cv2x/mobility.hpp"
#include "cv2x/phy.hpp"
#include "cv2x/rng.hpp"
#include "cv2x/sps_sched.hpp"

namespace cv2x {

enum class SchedulerKind { geo, sps };

inline const char* to_string(SchedulerKind k) { return k == SchedulerKind::geo ? "geo" : "sps"; }

struct Beacon {
  int sender = 0;
  double gen_ms = 0.0;
  PacketClass cls = PacketClass::hf;
  int payload_bytes = 190;
  double x_m = 0.0;
  double y_m = 0.0;
  double speed_mps = 0.0;
  int pos_index = 0;  // carried only under the geo scheme
};

struct PdrBin {
  double lo_m = 0.0;
  double hi_m = 0.0;
  std::uint64_t attempts = 0, ok = 0, hd = 0, sen = 0, pro = 0, col = 0;
  double pdr() const { return attempts ? static_cast<double>(ok) / attempts : 0.0; }
};

// Distance-binned delivery statistics with per-error-type attribution.
class PdrCurve {
 public:
  PdrCurve() = default;
  PdrCurve(double bin_width_m, double max_m) : width_(bin_width_m) {
    const int n = static_cast<int>(std::ceil(max_m / bin_width_m));
    bins_.resize(n);
    for (int i = 0; i < n; ++i) {
      bins_[i].lo_m = i * bin_width_m;
      bins_[i].hi_m = (i + 1) * bin_width_m;
    }
  }

  double max_m() const { return bins_.empty() ? 0.0 : bins_.back().hi_m; }
  double bin_width() const { return width_; }
  const std::vector<PdrBin>& bins() const { return bins_; }

  void add(double distance_m, RxOutcomeKind kind) {
    if (bins_.empty() || distance_m >= max_m()) return;
    PdrBin& b = bins_[static_cast<int>(distance_m / width_)];
    b.attempts += 1;
    switch (kind) {
      case RxOutcomeKind::ok: b.ok += 1; break;
      case RxOutcomeKind::hd: b.hd += 1; break;
      case RxOutcomeKind::sen: b.sen += 1; break;
      case RxOutcomeKind::pro: b.pro += 1; break;
      case RxOutcomeKind::col: b.col += 1; break;
    }
  }

  void merge(const PdrCurve& other) {
    if (bins_.empty()) {
      *this = other;
      return;
    }
    if (other.bins_.size() != bins_.size()) throw std::invalid_argument("bin layout mismatch");
    for (size_t i = 0; i < bins_.size(); ++i) {
      bins_[i].attempts += other.bins_[i].attempts;
      bins_[i].ok += other.bins_[i].ok;
      bins_[i].hd += other.bins_[i].hd;
      bins_[i].sen += other.bins_[i].sen;
      bins_[i].pro += other.bins_[i].pro;
      bins_[i].col += other.bins_[i].col;
    }
  }

 private:
  double width_ = 20.0;
  std::vector<PdrBin> bins_;
};

/// Largest distance up to which every (non-empty) bin keeps a PDR of at least
/// 0.9, with linear interpolation inside the bin where the curve crosses.
inline double pdr90_distance(const PdrCurve& curve) {
  const double target = 0.9;
  bool have_prev = false;
  double prev_hi = 0.0, prev_pdr = 1.0, reach = 0.0;
  for (const PdrBin& b : curve.bins()) {
    if (b.attempts == 0) continue;
    const double p = b.pdr();
    if (p < target) {
      if (!have_prev) return 0.0;
      return prev_hi + (b.hi_m - prev_hi) * (prev_pdr - target) / (prev_pdr - p);
    }
    have_prev = true;
    prev_hi = b.hi_m;
    prev_pdr = p;
    reach = b.hi_m;
  }
  return reach;
}

struct OrderingStat {
  std::int64_t pool_index = 0;
  double frac_changed = 0.0;    // vehicles whose queue predecessor changed
  double frac_incorrect = 0.0;  // PosIndex != predecessor PosIndex + 1
};

struct SimConfig {
  SchedulerKind scheduler = SchedulerKind::geo;
  ScenarioConfig scenario;
  RadioConfig radio;
  PoolConfig pool = pool_dims(10, 4);
  BlerTable bler = BlerTable::logistic_default();
  GeoWeights weights;
  double duration_s = 60.0;
  double warmup_s = 5.0;
  double bin_width_m = 20.0;
  double max_bin_m = 800.0;
  double eval_radius_m = 1000.0;
  std::uint64_t seed = 1;
  int trace_every_ms = 0;  // 0: no trace in the result
};

struct ReceptionEvent {
  std::int64_t subframe = 0;
  int tx = 0;
  int rx = 0;
  double distance_m = 0.0;
  RxOutcomeKind kind = RxOutcomeKind::ok;
  TxMode mode = TxMode::normal;
};

struct RunResult {
  PdrCurve curve;
  std::vector<OrderingStat> ordering;
  double pdr90_m = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t tx_count = 0;         // transmissions in the measured window
  std::uint64_t subchannel_use = 0;   // sub-channels occupied by those
  std::int64_t pools_measured = 0;
  std::uint64_t vehicle_count = 0;
  std::vector<TraceRow> trace;
};

// Sub-frame stepped engine: mobility, beacon traffic, scheduler invocation
// and channel evaluation for every transmitter/receiver pair in range.
// Logically single-threaded; identical (config, seed) gives identical output.
class Engine {
 public:
  Engine(SimConfig cfg, Population pop)
      : cfg_(std::move(cfg)),
        shadowing_(mix_seed(cfg_.seed, 0x53484457u), cfg_.radio.shadowing_sigma_db,
                   cfg_.radio.shadowing_decorr_m),
        curve_(cfg_.bin_width_m, cfg_.max_bin_m) {
    validate();
    const double noise_floor = dbm_to_mw(noise_power_dbm(1, cfg_.radio));
    vehicles_.reserve(pop.size());
    for (const VehicleInit& vi : pop) {
      Vehicle v;
      v.id = vi.id;
      v.lane = vi.lane;
      v.x = vi.x_m;
      v.y = vi.y_m;
      v.speed = vi.speed_mps;
      v.sched_rng = make_rng(cfg_.seed, 0x53434845u, vi.id);
      v.rx_rng = make_rng(cfg_.seed, 0x52585247u, vi.id);
      v.phase_ms = uniform_int(v.sched_rng, 0, cfg_.pool.sf - 1);
      v.geo.pos_index = vi.id % cfg_.pool.n;
      v.geo.window_countdown = uniform_int(v.sched_rng, cfg_.pool.w_min, cfg_.pool.w_max);
      v.last_x = vi.x_m;
      v.last_y = vi.y_m;
      v.last_speed = vi.speed_mps;
      v.last_ts = 0.0;
      if (cfg_.scheduler == SchedulerKind::sps)
        v.sensing = SensingHistory(cfg_.pool.sc, noise_floor);
      vehicles_.push_back(std::move(v));
    }
    for (size_t i = 0; i < vehicles_.size(); ++i) {
      if (!id_to_index_.emplace(vehicles_[i].id, i).second)
        throw std::invalid_argument("duplicate vehicle id");
    }
    order_.resize(vehicles_.size());
    for (size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
    sort_order();
  }

  // Test hooks; call before run().
  void set_initial_posindex(int id, int pi) { vehicle(id).geo.pos_index = pi; }
  void set_initial_window_countdown(int id, int w) { vehicle(id).geo.window_countdown = w; }
  void set_observer(std::function<void(const ReceptionEvent&)> obs) { observer_ = std::move(obs); }
  void set_debug_ordering(bool on) { debug_ordering_ = on; }
  void set_debug_watch(int id) { debug_watch_ = id; }
  int posindex_of(int id) const { return vehicles_[index_of(id)].geo.pos_index; }

  /// Replays externally provided kinematics: rows override position and speed
  /// at their timestamps; between rows vehicles coast at the last speed.
  void set_mobility_trace(std::vector<TraceRow> rows) {
    for (TraceRow& r : rows) trace_in_[r.t_ms].push_back(r);
  }

  RunResult run() {
    const std::int64_t total_ms = static_cast<std::int64_t>(std::llround(cfg_.duration_s * 1000.0));
    const std::int64_t warmup_ms = static_cast<std::int64_t>(std::llround(cfg_.warmup_s * 1000.0));
    const int sf = cfg_.pool.sf;

    for (std::int64_t t = 0; t < total_ms; ++t) {
      if (t > 0) {
        advance_positions();
        apply_trace_rows(t);
        sort_order();
      }
      if (cfg_.trace_every_ms > 0 && t % cfg_.trace_every_ms == 0)
        for (const Vehicle& v : vehicles_)
          trace_out_.push_back({t, v.id, v.lane, v.x, v.speed});
      if (cfg_.scheduler == SchedulerKind::sps)
        for (Vehicle& v : vehicles_) v.sensing.advance(t);
      if (cfg_.scheduler == SchedulerKind::geo && t % sf == 0 && t > 0)
        pool_boundary(t, t >= warmup_ms);
      for (Vehicle& v : vehicles_)
        if (t >= v.phase_ms && (t - v.phase_ms) % sf == 0) generate_beacon(v, t);
      process_subframe(t, t >= warmup_ms);
    }

    RunResult res;
    res.curve = curve_;
    res.ordering = std::move(ordering_);
    res.pdr90_m = pdr90_distance(res.curve);
    res.seed = cfg_.seed;
    res.tx_count = tx_count_;
    res.subchannel_use = subchannel_use_;
    res.pools_measured = std::max<std::int64_t>(0, (total_ms - warmup_ms) / sf);
    res.vehicle_count = vehicles_.size();
    res.trace = std::move(trace_out_);
    return res;
  }

 private:
  struct Vehicle {
    int id = 0;
    int lane = 0;
    double x = 0.0, y = 0.0, speed = 0.0;
    int phase_ms = 0;
    int beacon_seq = 0;
    Rng sched_rng;
    Rng rx_rng;
    bool transmitting = false;

    // geo state
    SchedulerState geo;
    std::unordered_map<int, NeighborRecord> neighbors;
    double last_x = 0.0, last_y = 0.0, last_speed = 0.0, last_ts = 0.0;  // own last beacon

    // sps state
    SensingHistory sensing;
    std::optional<Reservation> reservation;
  };

  struct PlannedTx {
    int vehicle = 0;
    ResourceAssignment slot;
    TxMode mode = TxMode::normal;
    int reserve_np = 1;  // width advertised in the SCI (sps)
    Beacon beacon;
  };

  struct RxPower {
    int rx = 0;
    double distance_m = 0.0;
    double p_dbm = 0.0;
  };

  void validate() const {
    if (cfg_.pool.sc < 2)
      throw std::invalid_argument("two-sub-channel packets do not fit this pool");
    if (cfg_.duration_s < 0.0 || cfg_.warmup_s < 0.0)
      throw std::invalid_argument("negative duration");
    if (cfg_.max_bin_m > cfg_.eval_radius_m)
      throw std::invalid_argument("distance bins extend beyond the evaluation radius");
    if (cfg_.bin_width_m <= 0.0) throw std::invalid_argument("bin width must be positive");
  }

  size_t index_of(int id) const { return id_to_index_.at(id); }
  Vehicle& vehicle(int id) { return vehicles_[index_of(id)]; }

  void advance_positions() {
    const double dt_s = 1e-3;
    const double len = cfg_.scenario.length_m;
    for (Vehicle& v : vehicles_) {
      v.x = std::fmod(v.x + v.speed * dt_s, len);
      if (v.x < 0.0) v.x += len;
    }
  }

  void apply_trace_rows(std::int64_t t) {
    if (trace_in_.empty()) return;
    auto it = trace_in_.find(t);
    if (it == trace_in_.end()) return;
    for (const TraceRow& r : it->second) {
      auto idx = id_to_index_.find(r.vehicle_id);
      if (idx == id_to_index_.end()) continue;
      Vehicle& v = vehicles_[idx->second];
      v.x = r.x_m;
      v.speed = r.v_mps;
      v.lane = r.lane;
    }
  }

  // Insertion pass: positions move far less than the spacing per sub-frame,
  // so the order array is almost sorted already; wrap teleports bubble
  // through in one go.
  void sort_order() {
    for (size_t i = 1; i < order_.size(); ++i) {
      int idx = order_[i];
      const double x = vehicles_[idx].x;
      size_t j = i;
      while (j > 0 && vehicles_[order_[j - 1]].x > x) {
        order_[j] = order_[j - 1];
        --j;
      }
      order_[j] = idx;
    }
  }

  std::vector<int> in_radius(double x, double radius) const {
    std::vector<int> out;
    auto lo = std::lower_bound(order_.begin(), order_.end(), x - radius,
                               [&](int idx, double v) { return vehicles_[idx].x < v; });
    for (auto it = lo; it != order_.end(); ++it) {
      if (vehicles_[*it].x > x + radius) break;
      out.push_back(*it);
    }
    return out;
  }

  int beacon_bytes(PacketClass cls) const {
    const int base = cls == PacketClass::hf ? 190 : 300;
    return base + (cfg_.scheduler == SchedulerKind::geo ? 2 : 0);  // PosIndex field
  }

  void generate_beacon(Vehicle& v, std::int64_t t) {
    const PacketClass cls = (v.beacon_seq + v.id) % 5 == 0 ? PacketClass::lf : PacketClass::hf;
    v.beacon_seq += 1;
    const int np = subchannels_for(cls);

    Beacon b;
    b.sender = v.id;
    b.gen_ms = static_cast<double>(t);
    b.cls = cls;
    b.payload_bytes = beacon_bytes(cls);
    b.x_m = v.x;
    b.y_m = v.y;
    b.speed_mps = v.speed;
    b.pos_index = v.geo.pos_index;

    v.last_x = v.x;
    v.last_y = v.y;
    v.last_speed = v.speed;
    v.last_ts = static_cast<double>(t);

    PlannedTx tx;
    tx.vehicle = v.id;
    tx.beacon = b;

    std::int64_t t_tx = 0;
    if (cfg_.scheduler == SchedulerKind::geo) {
      tx.mode = next_mode(v.geo, cfg_.pool, v.sched_rng);
      tx.slot = select_assignment(v.geo, tx.mode, np, cfg_.pool, v.sched_rng);
      const int sf = cfg_.pool.sf;
      t_tx = t + 1 + ((tx.slot.sf - static_cast<int>((t + 1) % sf) + sf) % sf);
      while (vehicle_has_tx_at(v.id, t_tx)) t_tx += sf;
    } else {
      if (!v.reservation || np > v.reservation->np)
        v.reservation = select_csr(v.sensing, np, t, cfg_.pool, v.sched_rng);
      t_tx = v.reservation->next_tx;
      tx.slot = ResourceAssignment{static_cast<int>(t_tx % cfg_.pool.sf), v.reservation->sc, np};
      tx.reserve_np = v.reservation->np;
    }
    planned_[t_tx].push_back(std::move(tx));
  }

  bool vehicle_has_tx_at(int id, std::int64_t t) const {
    auto it = planned_.find(t);
    if (it == planned_.end()) return false;
    for (const PlannedTx& p : it->second)
      if (p.vehicle == id) return true;
    return false;
  }

  void process_subframe(std::int64_t t, bool measured) {
    auto it = planned_.find(t);
    if (it == planned_.end()) return;
    std::vector<PlannedTx> txs = std::move(it->second);
    planned_.erase(it);
    std::sort(txs.begin(), txs.end(),
              [](const PlannedTx& a, const PlannedTx& b) { return a.vehicle < b.vehicle; });

    for (const PlannedTx& tx : txs) {
      Vehicle& v = vehicle(tx.vehicle);
      v.transmitting = true;
      if (cfg_.scheduler == SchedulerKind::sps) v.sensing.mark_own_tx(t);
    }

    // Received power of every transmission at every vehicle in range.
    std::vector<std::vector<RxPower>> powers(txs.size());
    for (size_t i = 0; i < txs.size(); ++i) {
      const Vehicle& sender = vehicle(txs[i].vehicle);
      for (int idx : in_radius(sender.x, cfg_.eval_radius_m)) {
        const Vehicle& rx = vehicles_[idx];
        if (rx.id == sender.id) continue;
        const double d = std::hypot(rx.x - sender.x, rx.y - sender.y);
        if (d > cfg_.eval_radius_m) continue;
        const double sh = shadowing_.sample(sender.id, rx.id, sender.x, sender.y, rx.x, rx.y);
        const double p = cfg_.radio.tx_power_dbm - path_loss_db(d, cfg_.radio) + sh;
        powers[i].push_back({rx.id, d, p});
      }
      std::sort(powers[i].begin(), powers[i].end(),
                [](const RxPower& a, const RxPower& b) { return a.rx < b.rx; });
    }

    auto power_at = [&](size_t i, int rx_id) -> const RxPower* {
      const std::vector<RxPower>& ps = powers[i];
      auto p = std::lower_bound(ps.begin(), ps.end(), rx_id,
                                [](const RxPower& a, int id) { return a.rx < id; });
      return p != ps.end() && p->rx == rx_id ? &*p : nullptr;
    };

    // Interference couplings between co-sub-frame transmissions.
    auto interference_gain_db = [&](const ResourceAssignment& victim,
                                    const ResourceAssignment& other) {
      const int lo = std::max(victim.sc, other.sc);
      const int hi = std::min(victim.sc + victim.np, other.sc + other.np);
      if (hi > lo)  // co-channel: PSD-proportional share of the other's power
        return 10.0 * std::log10(static_cast<double>(hi - lo) / other.np);
      const int gap = lo - hi + 1;
      return ibe_attenuation_db(gap, cfg_.radio);
    };

    for (size_t i = 0; i < txs.size(); ++i) {
      const PlannedTx& tx = txs[i];
      const Vehicle& sender = vehicle(tx.vehicle);
      const PacketTx pkt{tx.beacon.cls, tx.slot.np};

      std::vector<size_t> co;
      for (size_t j = 0; j < txs.size(); ++j) {
        if (j == i) continue;
        if (!std::isinf(interference_gain_db(tx.slot, txs[j].slot))) co.push_back(j);
      }

      for (const RxPower& rp : powers[i]) {
        Vehicle& rx = vehicle(rp.rx);

        std::vector<double> interferers;
        for (size_t j : co) {
          if (txs[j].vehicle == rp.rx) continue;  // the receiver's own signal
          const RxPower* ip = power_at(j, rp.rx);
          if (!ip) continue;  // beyond the evaluation radius of that sender
          interferers.push_back(ip->p_dbm + interference_gain_db(tx.slot, txs[j].slot));
        }

        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rx.rx_rng);
        const RxOutcome out =
            receive(pkt, rx.transmitting, rp.p_dbm, interferers, cfg_.radio, cfg_.bler, u);

        if (measured && rp.distance_m < cfg_.max_bin_m) curve_.add(rp.distance_m, out.kind);
        if (observer_) observer_({t, sender.id, rx.id, rp.distance_m, out.kind, tx.mode});

        if (cfg_.scheduler == SchedulerKind::geo && out.kind == RxOutcomeKind::ok) {
          NeighborRecord& rec = rx.neighbors[sender.id];
          rec.id = sender.id;
          rec.x_m = tx.beacon.x_m;
          rec.y_m = tx.beacon.y_m;
          rec.speed_mps = tx.beacon.speed_mps;
          rec.timestamp_ms = tx.beacon.gen_ms;
          rec.pos_index = tx.beacon.pos_index;
          rec.mark_received();
        }
        if (cfg_.scheduler == SchedulerKind::sps && !rx.transmitting) {
          rx.sensing.add_energy(t, tx.slot.sc, tx.slot.np,
                                dbm_to_mw(rp.p_dbm) / tx.slot.np);
          if (rp.p_dbm > cfg_.radio.sensing_threshold_dbm)
            rx.sensing.add_sci(t, {tx.slot.sc, tx.reserve_np, cfg_.pool.sf, rp.p_dbm});
        }
      }
    }

    for (const PlannedTx& tx : txs) {
      Vehicle& v = vehicle(tx.vehicle);
      v.transmitting = false;
      if (measured) {
        tx_count_ += 1;
        subchannel_use_ += tx.slot.np;
      }
      if (cfg_.scheduler == SchedulerKind::sps && v.reservation) {
        v.reservation->next_tx += cfg_.pool.sf;
        if (!tick_reservation(*v.reservation)) v.reservation.reset();
      }
    }
  }

  void pool_boundary(std::int64_t t, bool measured) {
    // New PosIndices from the current records, committed together: the inputs
    // are beacon contents, never another vehicle's live state.
    std::vector<int> new_pi(vehicles_.size());
    std::vector<NeighborRecord> eligible;
    for (size_t vi = 0; vi < vehicles_.size(); ++vi) {
      Vehicle& v = vehicles_[vi];
      const double self_x = v.last_x + v.last_speed * (static_cast<double>(t) - v.last_ts) * 1e-3;
      eligible.clear();
      for (const auto& [id, rec] : v.neighbors)
        if (rec.eligible()) eligible.push_back(rec);
      const auto queue = build_queue(self_x, v.y, eligible, static_cast<double>(t));
      new_pi[vi] = compute_posindex(queue, v.geo.pos_index, cfg_.pool, cfg_.weights);
      if (debug_ordering_ && debug_watch_ >= 0 && v.id == debug_watch_) {
        std::fprintf(stderr, "t=%lld watch id=%d self_x=%.2f prev_pi=%d new_pi=%d queue:",
                     (long long)t, v.id, self_x, v.geo.pos_index, new_pi[vi]);
        for (size_t q = 0; q < queue.size() && q < 8; ++q)
          std::fprintf(stderr, " [u=%zu id=%d pi=%d cand=%d d=%.1f]", q + 1, queue[q].id,
                       queue[q].pos_index, (int)((queue[q].pos_index + q + 1) % cfg_.pool.n),
                       queue[q].distance_m);
        std::fprintf(stderr, "\n");
      }
    }
    for (size_t vi = 0; vi < vehicles_.size(); ++vi)
      vehicles_[vi].geo.pos_index = new_pi[vi];

    // Ten-period reception window bookkeeping.
    for (Vehicle& v : vehicles_) {
      for (auto it = v.neighbors.begin(); it != v.neighbors.end();) {
        it->second.start_new_period();
        if (!it->second.eligible())
          it = v.neighbors.erase(it);
        else
          ++it;
      }
    }

    // Ground-truth ordering statistics.
    std::vector<std::pair<double, int>> ground;  // (-x, id): front first
    ground.reserve(vehicles_.size());
    for (const Vehicle& v : vehicles_) ground.emplace_back(-v.x, v.id);
    std::sort(ground.begin(), ground.end());

    std::unordered_map<int, int> pred;
    for (size_t i = 1; i < ground.size(); ++i) pred[ground[i].second] = ground[i - 1].second;

    int with_pred = 0, correct = 0, changed = 0;
    for (const Vehicle& v : vehicles_) {
      auto p = pred.find(v.id);
      const int now_pred = p == pred.end() ? -1 : p->second;
      auto was = prev_pred_.find(v.id);
      const int old_pred = was == prev_pred_.end() ? -1 : was->second;
      if (!prev_pred_.empty() && now_pred != old_pred) ++changed;
      if (now_pred < 0) continue;
      ++with_pred;
      const int pi_pred = vehicles_[index_of(now_pred)].geo.pos_index;
      if (v.geo.pos_index == (pi_pred + 1) % cfg_.pool.n)
        ++correct;
      else if (debug_ordering_) {
        const Vehicle& pv = vehicles_[index_of(now_pred)];
        std::fprintf(stderr,
                     "t=%lld incorrect id=%d lane=%d x=%.1f pi=%d | pred=%d lane=%d x=%.1f pi=%d "
                     "| pred_changed=%d neighbors=%zu\n",
                     static_cast<long long>(t), v.id, v.lane, v.x, v.geo.pos_index, pv.id,
                     pv.lane, pv.x, pv.geo.pos_index, now_pred != old_pred ? 1 : 0,
                     v.neighbors.size());
      }
    }

    if (measured) {
      OrderingStat st;
      st.pool_index = t / cfg_.pool.sf;
      st.frac_changed = vehicles_.empty() ? 0.0 : static_cast<double>(changed) / vehicles_.size();
      st.frac_incorrect =
          with_pred == 0 ? 0.0 : 1.0 - static_cast<double>(correct) / with_pred;
      ordering_.push_back(st);
    }
    prev_pred_ = std::move(pred);
  }

  SimConfig cfg_;
  std::vector<Vehicle> vehicles_;
  std::vector<int> order_;  // vehicle indices sorted by x
  std::map<std::int64_t, std::vector<PlannedTx>> planned_;
  ShadowingField shadowing_;
  PdrCurve curve_;
  std::vector<OrderingStat> ordering_;
  std::unordered_map<int, int> prev_pred_;
  std::unordered_map<int, size_t> id_to_index_;
  std::function<void(const ReceptionEvent&)> observer_;
  std::map<std::int64_t, std::vector<TraceRow>> trace_in_;
  std::vector<TraceRow> trace_out_;
  std::uint64_t tx_count_ = 0;
  std::uint64_t subchannel_use_ = 0;
  bool debug_ordering_ = false;
  int debug_watch_ = -1;
};

/// Convenience wrapper: build the population from the scenario and run.
inline RunResult run_simulation(const SimConfig& cfg) {
  Engine engine(cfg, init_scenario(cfg.scenario, cfg.seed));
  return engine.run();
}

}  // namespace cv2x
