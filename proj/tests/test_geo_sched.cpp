#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "cv2x/geo_sched.hpp"

using namespace cv2x;
using Catch::Approx;

namespace {
NeighborRecord rec(int id, double x, double v = 0.0, double ts = 0.0, int pi = 0,
                   double y = 0.0) {
  NeighborRecord r;
  r.id = id;
  r.x_m = x;
  r.y_m = y;
  r.speed_mps = v;
  r.timestamp_ms = ts;
  r.pos_index = pi;
  r.mark_received();
  return r;
}
}  // namespace

TEST_CASE("estimate_position extrapolates linearly") {
  CHECK(estimate_position(rec(0, 100.0, 20.0, 0.0), 50.0) == Approx(101.0));
  CHECK(estimate_position(rec(0, 100.0, 0.0, 0.0), 12345.0) == Approx(100.0));
  CHECK(estimate_position(rec(0, 0.0, -30.0, 0.0), 100.0) == Approx(-3.0));
}

TEST_CASE("record eligibility follows the ten-period reception window") {
  NeighborRecord r = rec(0, 0.0);
  CHECK(r.eligible());
  for (int i = 0; i < 9; ++i) r.start_new_period();
  CHECK(r.eligible());
  r.start_new_period();
  CHECK_FALSE(r.eligible());
  r.mark_received();
  CHECK(r.eligible());
}

TEST_CASE("build_queue keeps only vehicles ahead, nearest first") {
  std::vector<NeighborRecord> n = {rec(1, -10.0), rec(2, 5.0), rec(3, 40.0)};
  auto q = build_queue(0.0, 0.0, n, 0.0);
  REQUIRE(q.size() == 2);
  CHECK(q[0].id == 2);
  CHECK(q[1].id == 3);
  CHECK(q[0].distance_m == Approx(5.0));

  CHECK(build_queue(0.0, 0.0, {}, 0.0).empty());

  std::vector<NeighborRecord> stale = {rec(1, 10.0)};
  stale[0].rx_bitmap = 0;
  CHECK(build_queue(0.0, 0.0, stale, 0.0).empty());
}

TEST_CASE("build_queue tie-breaks identical positions by id and is order-independent") {
  std::vector<NeighborRecord> n = {rec(9, 25.0), rec(4, 25.0), rec(7, 12.0)};
  auto q = build_queue(0.0, 0.0, n, 0.0);
  REQUIRE(q.size() == 3);
  CHECK(q[0].id == 7);
  CHECK(q[1].id == 4);
  CHECK(q[2].id == 9);

  std::mt19937 shuffle_rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(n.begin(), n.end(), shuffle_rng);
    auto q2 = build_queue(0.0, 0.0, n, 0.0);
    REQUIRE(q2.size() == q.size());
    for (size_t i = 0; i < q.size(); ++i) CHECK(q2[i].id == q[i].id);
  }
}

TEST_CASE("queue ordering consensus: extrapolation makes all receivers agree") {
  // Receivers at different places and times still derive the same order
  // because the estimate is a pure function of the beacon contents.
  std::vector<NeighborRecord> n = {rec(1, 100.0, 30.0, 0.0), rec(2, 104.0, 10.0, 0.0),
                                   rec(3, 90.0, 33.0, 0.0)};
  auto order_at = [&](double now) {
    std::vector<std::pair<double, int>> est;
    for (const auto& r : n) est.emplace_back(estimate_position(r, now), r.id);
    std::sort(est.begin(), est.end());
    std::vector<int> ids;
    for (auto& [x, id] : est) ids.push_back(id);
    return ids;
  };
  // At t=600ms: 1 -> 118, 2 -> 110, 3 -> 109.8 : order 3,2,1
  CHECK(order_at(600.0) == std::vector<int>{3, 2, 1});
}

TEST_CASE("compute_posindex follows the nearest predecessor in the simple case") {
  PoolConfig cfg = pool_dims(10, 4);
  std::vector<QueueEntry> q = {{5, 9, 20.0, 20.0}};
  CHECK(compute_posindex(q, 77, cfg) == 10);

  // Wrap-around at N-1.
  q = {{5, cfg.n - 1, 20.0, 20.0}};
  CHECK(compute_posindex(q, 77, cfg) == 0);

  // Empty queue keeps the current PosIndex.
  CHECK(compute_posindex({}, 77, cfg) == 77);
}

TEST_CASE("compute_posindex weighting beats the unweighted majority") {
  PoolConfig cfg = pool_dims(10, 4);
  // Nearest-first: PI 16 at 50 m, PI 15 at 100 m, PI 9 at 300 m.
  std::vector<QueueEntry> q = {{1, 16, 50.0, 50.0}, {2, 15, 100.0, 100.0}, {3, 9, 300.0, 300.0}};
  // Candidates: 17 (score 15+20=35) vs 12 (score 40).
  CHECK(compute_posindex(q, 0, cfg) == 12);

  // With eta = 0 the scheme reduces to the unweighted vote and returns 17.
  CHECK(compute_posindex(q, 0, cfg, {10.0, 0.0}) == 17);
}

TEST_CASE("posindex shadowing: any vehicle behind a beacon with PI X answers X+1") {
  PoolConfig cfg = pool_dims(20, 4);
  for (int x = 0; x < cfg.n; x += 13) {
    std::vector<QueueEntry> q = {{8, x, 35.0, 35.0}};
    CHECK(compute_posindex(q, 3, cfg) == (x + 1) % cfg.n);
  }
}

TEST_CASE("perfect ordering is a fixed point of compute_posindex") {
  PoolConfig cfg = pool_dims(50, 4);
  const int v_count = 40;
  const double spacing = 25.0;
  // Convoy: vehicle k at x = -k*spacing holds PosIndex k.
  for (int k = 1; k < v_count; ++k) {
    std::vector<QueueEntry> q;
    for (int u = 1; u <= k; ++u)
      q.push_back({k - u, k - u, u * spacing, 0.0});
    CHECK(compute_posindex(q, k, cfg) == k);
  }
}

TEST_CASE("consecutive PosIndices produce collision-free normal assignments") {
  for (int lambda : {10, 20, 50}) {
    PoolConfig cfg = pool_dims(lambda, 4);
    std::set<std::pair<int, int>> slots;
    for (int pi = 0; pi < cfg.n; ++pi) {
      ResourceAssignment a = assignment_for(pi, 1, cfg);
      CHECK(slots.emplace(a.sf, a.sc).second);
    }
  }
}

TEST_CASE("next_mode long-run random fraction matches the run-length bounds") {
  struct Case {
    int lambda;
    double expected;
  };
  for (auto [lambda, expected] : {Case{10, 0.1}, Case{20, 0.05}, Case{50, 0.02}}) {
    PoolConfig cfg = pool_dims(lambda, 4);
    CHECK(cfg.p_random() == Approx(expected));
    Rng rng = make_rng(7, lambda);
    SchedulerState st{0, uniform_int(rng, cfg.w_min, cfg.w_max)};
    const int n = 200000;
    int random_count = 0;
    for (int i = 0; i < n; ++i)
      if (next_mode(st, cfg, rng) == TxMode::random) ++random_count;
    CHECK(static_cast<double>(random_count) / n == Approx(expected).margin(0.003));
  }

  // Degenerate bounds: every transmission is the random one.
  PoolConfig cfg = pool_dims(10, 4);
  cfg.w_min = cfg.w_max = 1;
  Rng rng = make_rng(7, 99);
  SchedulerState st{0, 1};
  for (int i = 0; i < 100; ++i) CHECK(next_mode(st, cfg, rng) == TxMode::random);
}

TEST_CASE("select_assignment normal mode and errors") {
  PoolConfig cfg = pool_dims(50, 4);
  Rng rng = make_rng(1, 2);
  SchedulerState st{3, 10};
  ResourceAssignment a = select_assignment(st, TxMode::normal, 1, cfg, rng);
  CHECK(a.sf == 3);
  CHECK(a.sc == 0);
  CHECK_THROWS_AS(select_assignment(st, TxMode::normal, 5, cfg, rng), std::domain_error);
}

TEST_CASE("random assignments cover the window uniformly") {
  PoolConfig cfg = pool_dims(50, 4);
  SchedulerState st{3, 10};
  Rng rng = make_rng(21, 4);
  std::map<std::pair<int, int>, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    ResourceAssignment a = select_assignment(st, TxMode::random, 1, cfg, rng);
    counts[{a.sf, a.sc}]++;
  }
  // Window {32,33,34}: sub-channel 2 in sub-frames 12..14.
  REQUIRE(counts.size() == 3);
  double chi2 = 0.0;
  const double expected = n / 3.0;
  for (int sf = 12; sf <= 14; ++sf) {
    auto it = counts.find({sf, 2});
    REQUIRE(it != counts.end());
    chi2 += (it->second - expected) * (it->second - expected) / expected;
  }
  CHECK(chi2 < 9.21);  // chi-square 1% critical value, 2 dof

  // np=2 window picks use the np=2 column mapping.
  for (int i = 0; i < 200; ++i) {
    ResourceAssignment a = select_assignment(st, TxMode::random, 2, cfg, rng);
    CHECK(a.np == 2);
    CHECK((a.sc == 0 || a.sc == 2));
    CHECK(a.sf >= 12);
    CHECK(a.sf <= 14);
  }
}

TEST_CASE("two vehicles sharing a PosIndex detect each other via random transmissions") {
  // A transmits in random mode; B (same PosIndex) misses it only when B also
  // transmits, in the same sub-frame. With the rate defaults that failure
  // probability is p_ran/(2M+1), i.e. detection with ~99.1% at 10 pps.
  PoolConfig cfg = pool_dims(10, 4);
  Rng rng = make_rng(31, 7);
  SchedulerState a{123, 0};
  SchedulerState b{123, 0};
  a.window_countdown = uniform_int(rng, cfg.w_min, cfg.w_max);
  b.window_countdown = uniform_int(rng, cfg.w_min, cfg.w_max);

  long a_random = 0, detected = 0;
  const int pools = 400000;
  for (int p = 0; p < pools; ++p) {
    const TxMode ma = next_mode(a, cfg, rng);
    const TxMode mb = next_mode(b, cfg, rng);
    const ResourceAssignment ta = select_assignment(a, ma, 1, cfg, rng);
    const ResourceAssignment tb = select_assignment(b, mb, 1, cfg, rng);
    if (ma != TxMode::random) continue;
    ++a_random;
    if (tb.sf != ta.sf) ++detected;  // B listens in A's sub-frame
  }
  const double p_detect = static_cast<double>(detected) / a_random;
  CHECK(p_detect == Approx(0.991).margin(0.005));
  CHECK(p_detect > 0.99);

  // Both random on the same slot: p_ran^2 / (2M+1) per pool.
  long same_slot = 0;
  Rng rng2 = make_rng(32, 8);
  SchedulerState c{200, 5}, d{200, 9};
  for (int p = 0; p < pools; ++p) {
    const TxMode mc = next_mode(c, cfg, rng2);
    const TxMode md = next_mode(d, cfg, rng2);
    const ResourceAssignment tc = select_assignment(c, mc, 1, cfg, rng2);
    const ResourceAssignment td = select_assignment(d, md, 1, cfg, rng2);
    if (mc == TxMode::random && md == TxMode::random && tc == td) ++same_slot;
  }
  const double expected = cfg.p_random() * cfg.p_random() / (2 * cfg.m + 1);
  CHECK(static_cast<double>(same_slot) / pools == Approx(expected).margin(3e-4));
}
