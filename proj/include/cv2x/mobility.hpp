#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cv2x/rng.hpp"

namespace cv2x {

// Synthetic highway: a straight segment with a fixed number of lanes per
// direction, constant-speed vehicles and wrap-around at the segment ends.
struct ScenarioConfig {
  double length_m = 5000.0;
  int lanes_per_direction = 3;
  int directions = 2;
  double lane_width_m = 4.0;
  double density_veh_km = 60.0;
  double speed_limit_kmh = 140.0;
  double speed_spread = 0.1;  // speeds drawn uniform in [limit*(1-spread), limit]

  int lane_count() const { return lanes_per_direction * directions; }
};

/// Highway speed limit used when the caller does not override it: dense
/// traffic moves at 70 km/h, light traffic at 140 km/h.
inline double default_speed_limit_kmh(double density_veh_km) {
  return density_veh_km >= 90.0 ? 70.0 : 140.0;
}

struct VehicleInit {
  int id = 0;
  int lane = 0;       // 0..lane_count-1, second half drives in -x
  int direction = 0;  // 0: +x, 1: -x
  double x_m = 0.0;
  double y_m = 0.0;
  double speed_mps = 0.0;  // signed, matches direction
};

using Population = std::vector<VehicleInit>;

inline double lane_center_y(int lane, const ScenarioConfig& cfg) {
  const int dir = lane / cfg.lanes_per_direction;
  const int idx = lane % cfg.lanes_per_direction;
  const double y = (idx + 0.5) * cfg.lane_width_m;
  return dir == 0 ? y : -y;
}

// Vehicles are spread evenly over the lanes; within a lane they sit on an
// equal-spacing lattice with a uniform jitter small enough to preserve the
// in-lane ordering.
inline Population init_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  if (cfg.density_veh_km <= 0.0) throw std::invalid_argument("traffic density must be positive");
  if (cfg.length_m <= 0.0) throw std::invalid_argument("segment length must be positive");
  if (cfg.lanes_per_direction < 1 || cfg.directions < 1 || cfg.directions > 2)
    throw std::invalid_argument("bad lane layout");
  if (cfg.speed_spread < 0.0 || cfg.speed_spread >= 1.0)
    throw std::invalid_argument("speed spread must be in [0, 1)");

  const int total = static_cast<int>(std::lround(cfg.density_veh_km * cfg.length_m / 1000.0));
  if (total < 1) throw std::invalid_argument("scenario holds no vehicles");
  const int lanes = cfg.lane_count();

  Rng rng = make_rng(seed, 0x5343454eu);  // scenario stream
  Population pop;
  pop.reserve(total);
  int id = 0;
  for (int lane = 0; lane < lanes; ++lane) {
    const int in_lane = total / lanes + (lane < total % lanes ? 1 : 0);
    if (in_lane == 0) continue;
    const double spacing = cfg.length_m / in_lane;
    const int dir = lane / cfg.lanes_per_direction;
    const double limit = cfg.speed_limit_kmh / 3.6;
    for (int k = 0; k < in_lane; ++k) {
      VehicleInit v;
      v.id = id++;
      v.lane = lane;
      v.direction = dir;
      const double jitter = uniform_real(rng, -0.45, 0.45);
      v.x_m = std::fmod((k + 0.5 + jitter) * spacing + cfg.length_m, cfg.length_m);
      v.y_m = lane_center_y(lane, cfg);
      const double speed = uniform_real(rng, limit * (1.0 - cfg.speed_spread), limit);
      v.speed_mps = dir == 0 ? speed : -speed;
      pop.push_back(v);
    }
  }
  return pop;
}

// One sampled kinematic state, the unit of trace export/import.
struct TraceRow {
  std::int64_t t_ms = 0;
  int vehicle_id = 0;
  int lane = 0;
  double x_m = 0.0;
  double v_mps = 0.0;
};

/// Advances every vehicle by speed*dt with wrap-around at the segment ends.
inline void step(Population& pop, double dt_ms, double length_m) {
  if (dt_ms < 0.0) throw std::invalid_argument("negative time step");
  if (dt_ms == 0.0) return;
  const double dt_s = dt_ms * 1e-3;
  for (VehicleInit& v : pop) {
    v.x_m = std::fmod(v.x_m + v.speed_mps * dt_s, length_m);
    if (v.x_m < 0.0) v.x_m += length_m;
  }
}

}  // namespace cv2x
