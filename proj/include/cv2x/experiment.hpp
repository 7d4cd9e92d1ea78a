#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cv2x/analytic.hpp"
#include "cv2x/io.hpp"
#include "cv2x/sim.hpp"

namespace cv2x {

// Everything a run needs, filled from CLI flags and/or a config file.
struct ExperimentSpec {
  std::vector<SchedulerKind> schedulers = {SchedulerKind::geo};
  std::vector<double> densities_veh_km = {60.0};
  std::vector<int> rates_pps = {10};
  double duration_s = 60.0;
  double warmup_s = 5.0;
  int replications = 1;
  std::uint64_t seed_base = 1;
  std::string out_dir = "out";

  ScenarioConfig scenario;          // density and speed limit filled per cell
  double speed_limit_kmh = 0.0;     // 0: pick by density (140 / 70 km/h)
  RadioConfig radio;
  int subchannels = 4;
  double bin_width_m = 20.0;
  double max_bin_m = 800.0;
  double eval_radius_m = 1000.0;
  GeoWeights weights;
  std::string bler_path;            // empty: built-in logistic default

  DbGrid grid;                      // analytic model
  double interferer_radius_m = 1000.0;

  std::string import_trace_path;
  std::string export_trace_path;
  int trace_every_ms = 100;

  bool progress = true;
};

inline SchedulerKind parse_scheduler(const std::string& name) {
  if (name == "geo") return SchedulerKind::geo;
  if (name == "sps") return SchedulerKind::sps;
  throw std::invalid_argument("unknown scheduler: " + name + " (expected geo or sps)");
}

inline BlerTable bler_for(const ExperimentSpec& spec) {
  return spec.bler_path.empty() ? BlerTable::logistic_default() : load_bler_table(spec.bler_path);
}

inline std::uint64_t run_seed(std::uint64_t base, int cell_index, int replication) {
  return base ^ mix_seed(0x43454C4Cu, static_cast<std::uint64_t>(cell_index),
                         static_cast<std::uint64_t>(replication));
}

inline SimConfig make_sim_config(const ExperimentSpec& spec, SchedulerKind sched, double density,
                                 int pps, std::uint64_t seed, const BlerTable& bler) {
  SimConfig cfg;
  cfg.scheduler = sched;
  cfg.scenario = spec.scenario;
  cfg.scenario.density_veh_km = density;
  cfg.scenario.speed_limit_kmh =
      spec.speed_limit_kmh > 0.0 ? spec.speed_limit_kmh : default_speed_limit_kmh(density);
  cfg.radio = spec.radio;
  cfg.pool = pool_dims(pps, spec.subchannels);
  cfg.bler = bler;
  cfg.weights = spec.weights;
  cfg.duration_s = spec.duration_s;
  cfg.warmup_s = spec.warmup_s;
  cfg.bin_width_m = spec.bin_width_m;
  cfg.max_bin_m = spec.max_bin_m;
  cfg.eval_radius_m = spec.eval_radius_m;
  cfg.seed = seed;
  return cfg;
}

inline AnalyticConfig make_analytic_config(const ExperimentSpec& spec, double density, int pps,
                                           const BlerTable& bler) {
  AnalyticConfig cfg;
  cfg.pool = pool_dims(pps, spec.subchannels);
  cfg.radio = spec.radio;
  cfg.bler = bler;
  cfg.beta_veh_per_m = density / 1000.0;
  cfg.grid = spec.grid;
  cfg.interferer_radius_m = spec.interferer_radius_m;
  return cfg;
}

inline void validate_spec(const ExperimentSpec& spec) {
  if (spec.schedulers.empty() || spec.densities_veh_km.empty() || spec.rates_pps.empty())
    throw std::invalid_argument("nothing to run: schedulers, densities and rates must be non-empty");
  if (spec.duration_s <= spec.warmup_s)
    throw std::invalid_argument("duration must exceed the warm-up period");
  if (spec.replications < 1) throw std::invalid_argument("at least one replication");
  for (int pps : spec.rates_pps) pool_dims(pps, spec.subchannels);  // rejects bad rates early
  for (double d : spec.densities_veh_km)
    if (d <= 0.0) throw std::invalid_argument("density must be positive");
}

struct CellOutcome {
  SchedulerKind scheduler;
  double density_veh_km;
  int pps;
  RunResult pooled;  // replications pooled bin-wise; ordering from replication 0
};

inline std::string cell_dir_name(SchedulerKind sched, double density, int pps) {
  return std::string(to_string(sched)) + "_d" + fmt::f(density, 0) + "_p" + std::to_string(pps);
}

/// Initial population derived from the earliest timestamp of a trace.
inline Population population_from_trace(const std::vector<TraceRow>& rows,
                                        const ScenarioConfig& scenario) {
  if (rows.empty()) throw std::invalid_argument("empty mobility trace");
  std::int64_t t0 = rows.front().t_ms;
  for (const TraceRow& r : rows) t0 = std::min(t0, r.t_ms);
  Population pop;
  for (const TraceRow& r : rows) {
    if (r.t_ms != t0) continue;
    VehicleInit v;
    v.id = r.vehicle_id;
    v.lane = r.lane;
    v.direction = r.lane / std::max(1, scenario.lanes_per_direction);
    v.x_m = r.x_m;
    v.y_m = lane_center_y(r.lane, scenario);
    v.speed_mps = r.v_mps;
    pop.push_back(v);
  }
  return pop;
}

/// Runs the full (scheduler x density x rate) grid, writes per-cell
/// pdr_curve.csv and ordering.csv plus top-level summary.csv and runs.csv.
inline std::vector<CellOutcome> cmd_simulate(const ExperimentSpec& spec) {
  validate_spec(spec);
  const BlerTable bler = bler_for(spec);
  std::vector<TraceRow> imported;
  if (!spec.import_trace_path.empty()) imported = load_trace(spec.import_trace_path);

  const std::filesystem::path out{spec.out_dir};
  std::vector<CellOutcome> outcomes;
  std::vector<SummaryRow> summary;
  std::string runs = "scheduler,density,pps,replication,seed\n";

  int cell_index = 0;
  for (SchedulerKind sched : spec.schedulers) {
    for (double density : spec.densities_veh_km) {
      for (int pps : spec.rates_pps) {
        CellOutcome cell{sched, density, pps, {}};
        for (int rep = 0; rep < spec.replications; ++rep) {
          const std::uint64_t seed = run_seed(spec.seed_base, cell_index, rep);
          SimConfig cfg = make_sim_config(spec, sched, density, pps, seed, bler);
          if (!spec.export_trace_path.empty()) cfg.trace_every_ms = spec.trace_every_ms;
          if (spec.progress)
            std::cerr << "run " << cell_dir_name(sched, density, pps) << " rep " << rep
                      << " seed " << seed << "\n";
          Engine engine(cfg, imported.empty() ? init_scenario(cfg.scenario, seed)
                                              : population_from_trace(imported, cfg.scenario));
          if (!imported.empty()) engine.set_mobility_trace(imported);
          RunResult r = engine.run();
          runs += std::string(to_string(sched)) + "," + fmt::f(density, 0) + "," +
                  std::to_string(pps) + "," + std::to_string(rep) + "," + std::to_string(seed) +
                  "\n";
          if (rep == 0) {
            if (!spec.export_trace_path.empty())
              write_file_atomic(spec.export_trace_path, trace_csv(r.trace));
            r.trace.clear();
            cell.pooled = std::move(r);
          } else {
            cell.pooled.curve.merge(r.curve);
            cell.pooled.tx_count += r.tx_count;
            cell.pooled.subchannel_use += r.subchannel_use;
          }
        }
        cell.pooled.pdr90_m = pdr90_distance(cell.pooled.curve);

        const std::filesystem::path dir = out / cell_dir_name(sched, density, pps);
        write_file_atomic(dir / "pdr_curve.csv", pdr_curve_csv(cell.pooled.curve));
        if (sched == SchedulerKind::geo)
          write_file_atomic(dir / "ordering.csv", ordering_csv(cell.pooled.ordering));
        summary.push_back({sched, density, pps, cell.pooled.pdr90_m});
        outcomes.push_back(std::move(cell));
        ++cell_index;
      }
    }
  }
  write_file_atomic(out / "summary.csv", summary_csv(summary));
  write_file_atomic(out / "runs.csv", runs);
  return outcomes;
}

inline std::vector<double> bin_centers(double bin_width, double max_m) {
  std::vector<double> out;
  for (double lo = 0.0; lo + bin_width <= max_m + 1e-9; lo += bin_width)
    out.push_back(lo + bin_width / 2.0);
  return out;
}

/// Evaluates the closed-form model over the distance sweep and writes
/// analytic_curve.csv. Restricted to the geo scheme's parameters.
inline std::vector<AnalyticModel::Row> cmd_analytic(const ExperimentSpec& spec) {
  if (spec.densities_veh_km.empty() || spec.rates_pps.empty())
    throw std::invalid_argument("analytic evaluation needs a density and a rate");
  const BlerTable bler = bler_for(spec);
  const AnalyticModel model(
      make_analytic_config(spec, spec.densities_veh_km.front(), spec.rates_pps.front(), bler));
  const auto rows = model.sweep(bin_centers(spec.bin_width_m, spec.max_bin_m));
  write_file_atomic(std::filesystem::path(spec.out_dir) / "analytic_curve.csv",
                    analytic_curve_csv(rows));
  return rows;
}

struct ValidationReport {
  struct BinGap {
    double lo_m, hi_m, pdr_sim, pdr_analytic, abs_gap;
  };
  std::vector<BinGap> bins;
  double mean_abs_gap = 0.0;          // over all populated bins
  double mean_abs_gap_500m = 0.0;     // over populated bins up to 500 m
};

/// Fig.-6-style loop: one simulated cell vs the closed-form curve under the
/// same configuration. Writes validation.csv and returns the gap report.
inline ValidationReport cmd_validate(const ExperimentSpec& spec) {
  validate_spec(spec);
  const BlerTable bler = bler_for(spec);
  const double density = spec.densities_veh_km.front();
  const int pps = spec.rates_pps.front();

  SimConfig cfg = make_sim_config(spec, SchedulerKind::geo, density, pps,
                                  run_seed(spec.seed_base, 0, 0), bler);
  if (spec.progress)
    std::cerr << "validate " << cell_dir_name(SchedulerKind::geo, density, pps) << " seed "
              << cfg.seed << "\n";
  const RunResult sim = run_simulation(cfg);
  const AnalyticModel model(make_analytic_config(spec, density, pps, bler));

  ValidationReport report;
  double sum = 0.0, sum500 = 0.0;
  int n = 0, n500 = 0;
  std::string csv = "bin_lo_m,bin_hi_m,pdr_sim,pdr_analytic,abs_gap\n";
  for (const PdrBin& b : sim.curve.bins()) {
    if (b.attempts == 0) continue;
    const double center = (b.lo_m + b.hi_m) / 2.0;
    const double pa = model.pdr(center);
    const double gap = std::abs(b.pdr() - pa);
    report.bins.push_back({b.lo_m, b.hi_m, b.pdr(), pa, gap});
    csv += fmt::f(b.lo_m, 1) + "," + fmt::f(b.hi_m, 1) + "," + fmt::f(b.pdr()) + "," +
           fmt::f(pa) + "," + fmt::f(gap) + "\n";
    sum += gap;
    ++n;
    if (b.hi_m <= 500.0 + 1e-9) {
      sum500 += gap;
      ++n500;
    }
  }
  if (n == 0) throw std::invalid_argument("validation produced no populated distance bins");
  report.mean_abs_gap = sum / n;
  report.mean_abs_gap_500m = n500 > 0 ? sum500 / n500 : 0.0;
  write_file_atomic(std::filesystem::path(spec.out_dir) / "validation.csv", csv);
  return report;
}

}  // namespace cv2x
