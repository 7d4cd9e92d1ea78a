#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "cv2x/experiment.hpp"

namespace {

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const std::string& item : raw) {
    size_t start = 0;
    while (start <= item.size()) {
      const size_t comma = item.find(',', start);
      const std::string tok = item.substr(start, comma == std::string::npos ? std::string::npos
                                                                            : comma - start);
      if (!tok.empty()) out.push_back(tok);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

struct CliState {
  cv2x::ExperimentSpec spec;
  std::vector<std::string> schedulers = {"geo"};
  std::vector<std::string> densities = {"60"};
  std::vector<std::string> rates = {"10"};
  std::vector<double> ibe_mask;
  bool quiet = false;
};

void add_common_options(CLI::App* cmd, CliState& st) {
  cv2x::ExperimentSpec& s = st.spec;
  cmd->add_option("--density", st.densities, "Traffic densities in vehicles/km (comma separated)");
  cmd->add_option("--pps", st.rates, "Packet rates in packets/second: 10, 20 or 50");
  cmd->add_option("--duration", s.duration_s, "Simulated seconds, warm-up included");
  cmd->add_option("--warmup", s.warmup_s, "Warm-up seconds excluded from metrics");
  cmd->add_option("--reps", s.replications, "Replications per cell, pooled bin-wise");
  cmd->add_option("--seed", s.seed_base, "Base seed; per-run seeds derive from it");
  cmd->add_option("--out", s.out_dir, "Output directory");
  cmd->add_flag("--quiet", st.quiet, "Suppress the progress line");

  cmd->add_option("--length", s.scenario.length_m, "Highway segment length in meters");
  cmd->add_option("--lanes", s.scenario.lanes_per_direction, "Lanes per driving direction");
  cmd->add_option("--directions", s.scenario.directions, "Driving directions: 1 or 2");
  cmd->add_option("--lane-width", s.scenario.lane_width_m, "Lane width in meters");
  cmd->add_option("--speed-limit", s.speed_limit_kmh,
                  "Speed limit km/h (default: 140 below 90 veh/km, 70 above)");
  cmd->add_option("--speed-spread", s.scenario.speed_spread,
                  "Speeds drawn uniform in [limit*(1-spread), limit]");

  cmd->add_option("--sc", s.subchannels, "Sub-channels per sub-frame");
  cmd->add_option("--tx-power", s.radio.tx_power_dbm, "Transmit power in dBm");
  cmd->add_option("--noise-figure", s.radio.noise_figure_db, "Receiver noise figure in dB");
  cmd->add_option("--sensing-threshold", s.radio.sensing_threshold_dbm,
                  "Sensing power threshold in dBm");
  cmd->add_option("--shadowing-sigma", s.radio.shadowing_sigma_db, "Shadowing sigma in dB");
  cmd->add_option("--shadowing-decorr", s.radio.shadowing_decorr_m,
                  "Shadowing decorrelation distance in meters");
  cmd->add_option("--pl-intercept", s.radio.pl_intercept_db, "Pathloss intercept in dB");
  cmd->add_option("--pl-slope", s.radio.pl_slope_db_decade, "Pathloss slope in dB/decade");
  cmd->add_option("--pl-breakpoint", s.radio.pl_breakpoint_m, "Pathloss breakpoint in meters");
  cmd->add_option("--pl-slope2", s.radio.pl_slope2_db_decade,
                  "Pathloss slope past the breakpoint in dB/decade");
  cmd->add_option("--ibe-mask", st.ibe_mask,
                  "In-band emission attenuation per sub-channel offset in dB (enables leakage)");
  cmd->add_option("--bler-table", s.bler_path, "BLER table file (class snr_db bler)");

  cmd->add_option("--mu", s.weights.mu, "PosIndex vote base weight");
  cmd->add_option("--eta", s.weights.eta, "PosIndex vote weight per meter of distance");

  cmd->add_option("--bin-width", s.bin_width_m, "PDR distance bin width in meters");
  cmd->add_option("--max-bin", s.max_bin_m, "Largest binned distance in meters");
  cmd->add_option("--eval-radius", s.eval_radius_m, "Link evaluation radius in meters");

  cmd->add_option("--grid-res", s.grid.res_db, "Analytic dB-grid resolution");
  cmd->add_option("--grid-min", s.grid.min_db, "Analytic dB-grid lower edge");
  cmd->add_option("--grid-max", s.grid.max_db, "Analytic dB-grid upper edge");
  cmd->add_option("--interferer-radius", s.interferer_radius_m,
                  "Analytic interferer truncation radius in meters");

  cmd->add_option("--import-trace", s.import_trace_path, "Replay mobility from a trace CSV");
  cmd->add_option("--export-trace", s.export_trace_path, "Write the mobility trace CSV");
  cmd->add_option("--trace-every", s.trace_every_ms, "Trace sampling interval in ms");
}

void finish_spec(CliState& st) {
  st.spec.schedulers.clear();
  for (const std::string& name : split_list(st.schedulers))
    st.spec.schedulers.push_back(cv2x::parse_scheduler(name));
  st.spec.densities_veh_km.clear();
  for (const std::string& d : split_list(st.densities))
    st.spec.densities_veh_km.push_back(std::stod(d));
  st.spec.rates_pps.clear();
  for (const std::string& r : split_list(st.rates)) st.spec.rates_pps.push_back(std::stoi(r));
  st.spec.radio.ibe_mask_db = st.ibe_mask;
  st.spec.progress = !st.quiet;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"C-V2X mode-4 sidelink simulator: geo-based scheduling vs sensing-based SPS"};
  app.set_config("--config", "", "Read options from an INI/TOML file");
  app.require_subcommand(1);

  CliState sim_st, an_st, val_st, sweep_st;
  sweep_st.schedulers = {"sps", "geo"};
  sweep_st.densities = {"60", "120"};
  sweep_st.rates = {"10", "20", "50"};

  CLI::App* sim = app.add_subcommand("simulate", "Run the simulator over a parameter grid");
  sim->add_option("--scheduler", sim_st.schedulers, "geo, sps or a comma separated list");
  add_common_options(sim, sim_st);

  CLI::App* analytic = app.add_subcommand("analytic", "Evaluate the closed-form PDR model");
  add_common_options(analytic, an_st);

  CLI::App* validate =
      app.add_subcommand("validate", "Run simulator and closed-form model under one config");
  add_common_options(validate, val_st);

  CLI::App* sweep =
      app.add_subcommand("sweep", "Full comparison grid: both schedulers, 60/120 veh/km, all rates");
  sweep->add_option("--scheduler", sweep_st.schedulers, "Override the scheduler list");
  add_common_options(sweep, sweep_st);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed() || sweep->parsed()) {
      CliState& st = sim->parsed() ? sim_st : sweep_st;
      finish_spec(st);
      const auto outcomes = cv2x::cmd_simulate(st.spec);
      for (const auto& cell : outcomes)
        std::cout << cv2x::cell_dir_name(cell.scheduler, cell.density_veh_km, cell.pps)
                  << " pdr90_m=" << cv2x::fmt::f(cell.pooled.pdr90_m, 2) << "\n";
      std::cout << "wrote " << st.spec.out_dir << "/summary.csv\n";
    } else if (analytic->parsed()) {
      finish_spec(an_st);
      cv2x::cmd_analytic(an_st.spec);
      std::cout << "wrote " << an_st.spec.out_dir << "/analytic_curve.csv\n";
    } else if (validate->parsed()) {
      finish_spec(val_st);
      const auto report = cv2x::cmd_validate(val_st.spec);
      std::cout << "mean_abs_gap=" << cv2x::fmt::f(report.mean_abs_gap) << "\n";
      std::cout << "mean_abs_gap_500m=" << cv2x::fmt::f(report.mean_abs_gap_500m) << "\n";
      std::cout << "wrote " << val_st.spec.out_dir << "/validation.csv\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
