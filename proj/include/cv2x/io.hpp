#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cv2x/analytic.hpp"
#include "cv2x/mobility.hpp"
#include "cv2x/phy.hpp"
#include "cv2x/sim.hpp"

namespace cv2x {

namespace fmt {
inline std::string f(double v, int prec = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
  return buf;
}
}  // namespace fmt

/// Writes through a temporary file and renames, so partially written output
/// never appears under the final name.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- pdr curve / ordering / summary ----

inline std::string pdr_curve_csv(const PdrCurve& curve) {
  std::string out = "bin_lo_m,bin_hi_m,attempts,ok,hd,sen,pro,col,pdr\n";
  for (const PdrBin& b : curve.bins()) {
    out += fmt::f(b.lo_m, 1) + "," + fmt::f(b.hi_m, 1) + "," + std::to_string(b.attempts) + "," +
           std::to_string(b.ok) + "," + std::to_string(b.hd) + "," + std::to_string(b.sen) + "," +
           std::to_string(b.pro) + "," + std::to_string(b.col) + "," + fmt::f(b.pdr()) + "\n";
  }
  return out;
}

inline std::string ordering_csv(const std::vector<OrderingStat>& stats) {
  std::string out = "pool_index,frac_changed,frac_incorrect\n";
  for (const OrderingStat& s : stats)
    out += std::to_string(s.pool_index) + "," + fmt::f(s.frac_changed) + "," +
           fmt::f(s.frac_incorrect) + "\n";
  return out;
}

struct SummaryRow {
  SchedulerKind scheduler = SchedulerKind::geo;
  double density_veh_km = 0.0;
  int pps = 0;
  double pdr90_m = 0.0;
};

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "scheduler,density,pps,pdr90_m\n";
  for (const SummaryRow& r : rows)
    out += std::string(to_string(r.scheduler)) + "," + fmt::f(r.density_veh_km, 0) + "," +
           std::to_string(r.pps) + "," + fmt::f(r.pdr90_m, 2) + "\n";
  return out;
}

inline std::string analytic_curve_csv(const std::vector<AnalyticModel::Row>& rows) {
  std::string out = "d_m,delta_hd,delta_sen,delta_pro,delta_col,pdr\n";
  for (const auto& r : rows)
    out += fmt::f(r.d_m, 1) + "," + fmt::f(r.hd) + "," + fmt::f(r.sen) + "," + fmt::f(r.pro) +
           "," + fmt::f(r.col) + "," + fmt::f(r.pdr) + "\n";
  return out;
}

// ---- BLER table files ----
// Plain text, one header line `class snr_db bler`, rows sorted by SNR.

inline std::string bler_table_text(const BlerTable& table) {
  std::string out = "class snr_db bler\n";
  for (PacketClass cls : {PacketClass::hf, PacketClass::lf})
    for (const BlerTable::Point& p : table.points(cls))
      out += std::string(to_string(cls)) + " " + fmt::f(p.snr_db, 3) + " " + fmt::f(p.bler) + "\n";
  return out;
}

inline BlerTable parse_bler_table(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw std::invalid_argument("empty BLER table file");
  std::vector<BlerTable::Point> hf, lf;
  std::string cls;
  double snr, bler;
  while (in >> cls >> snr >> bler) {
    if (cls == "HF")
      hf.push_back({snr, bler});
    else if (cls == "LF")
      lf.push_back({snr, bler});
    else
      throw std::invalid_argument("unknown packet class in BLER table: " + cls);
  }
  BlerTable t;
  if (!hf.empty()) t.set_curve(PacketClass::hf, std::move(hf));
  if (!lf.empty()) t.set_curve(PacketClass::lf, std::move(lf));
  if (!t.has_curve(PacketClass::hf) || !t.has_curve(PacketClass::lf))
    throw std::invalid_argument("BLER table file must provide both HF and LF curves");
  return t;
}

inline BlerTable load_bler_table(const std::filesystem::path& path) {
  return parse_bler_table(read_file(path));
}

// ---- mobility traces ----
// CSV `t_ms,vehicle_id,lane,x_m,v_mps`.

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::string out = "t_ms,vehicle_id,lane,x_m,v_mps\n";
  for (const TraceRow& r : rows)
    out += std::to_string(r.t_ms) + "," + std::to_string(r.vehicle_id) + "," +
           std::to_string(r.lane) + "," + fmt::f(r.x_m, 3) + "," + fmt::f(r.v_mps, 3) + "\n";
  return out;
}

inline std::vector<TraceRow> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty trace file");
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRow r;
    char comma;
    std::istringstream ls(line);
    std::int64_t t;
    if (!(ls >> t >> comma >> r.vehicle_id >> comma >> r.lane >> comma >> r.x_m >> comma >>
          r.v_mps))
      throw std::invalid_argument("bad trace row: " + line);
    r.t_ms = t;
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<TraceRow> load_trace(const std::filesystem::path& path) {
  return parse_trace_csv(read_file(path));
}

}  // namespace cv2x
