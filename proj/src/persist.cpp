#include "qzd/persist.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qzd/errors.hpp"

namespace qzd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Shortest text that round-trips the double exactly.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_for_writing(const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  return out;
}

}  // namespace

json run_meta(const RunOutcome& run, const std::string& experiment) {
  const auto& c = run.record.config;
  const auto& g = *run.setup.grid;
  json meta = {
      {"experiment", experiment},
      {"run_id", run.run_id},
      {"particle", {{"name", run.setup.particle.name}, {"mass", run.setup.particle.mass}}},
      {"grid", {{"x_min", g.x_min()}, {"x_max", g.x_max()}, {"n", g.size()}}},
      {"potential",
       {{"shape", "gaussian"},
        {"kind", to_string(run.setup.potential.kind)},
        {"v0", run.setup.potential.v0},
        {"xp", run.setup.potential.xp}}},
      {"packet", {{"x0", run.setup.x0}, {"delta_x", run.setup.delta_x}}},
      {"config",
       {{"mass", c.mass},
        {"delta_v", c.delta_v},
        {"horizon", c.horizon},
        {"n_measurements", c.n_measurements},
        {"max_substep", c.max_substep},
        {"substeps_per_interval", run.record.substeps_per_interval},
        {"snapshot_stride", c.snapshot_stride},
        {"record_flux_at", c.record_flux_at ? json(*c.record_flux_at) : json(nullptr)},
        {"leak_tolerance", c.leak_tolerance}}},
      {"survival", run.survival},
      {"t_telep_analytic", number_or_null(run.setup.t_telep_analytic)},
      {"t_telep_measured", run.t_telep_measured ? json(*run.t_telep_measured) : json(nullptr)},
      {"max_boundary_fraction", run.record.max_boundary_fraction},
      {"final_overlaps",
       {{"alpha_abs2", number_or_null(std::norm(run.final_overlaps.alpha))},
        {"beta_abs2", number_or_null(std::norm(run.final_overlaps.beta))}}},
  };
  if (run.continuity) {
    const auto& r = *run.continuity;
    meta["continuity"] = {{"max_abs_residual", r.max_abs_residual()},
                          {"max_abs_flux_integral", r.max_abs_flux_integral()},
                          {"final_decrement", r.decrement_series.back()},
                          {"final_flux_integral", r.flux_integral_series.back()}};
  } else {
    meta["continuity"] = nullptr;
  }
  return meta;
}

void write_continuity_csv(const ContinuityReport<double>& report, const fs::path& file) {
  auto out = open_for_writing(file);
  out << "t,decrement,flux_integral,residual,norm\n";
  for (std::size_t i = 0; i < report.times.size(); ++i) {
    out << num(report.times[i]) << ',' << num(report.decrement_series[i]) << ','
        << num(report.flux_integral_series[i]) << ',' << num(report.residual_series[i]) << ','
        << num(report.norm_series[i]) << '\n';
  }
}

void write_run(const RunOutcome& run, const std::string& experiment, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create '" + dir.string() + "': " + ec.message());

  open_for_writing(dir / "meta.json") << run_meta(run, experiment).dump(2) << '\n';

  const auto& rec = run.record;
  {
    auto out = open_for_writing(dir / "series.csv");
    out << "t,survival,region_prob,flux\n";
    for (std::size_t i = 0; i < rec.sample_times.size(); ++i) {
      out << num(rec.sample_times[i]) << ',' << num(rec.sample_norm[i]) << ','
          << num(rec.sample_region_prob[i]) << ',';
      if (!rec.flux_series.empty()) out << num(rec.flux_series[i]);
      out << '\n';
    }
  }
  if (!rec.snapshots.empty()) {
    const auto& g = *run.setup.grid;
    const auto p = g.p_sorted();
    auto snaps = open_for_writing(dir / "snapshots.csv");
    auto currents = open_for_writing(dir / "currents.csv");
    snaps << "t,x,density,p,momentum_density\n";
    currents << "t,x,current\n";
    for (const auto& s : rec.snapshots) {
      for (Eigen::Index j = 0; j < g.ssize(); ++j) {
        snaps << num(s.t) << ',' << num(g.x_axis()(j)) << ',' << num(s.density(j)) << ',' << num(p(j)) << ','
              << num(s.momentum_density(j)) << '\n';
        currents << num(s.t) << ',' << num(g.x_axis()(j)) << ',' << num(s.current(j)) << '\n';
      }
    }
  }
  if (run.continuity) write_continuity_csv(*run.continuity, dir / "continuity.csv");
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const fs::path& file) {
  auto out = open_for_writing(file);
  out << "run_id,particle,mass,v0,horizon,n_measurements,dt,survival,t_telep_analytic,t_telep_measured\n";
  for (const auto& r : rows) {
    out << r.run_id << ',' << r.particle << ',' << num(r.mass) << ',' << num(r.v0) << ',' << num(r.horizon) << ','
        << r.n_measurements << ',' << num(r.dt) << ',' << num(r.survival) << ',' << num(r.t_telep_analytic) << ',';
    if (r.t_telep_measured) out << num(*r.t_telep_measured);
    out << '\n';
  }
}

std::vector<SummaryRow> load_summary_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open '" + file.string() + "'");
  std::string line;
  std::getline(in, line);
  std::vector<SummaryRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 10) {
      throw ConfigError(file.string() + ":" + std::to_string(line_no) + ": expected 10 columns");
    }
    auto d = [](const std::string& s) { return std::strtod(s.c_str(), nullptr); };
    SummaryRow r{cells[0], cells[1], d(cells[2]), d(cells[3]), d(cells[4]),
                 static_cast<std::size_t>(std::stoull(cells[5])), d(cells[6]), d(cells[7]), d(cells[8]),
                 std::nullopt};
    if (!cells[9].empty()) r.t_telep_measured = d(cells[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

fs::path persist(const ExperimentResult& result, const fs::path& root) {
  const fs::path dir = root / result.spec.name;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create '" + dir.string() + "': " + ec.message());

  open_for_writing(dir / "spec.json") << serialize_spec(result.spec);
  json index = {{"experiment", result.spec.name}, {"scheme", to_string(result.spec.scheme)}, {"runs", json::array()}};
  for (const auto& run : result.runs) {
    write_run(run, result.spec.name, dir / run.run_id);
    index["runs"].push_back({{"run_id", run.run_id},
                             {"particle", run.setup.particle.name},
                             {"n_measurements", run.record.config.n_measurements},
                             {"survival", run.survival},
                             {"path", run.run_id}});
  }
  open_for_writing(dir / "index.json") << index.dump(2) << '\n';
  write_summary_csv(result.summary(), dir / "summary.csv");
  return dir;
}

}  // namespace qzd
