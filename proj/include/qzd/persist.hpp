#ifndef QZD_PERSIST_HPP
#define QZD_PERSIST_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "qzd/experiments.hpp"

namespace qzd {

/// Files written per run directory:
///   meta.json       config echo, survival, teleportation times, diagnostics
///   series.csv      t, survival, region_prob, flux (one row per substep)
///   snapshots.csv   t, x, density, p, momentum_density (long format)
///   currents.csv    t, x, current (alongside snapshots)
///   continuity.csv  t, decrement, flux_integral, residual, norm
/// and per experiment: spec.json, index.json, summary.csv.
nlohmann::json run_meta(const RunOutcome& run, const std::string& experiment);

void write_run(const RunOutcome& run, const std::string& experiment, const std::filesystem::path& dir);
void write_continuity_csv(const ContinuityReport<double>& report, const std::filesystem::path& file);
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::filesystem::path& file);
std::vector<SummaryRow> load_summary_csv(const std::filesystem::path& file);

/// Writes <root>/<spec.name>/... and returns that directory.
std::filesystem::path persist(const ExperimentResult& result, const std::filesystem::path& root);

}  // namespace qzd

#endif  // QZD_PERSIST_HPP
