#ifndef QZD_EXPERIMENTS_HPP
#define QZD_EXPERIMENTS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qzd/diagnostics.hpp"
#include "qzd/spec.hpp"

namespace qzd {

/// Everything derived from an ExperimentSpec for one particle: the grid
/// (refined if the particle's packet is too narrow for the configured one),
/// the potential with any mass scaling applied, the packet width, the
/// velocity window and the horizon.
struct ParticleSetup {
  ParticleSpec particle;
  GridPtr<double> grid;
  GaussianPotential<double> potential;
  double x0;
  double delta_x;
  double delta_v;
  double t_telep_analytic;
  double horizon;
};

ParticleSetup setup_particle(const ExperimentSpec& spec, const ParticleSpec& particle);

/// Particles the experiment runs (extended ones only on request).
std::vector<ParticleSpec> active_particles(const ExperimentSpec& spec);

/// A single planned qzd_run inside an experiment.
struct RunTask {
  std::string run_id;
  ParticleSetup setup;
  QzdConfig<double> config;
  /// Target for the measured teleportation time (needs a probe there).
  std::optional<double> measure_at;
};

struct RunOutcome {
  std::string run_id;
  ParticleSetup setup;
  RunRecord<double> record;
  double survival;
  std::optional<double> t_telep_measured;
  std::optional<ContinuityReport<double>> continuity;
  Overlaps<double> final_overlaps;
};

/// One row of an experiment's summary table.
struct SummaryRow {
  std::string run_id;
  std::string particle;
  double mass;
  double v0;
  double horizon;
  std::size_t n_measurements;
  double dt;
  double survival;
  double t_telep_analytic;
  std::optional<double> t_telep_measured;

  bool operator==(const SummaryRow&) const = default;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<RunOutcome> runs;

  std::vector<SummaryRow> summary() const;
  const RunOutcome& run(const std::string& run_id) const;
};

struct RunnerOptions {
  std::size_t jobs = 1;
  /// Called once per finished run with a one-line description.
  std::function<void(const std::string&)> log;
};

RunTask make_task(const ParticleSetup& setup, const ExperimentSpec& spec, std::string run_id,
                  std::size_t n_measurements, double horizon);
RunOutcome execute(const RunTask& task);
std::vector<RunOutcome> execute_all(const std::vector<RunTask>& tasks, const RunnerOptions& options);

/// One run of the first particle with measurement.n_measurements.
ExperimentResult run_single(const ExperimentSpec& spec, const RunnerOptions& options = {});
/// measurement.n_list for every active particle at the spec's horizon.
ExperimentResult run_sweep(const ExperimentSpec& spec, const RunnerOptions& options = {});

/// (a) no-measurement control over control_horizon with snapshots,
/// (b) sweep over n_list at the fixed horizon, (c, d) snapshot runs for
/// each snapshot_n.
ExperimentResult run_fig2(const ExperimentSpec& spec, const RunnerOptions& options = {});
/// Teleportation run with snapshots at 0, T/2, T; a half-horizon run for
/// the overlaps at T/2; and a run over 2T at the same interval for the
/// measured teleportation time.
ExperimentResult run_fig3(const ExperimentSpec& spec, const RunnerOptions& options = {});
/// Continuity accounting for a no-measurement control and a Zeno run.
ExperimentResult run_fig4(const ExperimentSpec& spec, const RunnerOptions& options = {});
/// Mass schemes b, c (n_list per particle) and d (shared dt_list).
ExperimentResult run_fig5(const ExperimentSpec& spec, const RunnerOptions& options = {});

/// Dispatch on spec.scheme; `custom` runs a sweep.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunnerOptions& options = {});

}  // namespace qzd

#endif  // QZD_EXPERIMENTS_HPP
