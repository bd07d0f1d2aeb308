#include "qzd/experiments.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "qzd/sweep.hpp"

namespace qzd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxGridPoints = std::size_t{1} << 20;

std::string describe(const RunOutcome& o) {
  std::ostringstream line;
  line << o.run_id << ": " << o.setup.particle.name << " N=" << o.record.config.n_measurements
       << " T=" << o.record.config.horizon << " P=" << o.survival;
  if (o.t_telep_measured) line << " T_meas=" << *o.t_telep_measured;
  return line.str();
}

ExperimentResult finish(const ExperimentSpec& spec, std::vector<RunTask> tasks, const RunnerOptions& options) {
  return {spec, execute_all(tasks, options)};
}

}  // namespace

std::vector<ParticleSpec> active_particles(const ExperimentSpec& spec) {
  std::vector<ParticleSpec> out;
  for (const auto& p : spec.particles) {
    if (!p.extended || spec.include_extended) out.push_back(p);
  }
  if (out.empty()) throw ConfigError("experiment '" + spec.name + "' has no active particles");
  return out;
}

ParticleSetup setup_particle(const ExperimentSpec& spec, const ParticleSpec& particle) {
  const double m = particle.mass;
  const double v0 = spec.potential.v0 * (spec.potential.v0_mass_scaling ? std::sqrt(m) : 1.0);
  GaussianPotential<double> potential(v0, spec.potential.xp, spec.potential.kind);

  const auto& a = spec.packet.thermal_a;
  const double delta_v = spec.measurement.delta_v ? *spec.measurement.delta_v : std::sqrt(*a / m);
  const double delta_x = spec.packet.delta_x ? *spec.packet.delta_x : 2.0 / std::sqrt(*a * m);

  // Thermal packets narrow as 1/sqrt(m): refine until the packet spans four
  // spacings and the window sits inside half the momentum band.
  const double length = spec.grid.x_max - spec.grid.x_min;
  std::size_t n = spec.grid.n;
  auto spacing = [&] { return length / static_cast<double>(n); };
  while (a && (delta_x < 4.0 * spacing() || m * delta_v > 0.5 * std::numbers::pi / spacing()) &&
         n < kMaxGridPoints) {
    n *= 2;
  }
  auto grid = make_grid<double>(spec.grid.x_min, spec.grid.x_max, n);

  double t_analytic = kNaN;
  try {
    t_analytic = teleportation_time_analytic(m, delta_v, potential, spec.packet.x0);
  } catch (const NoTeleportationError&) {
    if (spec.measurement.horizon_mode != HorizonMode::fixed) throw;
  }

  double horizon = spec.measurement.horizon;
  switch (spec.measurement.horizon_mode) {
    case HorizonMode::fixed: break;
    case HorizonMode::analytic: horizon = t_analytic; break;
    case HorizonMode::thermal: horizon = teleportation_time_thermal(*a, m, potential, spec.packet.x0); break;
  }
  return {particle, std::move(grid), potential, spec.packet.x0, delta_x, delta_v, t_analytic, horizon};
}

RunTask make_task(const ParticleSetup& setup, const ExperimentSpec& spec, std::string run_id,
                  std::size_t n_measurements, double horizon) {
  QzdConfig<double> config;
  config.mass = setup.particle.mass;
  config.delta_v = setup.delta_v;
  config.horizon = horizon;
  config.n_measurements = n_measurements;
  config.max_substep = spec.measurement.substep_tau;
  config.record_flux_at = spec.measurement.record_flux ? std::optional<double>(0.0) : std::nullopt;
  config.region_from = 0;
  config.leak_tolerance = spec.measurement.leak_tolerance;
  return {std::move(run_id), setup, config, std::nullopt};
}

RunOutcome execute(const RunTask& task) {
  const auto& s = task.setup;
  QzdConfig<double> config = task.config;
  if (task.measure_at) config.probes.push_back(*task.measure_at);
  const auto psi0 = gaussian_packet(s.grid, s.x0, s.delta_x);
  RunRecord<double> record = qzd_run(psi0, s.potential, config);

  RunOutcome out{task.run_id, s, std::move(record), 0.0, std::nullopt, std::nullopt,
                 {{kNaN, kNaN}, {kNaN, kNaN}}};
  out.survival = out.record.final_survival();
  if (task.measure_at) {
    const auto measured = teleportation_time_measured(out.record, *task.measure_at);
    if (!measured.at_edge && measured.teleported) out.t_telep_measured = measured.time;
  }
  if (!out.record.flux_series.empty()) out.continuity = continuity_report(out.record);
  try {
    out.final_overlaps = overlap_coefficients(out.record.final_state, s.x0, s.delta_x);
  } catch (const PreconditionError&) {
    // templates at +-x0 overlap; leave NaN
  }
  return out;
}

std::vector<RunOutcome> execute_all(const std::vector<RunTask>& tasks, const RunnerOptions& options) {
  std::vector<std::optional<RunOutcome>> slots(tasks.size());
  std::mutex log_mutex;
  parallel_for(tasks.size(), options.jobs, [&](std::size_t i) {
    slots[i] = execute(tasks[i]);
    if (options.log) {
      std::lock_guard lock(log_mutex);
      options.log(describe(*slots[i]));
    }
  });
  std::vector<RunOutcome> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<SummaryRow> ExperimentResult::summary() const {
  std::vector<SummaryRow> rows;
  for (const auto& r : runs) {
    const auto& c = r.record.config;
    const double intervals = static_cast<double>(std::max<std::size_t>(c.n_measurements, 1));
    rows.push_back({r.run_id, r.setup.particle.name, r.setup.particle.mass, r.setup.potential.v0, c.horizon,
                    c.n_measurements, c.horizon / intervals, r.survival, r.setup.t_telep_analytic,
                    r.t_telep_measured});
  }
  return rows;
}

const RunOutcome& ExperimentResult::run(const std::string& run_id) const {
  for (const auto& r : runs) {
    if (r.run_id == run_id) return r;
  }
  throw std::out_of_range("no run '" + run_id + "' in experiment '" + spec.name + "'");
}

ExperimentResult run_single(const ExperimentSpec& spec, const RunnerOptions& options) {
  const auto setup = setup_particle(spec, active_particles(spec).front());
  const std::size_t n = spec.measurement.n_measurements;
  auto task = make_task(setup, spec, setup.particle.name + "_N" + std::to_string(n), n, setup.horizon);
  task.config.snapshot_stride = spec.measurement.snapshot_stride;
  return finish(spec, {task}, options);
}

ExperimentResult run_sweep(const ExperimentSpec& spec, const RunnerOptions& options) {
  if (spec.measurement.n_list.empty()) throw ConfigError("field 'measurement.n_list': empty sweep");
  std::vector<RunTask> tasks;
  for (const auto& particle : active_particles(spec)) {
    const auto setup = setup_particle(spec, particle);
    for (std::size_t n : spec.measurement.n_list) {
      if (n == 0) throw PreconditionError("sweep: every N must be at least 1");
      auto task = make_task(setup, spec, particle.name + "_N" + std::to_string(n), n, setup.horizon);
      task.measure_at = mirror_turning_point(setup.potential, setup.x0);
      tasks.push_back(std::move(task));
    }
  }
  return finish(spec, std::move(tasks), options);
}

ExperimentResult run_fig2(const ExperimentSpec& spec, const RunnerOptions& options) {
  const auto setup = setup_particle(spec, active_particles(spec).front());
  const double mirror = mirror_turning_point(setup.potential, setup.x0);
  std::vector<RunTask> tasks;

  auto control = make_task(setup, spec, "control_N0", 0, spec.measurement.control_horizon);
  control.config.snapshot_stride = std::max<std::size_t>(spec.measurement.snapshot_stride, 1);
  control.config.record_flux_at = 0.0;
  tasks.push_back(std::move(control));

  for (std::size_t n : spec.measurement.n_list) {
    auto task = make_task(setup, spec, "sweep_N" + std::to_string(n), n, setup.horizon);
    task.measure_at = mirror;
    tasks.push_back(std::move(task));
  }
  for (std::size_t n : spec.measurement.snapshot_n) {
    auto task = make_task(setup, spec, "panel_N" + std::to_string(n), n, setup.horizon);
    task.config.snapshot_stride = std::max<std::size_t>(n / 64, 1);
    tasks.push_back(std::move(task));
  }
  return finish(spec, std::move(tasks), options);
}

ExperimentResult run_fig3(const ExperimentSpec& spec, const RunnerOptions& options) {
  const auto setup = setup_particle(spec, active_particles(spec).front());
  const std::size_t n = spec.measurement.n_measurements;
  if (n < 2) throw ConfigError("field 'measurement.n_measurements': fig3 needs at least 2 measurements");
  const double horizon = setup.horizon;
  std::vector<RunTask> tasks;

  auto main = make_task(setup, spec, "telep_N" + std::to_string(n), n, horizon);
  main.config.snapshot_stride = n / 2;
  tasks.push_back(std::move(main));

  // Same measurement interval, stopped halfway: the state at T/2.
  tasks.push_back(make_task(setup, spec, "half_N" + std::to_string(n / 2), n / 2, horizon * static_cast<double>(n / 2) / static_cast<double>(n)));

  // Same interval, continued to 2T so the density maximum at -x0 is bracketed.
  auto extended = make_task(setup, spec, "extended_N" + std::to_string(2 * n), 2 * n, 2.0 * horizon);
  extended.measure_at = mirror_turning_point(setup.potential, setup.x0);
  tasks.push_back(std::move(extended));
  return finish(spec, std::move(tasks), options);
}

ExperimentResult run_fig4(const ExperimentSpec& spec, const RunnerOptions& options) {
  const auto setup = setup_particle(spec, active_particles(spec).front());
  const std::size_t n = spec.measurement.n_measurements;
  std::vector<RunTask> tasks;
  auto control = make_task(setup, spec, "control_N0", 0, spec.measurement.control_horizon);
  control.config.record_flux_at = 0.0;
  tasks.push_back(std::move(control));
  auto zeno = make_task(setup, spec, "zeno_N" + std::to_string(n), n, setup.horizon);
  zeno.config.record_flux_at = 0.0;
  tasks.push_back(std::move(zeno));
  return finish(spec, std::move(tasks), options);
}

ExperimentResult run_fig5(const ExperimentSpec& spec, const RunnerOptions& options) {
  std::vector<RunTask> tasks;
  for (const auto& particle : active_particles(spec)) {
    const auto setup = setup_particle(spec, particle);
    if (spec.scheme == Scheme::fig5d) {
      if (spec.measurement.dt_list.empty()) throw ConfigError("field 'measurement.dt_list': scheme d needs intervals");
      for (double dt : spec.measurement.dt_list) {
        const auto n = static_cast<std::size_t>(std::max(1.0, std::round(setup.horizon / dt)));
        std::ostringstream id;
        id << particle.name << "_dt" << dt;
        tasks.push_back(make_task(setup, spec, id.str(), n, setup.horizon));
      }
    } else {
      if (spec.measurement.n_list.empty()) throw ConfigError("field 'measurement.n_list': empty sweep");
      for (std::size_t n : spec.measurement.n_list) {
        tasks.push_back(make_task(setup, spec, particle.name + "_N" + std::to_string(n), n, setup.horizon));
      }
    }
  }
  return finish(spec, std::move(tasks), options);
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunnerOptions& options) {
  switch (spec.scheme) {
    case Scheme::fig2: return run_fig2(spec, options);
    case Scheme::fig3: return run_fig3(spec, options);
    case Scheme::fig4: return run_fig4(spec, options);
    case Scheme::fig5b:
    case Scheme::fig5c:
    case Scheme::fig5d: return run_fig5(spec, options);
    case Scheme::custom: return run_sweep(spec, options);
  }
  return run_sweep(spec, options);
}

}  // namespace qzd
