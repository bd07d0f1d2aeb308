#ifndef QZD_ZENO_HPP
#define QZD_ZENO_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qzd/current.hpp"
#include "qzd/propagator.hpp"

namespace qzd {

/// Selection mask for the momentum subspace |p| < p_cut, in natural
/// transform ordering.
template <typename Scalar = double>
struct MomentumWindow {
  GridPtr<Scalar> grid;
  Scalar p_cut;
  Eigen::Array<bool, Eigen::Dynamic, 1> mask;

  Eigen::Index inside_count() const { return mask.count(); }
};

/// Window |p| < m * delta_v (strict: a mode exactly on the edge is dropped).
template <typename Scalar>
MomentumWindow<Scalar> make_window(const GridPtr<Scalar>& grid, Scalar mass, Scalar delta_v) {
  const Scalar p_cut = mass * delta_v;
  if (!(p_cut > Scalar(2) * grid->dp())) {
    throw PreconditionError("make_window: m*delta_v must exceed two momentum spacings");
  }
  MomentumWindow<Scalar> w{grid, p_cut, (grid->p_axis().abs() < p_cut)};
  if (w.inside_count() < 3) throw PreconditionError("make_window: fewer than three modes inside");
  return w;
}

template <typename Scalar>
struct Projection {
  Wavefunction<Scalar> state;
  /// norm2(projected) / norm2(input): the outcome probability of this
  /// measurement.
  Scalar p_step;
};

namespace detail {

// Zero the modes outside the window, in place, on momentum amplitudes.
template <typename Scalar>
void apply_mask(ComplexArray<Scalar>& momentum, const MomentumWindow<Scalar>& window) {
  for (Eigen::Index k = 0; k < momentum.size(); ++k) {
    if (!window.mask(k)) momentum(k) = std::complex<Scalar>(0);
  }
}

}  // namespace detail

/// Pi|psi>, left unnormalized, returned in the input's representation.
template <typename Scalar>
Projection<Scalar> project(const Wavefunction<Scalar>& psi, const MomentumWindow<Scalar>& window) {
  if (!(psi.grid() == *window.grid)) throw PreconditionError("project: grid mismatch");
  auto mom = in_momentum(psi);
  const Scalar before = norm2(mom);
  if (!(before > 0)) throw PreconditionError("project: zero-norm input");
  detail::apply_mask(mom.amplitudes(), window);
  const Scalar after = norm2(mom);
  auto out = psi.representation() == Representation::momentum ? std::move(mom) : to_position(mom);
  return {std::move(out), after / before};
}

template <typename Scalar = double>
struct QzdConfig {
  Scalar mass = 1;
  Scalar delta_v = 1;
  Scalar horizon = 1;
  std::size_t n_measurements = 0;
  Scalar max_substep = Scalar(0.05);
  /// Snapshot every this many measurements (every this many substeps when
  /// n_measurements == 0); 0 disables snapshots. t = 0 is always included
  /// when enabled, and so is the final time.
  std::size_t snapshot_stride = 0;
  /// Where j(x, t) is sampled at every substep; nullopt disables it.
  std::optional<Scalar> record_flux_at = Scalar(0);
  /// Lower end of the region [x, +inf) whose probability is tracked.
  Scalar region_from = 0;
  /// Positions whose density is recorded at every substep.
  std::vector<Scalar> probes;
  /// Boundary-leak guard: abort when the probability carried by the
  /// `leak_points` outermost lattice points on either side exceeds
  /// `leak_tolerance` of the current norm.
  std::size_t leak_points = 5;
  Scalar leak_tolerance = Scalar(1e-3);
};

template <typename Scalar = double>
struct Snapshot {
  Scalar t;
  RealArray<Scalar> density;           // over x_axis
  RealArray<Scalar> momentum_density;  // over p_sorted
  RealArray<Scalar> current;           // over x_axis
};

template <typename Scalar = double>
struct ProbeSeries {
  Scalar x;                    // requested position
  Eigen::Index index;          // lattice point actually sampled
  std::vector<Scalar> density; // one entry per sample time
};

template <typename Scalar = double>
struct RunRecord {
  QzdConfig<Scalar> config;

  // One entry per measurement n = 1..N.
  std::vector<Scalar> times{};
  std::vector<Scalar> survival{};
  std::vector<Scalar> step_probabilities{};
  std::vector<Scalar> region_prob_series{};

  // One entry per substep boundary, starting at t = 0. At a measurement
  // time the sample is taken after the projection.
  std::vector<Scalar> sample_times{};
  std::vector<Scalar> sample_norm{};
  std::vector<Scalar> sample_region_prob{};
  std::vector<Scalar> flux_series{};  // empty when flux recording is off
  std::vector<ProbeSeries<Scalar>> probes{};

  std::vector<Snapshot<Scalar>> snapshots{};
  Scalar max_boundary_fraction = 0;
  std::size_t substeps_per_interval = 0;

  Wavefunction<Scalar> final_state;

  Scalar final_survival() const { return survival.empty() ? Scalar(1) : survival.back(); }
};

namespace detail {

template <typename Scalar>
Scalar boundary_fraction(const ComplexArray<Scalar>& psi, std::size_t points, Scalar norm_sum) {
  const auto n = psi.size();
  const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(points), n / 2);
  const Scalar edge = psi.head(k).abs2().sum() + psi.tail(k).abs2().sum();
  return norm_sum > 0 ? edge / norm_sum : Scalar(0);
}

template <typename Scalar>
Snapshot<Scalar> take_snapshot(const Wavefunction<Scalar>& psi, Scalar mass, Scalar t) {
  return {t, probability_density(psi), momentum_density(psi), probability_current(psi, mass)};
}

}  // namespace detail

/// Selective quantum Zeno sequence: N times { evolve over T/N; project onto
/// |p| < m*delta_v }, keeping the unnormalized state so that its squared
/// norm is the probability that every outcome was positive. No measurement
/// is made at t = 0; the N-th falls exactly at t = T. N = 0 is plain
/// Schrodinger evolution over T.
template <Potential P>
RunRecord<typename P::Scalar> qzd_run(const Wavefunction<typename P::Scalar>& psi0, const P& v,
                                      const QzdConfig<typename P::Scalar>& config) {
  using Scalar = typename P::Scalar;
  if (!(config.horizon > 0)) throw PreconditionError("qzd_run: horizon must be positive");
  if (!(config.delta_v > 0)) throw PreconditionError("qzd_run: delta_v must be positive");
  if (!(config.mass > 0)) throw PreconditionError("qzd_run: mass must be positive");

  const auto grid = psi0.grid_ptr();
  const auto& g = *grid;
  Wavefunction<Scalar> psi = in_position(psi0);
  if (std::abs(norm2(psi) - Scalar(1)) > Scalar(1e-6)) {
    throw PreconditionError("qzd_run: initial state must be normalized");
  }

  std::optional<MomentumWindow<Scalar>> window;
  if (config.n_measurements > 0) window = make_window(grid, config.mass, config.delta_v);

  const std::size_t intervals = std::max<std::size_t>(config.n_measurements, 1);
  const Scalar interval = config.horizon / static_cast<Scalar>(intervals);
  const std::size_t substeps = std::max<std::size_t>(substep_count(interval, config.max_substep), 1);
  const Scalar h = interval / static_cast<Scalar>(substeps);
  const auto plan = StepPlan<Scalar>::from(grid, v, config.mass, h);

  RunRecord<Scalar> rec{.config = config, .final_state = psi};
  rec.substeps_per_interval = substeps;
  for (Scalar x : config.probes) {
    rec.probes.push_back({x, g.nearest_index(x), {}});
  }

  ComplexArray<Scalar>& amp = psi.amplitudes();
  ComplexArray<Scalar> scratch;
  ComplexArray<Scalar> momentum;
  const Scalar inf = std::numeric_limits<Scalar>::infinity();

  // `have_momentum` says whether `momentum` already holds the transform of
  // the current position amplitudes.
  auto sample = [&](Scalar t, bool have_momentum) {
    const Scalar norm_sum = amp.abs2().sum();
    rec.sample_times.push_back(t);
    rec.sample_norm.push_back(norm_sum * g.dx());
    rec.sample_region_prob.push_back(region_probability(psi, config.region_from, inf));
    if (config.record_flux_at) {
      if (!have_momentum) g.forward(amp, momentum);
      rec.flux_series.push_back(point_current(g, momentum, config.mass, *config.record_flux_at));
    }
    for (auto& probe : rec.probes) probe.density.push_back(std::norm(amp(probe.index)));

    const Scalar leak = detail::boundary_fraction(amp, config.leak_points, norm_sum);
    rec.max_boundary_fraction = std::max(rec.max_boundary_fraction, leak);
    if (leak > config.leak_tolerance) {
      throw PreconditionError("qzd_run: boundary leak at t = " + std::to_string(t) +
                              " (edge fraction " + std::to_string(leak) + ")");
    }
  };

  sample(Scalar(0), false);
  const bool snapshots = config.snapshot_stride > 0;
  if (snapshots) rec.snapshots.push_back(detail::take_snapshot(psi, config.mass, Scalar(0)));

  std::size_t substep_index = 0;
  for (std::size_t n = 1; n <= intervals; ++n) {
    const Scalar t_start = static_cast<Scalar>(n - 1) * interval;
    for (std::size_t s = 1; s <= substeps; ++s) {
      plan.apply(amp, scratch);
      ++substep_index;
      const bool last = s == substeps;
      Scalar t = t_start + static_cast<Scalar>(s) * h;
      if (last) t = n == intervals ? config.horizon : static_cast<Scalar>(n) * interval;

      bool have_momentum = false;
      if (last && window) {
        g.forward(amp, momentum);
        const Scalar before = momentum.abs2().sum();
        if (!(before > 0)) throw PreconditionError("qzd_run: state vanished");
        detail::apply_mask(momentum, *window);
        const Scalar after = momentum.abs2().sum();
        g.inverse(momentum, amp);
        have_momentum = true;

        const Scalar p_n = after / before;
        rec.times.push_back(t);
        rec.step_probabilities.push_back(p_n);
        rec.survival.push_back(after * g.dp());
        rec.region_prob_series.push_back(region_probability(psi, config.region_from, inf));
      }
      sample(t, have_momentum);

      if (snapshots) {
        const bool due = window ? (last && (n % config.snapshot_stride == 0 || n == intervals))
                                : (substep_index % config.snapshot_stride == 0 ||
                                   (last && n == intervals));
        if (due) rec.snapshots.push_back(detail::take_snapshot(psi, config.mass, t));
      }
    }
  }
  rec.final_state = std::move(psi);
  return rec;
}

template <typename Scalar = double>
struct SweepRow {
  std::size_t n_measurements;
  Scalar survival;
  /// Time of maximum density at the probe, when a probe was configured and
  /// the maximum is interior.
  std::optional<Scalar> telep_time_measured;
};

}  // namespace qzd

#endif  // QZD_ZENO_HPP
