#ifndef QZD_DIAGNOSTICS_HPP
#define QZD_DIAGNOSTICS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "qzd/current.hpp"
#include "qzd/potential.hpp"
#include "qzd/zeno.hpp"

namespace qzd {

// SI conversions, applied only when reporting.
inline constexpr double kVelocityAuInMetresPerSecond = 2.1877e6;
inline constexpr double kLengthAuInMetres = 5.2918e-11;

/// Integral form of the continuity equation over [x_ref, +inf):
/// decrement(t) = P(0) - P(t) against flux_integral(t) = -int_0^t j(x_ref) dt'.
/// For Schrodinger evolution the residual vanishes; a Zeno transfer breaks it.
template <typename Scalar = double>
struct ContinuityReport {
  std::vector<Scalar> times;
  std::vector<Scalar> decrement_series;
  std::vector<Scalar> flux_integral_series;
  std::vector<Scalar> residual_series;
  std::vector<Scalar> norm_series;

  Scalar max_abs_residual() const {
    Scalar m = 0;
    for (Scalar r : residual_series) m = std::max(m, std::abs(r));
    return m;
  }
  Scalar max_abs_flux_integral() const {
    Scalar m = 0;
    for (Scalar f : flux_integral_series) m = std::max(m, std::abs(f));
    return m;
  }
};

template <typename Scalar>
ContinuityReport<Scalar> continuity_report(const RunRecord<Scalar>& record) {
  const auto n = record.sample_times.size();
  if (n == 0 || record.sample_region_prob.size() != n) {
    throw PreconditionError("continuity_report: record has no region-probability series");
  }
  if (record.flux_series.size() != n) {
    throw PreconditionError("continuity_report: record has no flux series");
  }
  ContinuityReport<Scalar> rep;
  rep.times = record.sample_times;
  rep.norm_series = record.sample_norm;
  rep.decrement_series.resize(n);
  rep.flux_integral_series.resize(n);
  rep.residual_series.resize(n);
  const Scalar initial = record.sample_region_prob.front();
  Scalar integral = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      const Scalar dt = record.sample_times[i] - record.sample_times[i - 1];
      integral += Scalar(0.5) * dt * (record.flux_series[i] + record.flux_series[i - 1]);
    }
    rep.decrement_series[i] = initial - record.sample_region_prob[i];
    rep.flux_integral_series[i] = -integral;
    rep.residual_series[i] = rep.decrement_series[i] - rep.flux_integral_series[i];
  }
  return rep;
}

/// m dv/|V'(x0)| + m dv/|V'(x1)| with x1 the mirror turning point; for a
/// symmetric potential this is 2 m dv/|V'(x0)|.
template <Potential P>
typename P::Scalar teleportation_time_analytic(typename P::Scalar mass, typename P::Scalar delta_v,
                                               const P& v, typename P::Scalar x0) {
  using Scalar = typename P::Scalar;
  const Scalar f0 = std::abs(v.derivative(x0));
  if (!(f0 > 0)) throw NoTeleportationError("no force at x0: the particle does not teleport");
  const Scalar x1 = mirror_turning_point(v, x0);
  const Scalar f1 = std::abs(v.derivative(x1));
  if (!(f1 > 0)) throw NoTeleportationError("no force at the mirror turning point");
  const Scalar dp = mass * delta_v;
  return dp / f0 + dp / f1;
}

/// Same, with the momentum window set by the thermal width sqrt(a m).
template <Potential P>
typename P::Scalar teleportation_time_thermal(typename P::Scalar a, typename P::Scalar mass,
                                              const P& v, typename P::Scalar x0) {
  if (!(a > 0) || !(mass > 0)) throw PreconditionError("thermal: a and m must be positive");
  return teleportation_time_analytic(mass, std::sqrt(a / mass), v, x0);
}

template <typename Scalar = double>
struct MeasuredTime {
  Scalar time;
  Scalar peak_density;
  /// The maximum sits on the first or last sample: not refined, and not a
  /// teleportation time.
  bool at_edge;
  /// Peak exceeds ten times the initial density at the target.
  bool teleported;
};

namespace detail {

template <typename Scalar>
Scalar parabola_vertex(Scalar t0, Scalar t1, Scalar t2, Scalar y0, Scalar y1, Scalar y2) {
  const Scalar d01 = (y1 - y0) / (t1 - t0);
  const Scalar d12 = (y2 - y1) / (t2 - t1);
  const Scalar curvature = (d12 - d01) / (t2 - t0);
  if (!(curvature < 0)) return t1;
  // y = y1 + b (t - t1) + c (t - t1)^2 with b the derivative at t1.
  const Scalar slope = d01 + curvature * (t1 - t0);
  return std::clamp(t1 - slope / (Scalar(2) * curvature), t0, t2);
}

}  // namespace detail

/// Time at which the density at the lattice point nearest `x_target` peaks,
/// refined by a parabola through the bracketing samples. Uses a probe
/// series at that point when the record has one, otherwise the snapshots.
template <typename Scalar>
MeasuredTime<Scalar> teleportation_time_measured(const RunRecord<Scalar>& record, Scalar x_target) {
  const auto& g = record.final_state.grid();
  const Eigen::Index idx = g.nearest_index(x_target);

  std::vector<Scalar> t;
  std::vector<Scalar> y;
  for (const auto& probe : record.probes) {
    if (probe.index == idx) {
      t = record.sample_times;
      y = probe.density;
      break;
    }
  }
  if (t.empty()) {
    for (const auto& s : record.snapshots) {
      t.push_back(s.t);
      y.push_back(s.density(idx));
    }
  }
  if (t.size() < 3) throw PreconditionError("teleportation_time_measured: fewer than three samples");

  const auto k = static_cast<std::size_t>(std::distance(y.begin(), std::max_element(y.begin(), y.end())));
  MeasuredTime<Scalar> out{t[k], y[k], false, y[k] > Scalar(10) * y.front()};
  if (k == 0 || k + 1 == t.size()) {
    out.at_edge = true;
    return out;
  }
  out.time = detail::parabola_vertex(t[k - 1], t[k], t[k + 1], y[k - 1], y[k], y[k + 1]);
  return out;
}

template <typename Scalar = double>
struct Overlaps {
  std::complex<Scalar> alpha;  // weight of the packet at +x0
  std::complex<Scalar> beta;   // weight of the packet at -x0
};

/// Inner products of psi with normalized Gaussian templates of width
/// delta_x centred at +x0 and -x0.
template <typename Scalar>
Overlaps<Scalar> overlap_coefficients(const Wavefunction<Scalar>& psi, Scalar x0, Scalar delta_x) {
  const Scalar template_overlap = std::exp(Scalar(-2) * x0 * x0 / (delta_x * delta_x));
  if (template_overlap > Scalar(1e-3)) {
    throw PreconditionError("overlap_coefficients: templates at +-x0 overlap");
  }
  const auto pos = in_position(psi);
  const auto plus = gaussian_packet(psi.grid_ptr(), x0, delta_x);
  const auto minus = gaussian_packet(psi.grid_ptr(), -x0, delta_x);
  const Scalar dx = psi.grid().dx();
  return {(plus.amplitudes().conjugate() * pos.amplitudes()).sum() * dx,
          (minus.amplitudes().conjugate() * pos.amplitudes()).sum() * dx};
}

/// Thermal assignment of the quantum uncertainty: v_th = sqrt(a/m),
/// dp = sqrt(a m), dx = 2/sqrt(a m), with a = 2 k_B T.
template <typename Scalar = double>
struct ThermalParams {
  Scalar a;
  Scalar m;
  Scalar v_th;
  Scalar delta_p;
  Scalar delta_x;
};

template <typename Scalar>
ThermalParams<Scalar> thermal_params(Scalar a, Scalar m) {
  if (!(a > 0) || !(m > 0)) throw PreconditionError("thermal_params: a and m must be positive");
  const Scalar dp = std::sqrt(a * m);
  return {a, m, std::sqrt(a / m), dp, Scalar(2) / dp};
}

}  // namespace qzd

#endif  // QZD_DIAGNOSTICS_HPP
