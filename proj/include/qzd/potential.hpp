#ifndef QZD_POTENTIAL_HPP
#define QZD_POTENTIAL_HPP

#include <cmath>
#include <concepts>
#include <limits>

#include "qzd/errors.hpp"
#include "qzd/grid.hpp"

namespace qzd {

/// Anything with an analytic value, an exact derivative and a known
/// extremum can drive the propagator and the turning-point utilities.
template <typename P>
concept Potential = requires(const P& v, typename P::Scalar x) {
  { v.evaluate(x) } -> std::convertible_to<typename P::Scalar>;
  { v.derivative(x) } -> std::convertible_to<typename P::Scalar>;
  { v.extremum() } -> std::convertible_to<typename P::Scalar>;
  { v.symmetric() } -> std::convertible_to<bool>;
};

enum class PotentialKind { well, barrier };

/// V(x) = -+ v0 exp(-(x - centre)^2 / xp^2): a well (minus) or barrier (plus).
template <typename Scalar_ = double>
struct GaussianPotential {
  using Scalar = Scalar_;

  Scalar v0;
  Scalar xp;
  PotentialKind kind = PotentialKind::well;
  Scalar center = 0;

  GaussianPotential(Scalar depth, Scalar width, PotentialKind k = PotentialKind::well,
                    Scalar c = Scalar(0))
      : v0(depth), xp(width), kind(k), center(c) {
    if (!(v0 > 0) || !(xp > 0)) throw PreconditionError("gaussian potential: v0 and xp must be positive");
  }

  Scalar sign() const { return kind == PotentialKind::well ? Scalar(-1) : Scalar(1); }

  Scalar evaluate(Scalar x) const {
    const Scalar u = (x - center) / xp;
    return sign() * v0 * std::exp(-u * u);
  }

  Scalar derivative(Scalar x) const {
    const Scalar u = (x - center) / xp;
    return sign() * v0 * (Scalar(-2) * (x - center) / (xp * xp)) * std::exp(-u * u);
  }

  Scalar extremum() const { return center; }
  bool symmetric() const { return true; }

  GaussianPotential flipped() const {
    return {v0, xp, kind == PotentialKind::well ? PotentialKind::barrier : PotentialKind::well, center};
  }
};

/// V(x) = m w^2 (x - centre)^2 / 2.
template <typename Scalar_ = double>
struct HarmonicPotential {
  using Scalar = Scalar_;

  Scalar mass;
  Scalar omega;
  Scalar center = 0;

  Scalar evaluate(Scalar x) const {
    const Scalar d = x - center;
    return Scalar(0.5) * mass * omega * omega * d * d;
  }
  Scalar derivative(Scalar x) const { return mass * omega * omega * (x - center); }
  Scalar extremum() const { return center; }
  bool symmetric() const { return true; }
};

template <Potential P>
typename P::Scalar evaluate(const P& v, typename P::Scalar x) {
  return v.evaluate(x);
}

template <Potential P>
typename P::Scalar derivative(const P& v, typename P::Scalar x) {
  return v.derivative(x);
}

/// V sampled on the position axis.
template <Potential P>
RealArray<typename P::Scalar> sample(const P& v, const Grid<typename P::Scalar>& grid) {
  return grid.x_axis().unaryExpr([&v](typename P::Scalar x) { return v.evaluate(x); });
}

/// Second classical turning point for a particle at rest at x0: the root of
/// V(x) = V(x0) on the far side of the nearest extremum. Symmetric
/// potentials reflect x0 exactly; others are bracketed by an expanding
/// march and refined by bisection to 1e-10.
template <Potential P>
typename P::Scalar mirror_turning_point(const P& v, typename P::Scalar x0) {
  using Scalar = typename P::Scalar;
  const Scalar c = v.extremum();
  if (v.derivative(x0) == Scalar(0) || x0 == c) {
    throw NoTeleportationError("mirror_turning_point: x0 is an equilibrium point");
  }
  if (v.symmetric()) return Scalar(2) * c - x0;

  const Scalar target = v.evaluate(x0);
  const Scalar dir = x0 < c ? Scalar(1) : Scalar(-1);
  const Scalar inside = v.evaluate(c) - target;  // sign of V - V(x0) between the turning points
  auto f = [&](Scalar x) { return v.evaluate(x) - target; };

  Scalar step = std::max(std::abs(c - x0), Scalar(1e-6)) * Scalar(1e-2);
  Scalar lo = c;
  Scalar hi = c + dir * step;
  const Scalar limit = Scalar(1e6) * std::max(std::abs(c - x0), Scalar(1));
  while ((f(hi) > 0) == (inside > 0) && f(hi) != 0) {
    lo = hi;
    step *= Scalar(1.5);
    hi = c + dir * (std::abs(hi - c) + step);
    if (std::abs(hi - c) > limit) {
      throw PreconditionError("mirror_turning_point: no second turning point");
    }
  }
  while (std::abs(hi - lo) > Scalar(1e-10)) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    if ((f(mid) > 0) == (inside > 0) && f(mid) != 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return Scalar(0.5) * (lo + hi);
}

}  // namespace qzd

#endif  // QZD_POTENTIAL_HPP
