#ifndef QZD_PROPAGATOR_HPP
#define QZD_PROPAGATOR_HPP

#include <cmath>
#include <cstddef>
#include <utility>

#include "qzd/potential.hpp"
#include "qzd/state.hpp"

namespace qzd {

/// Cached phase tables for one Strang step of length dt:
/// exp(-i V dt/2) on the position axis and exp(-i p^2 dt / 2m) on the
/// momentum axis.
template <typename Scalar = double>
class StepPlan {
 public:
  StepPlan(GridPtr<Scalar> grid, const RealArray<Scalar>& potential, Scalar mass, Scalar dt)
      : grid_(std::move(grid)), potential_(potential), mass_(mass), dt_(dt) {
    if (!(mass > 0)) throw PreconditionError("step plan: mass must be positive");
    if (!(dt >= 0)) throw PreconditionError("step plan: dt must be non-negative");
    if (potential_.size() != grid_->ssize()) throw PreconditionError("step plan: potential size mismatch");
    const auto& p = grid_->p_axis();
    kinetic_ = (p * p * (-dt / (Scalar(2) * mass)))
                   .unaryExpr([](Scalar phi) { return std::polar(Scalar(1), phi); });
    half_potential_ = (potential_ * (-dt / Scalar(2)))
                          .unaryExpr([](Scalar phi) { return std::polar(Scalar(1), phi); });
  }

  template <Potential P>
  static StepPlan from(const GridPtr<Scalar>& grid, const P& v, Scalar mass, Scalar dt) {
    return StepPlan(grid, sample(v, *grid), mass, dt);
  }

  const Grid<Scalar>& grid() const { return *grid_; }
  const GridPtr<Scalar>& grid_ptr() const { return grid_; }
  const RealArray<Scalar>& potential() const { return potential_; }
  Scalar mass() const { return mass_; }
  Scalar dt() const { return dt_; }
  const ComplexArray<Scalar>& kinetic_phase() const { return kinetic_; }
  const ComplexArray<Scalar>& half_potential_phase() const { return half_potential_; }

  /// Same grid, potential and mass with a different step length.
  StepPlan with_dt(Scalar dt) const { return StepPlan(grid_, potential_, mass_, dt); }

  /// Advance position amplitudes in place; `scratch` is caller-owned
  /// working storage.
  void apply(ComplexArray<Scalar>& psi, ComplexArray<Scalar>& scratch) const {
    psi *= half_potential_;
    grid_->forward(psi, scratch);
    scratch *= kinetic_;
    grid_->inverse(std::move(scratch), psi);
    psi *= half_potential_;
  }

 private:
  GridPtr<Scalar> grid_;
  RealArray<Scalar> potential_;
  Scalar mass_;
  Scalar dt_;
  ComplexArray<Scalar> kinetic_;
  ComplexArray<Scalar> half_potential_;
};

/// One symmetric split step: half potential, kinetic, half potential.
template <typename Scalar>
Wavefunction<Scalar> step(const Wavefunction<Scalar>& psi, const StepPlan<Scalar>& plan) {
  if (psi.representation() != Representation::position) {
    throw PreconditionError("step: state must be in position representation");
  }
  if (!(psi.grid() == plan.grid())) throw PreconditionError("step: grid mismatch");
  Wavefunction<Scalar> out = psi;
  ComplexArray<Scalar> scratch;
  plan.apply(out.amplitudes(), scratch);
  return out;
}

/// Number of equal substeps no longer than `max_substep` covering `duration`.
template <typename Scalar>
std::size_t substep_count(Scalar duration, Scalar max_substep) {
  if (!(max_substep > 0)) throw PreconditionError("max_substep must be positive");
  if (duration <= 0) return 0;
  const Scalar ratio = duration / max_substep;
  const auto count = static_cast<std::size_t>(std::ceil(ratio * (Scalar(1) - Scalar(1e-12))));
  return count == 0 ? 1 : count;
}

/// exp(-i H duration) applied as ceil(duration/max_substep) equal Strang steps.
template <Potential P>
Wavefunction<typename P::Scalar> evolve(const Wavefunction<typename P::Scalar>& psi, const P& v,
                                        typename P::Scalar mass, typename P::Scalar duration,
                                        typename P::Scalar max_substep) {
  using Scalar = typename P::Scalar;
  if (!(duration >= 0)) throw PreconditionError("evolve: duration must be non-negative");
  const std::size_t count = substep_count(duration, max_substep);
  if (count == 0) return psi;
  const auto plan = StepPlan<Scalar>::from(psi.grid_ptr(), v, mass, duration / static_cast<Scalar>(count));
  Wavefunction<Scalar> out = in_position(psi);
  ComplexArray<Scalar> scratch;
  for (std::size_t i = 0; i < count; ++i) plan.apply(out.amplitudes(), scratch);
  return out;
}

/// <H> / <psi|psi> with the kinetic term evaluated spectrally.
template <typename Scalar>
Scalar energy_expectation(const Wavefunction<Scalar>& psi, const RealArray<Scalar>& potential,
                          Scalar mass) {
  const auto pos = in_position(psi);
  const auto mom = in_momentum(psi);
  const auto& g = psi.grid();
  const Scalar norm = pos.amplitudes().abs2().sum() * g.dx();
  if (!(norm > 0)) throw PreconditionError("energy of a zero-norm state");
  const Scalar kinetic =
      (mom.amplitudes().abs2() * g.p_axis().square()).sum() * g.dp() / (Scalar(2) * mass);
  const Scalar pot = (pos.amplitudes().abs2() * potential).sum() * g.dx();
  return (kinetic + pot) / norm;
}

}  // namespace qzd

#endif  // QZD_PROPAGATOR_HPP
