#ifndef QZD_STATE_HPP
#define QZD_STATE_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>

#include "qzd/grid.hpp"

namespace qzd {

enum class Representation { position, momentum };
enum class Axis { position, momentum };

/// Complex amplitude field on a grid, in position or momentum representation.
///
/// States are not required to be normalized: the selective measurement
/// sequence deliberately keeps the unnormalized state, whose squared norm is
/// the survival probability.
template <typename Scalar = double>
class Wavefunction {
 public:
  using Complex = std::complex<Scalar>;

  Wavefunction(GridPtr<Scalar> grid, ComplexArray<Scalar> amplitudes,
               Representation representation = Representation::position)
      : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)), representation_(representation) {
    if (!grid_) throw PreconditionError("wavefunction: null grid");
    if (amplitudes_.size() != grid_->ssize()) {
      throw PreconditionError("wavefunction: amplitude count does not match grid size");
    }
  }

  const Grid<Scalar>& grid() const { return *grid_; }
  const GridPtr<Scalar>& grid_ptr() const { return grid_; }
  const ComplexArray<Scalar>& amplitudes() const { return amplitudes_; }
  ComplexArray<Scalar>& amplitudes() { return amplitudes_; }
  Representation representation() const { return representation_; }

  /// Integration weight of the current representation (dx or dp).
  Scalar measure() const {
    return representation_ == Representation::position ? grid_->dx() : grid_->dp();
  }

 private:
  GridPtr<Scalar> grid_;
  ComplexArray<Scalar> amplitudes_;
  Representation representation_;
};

template <typename Scalar>
Wavefunction<Scalar> to_momentum(const Wavefunction<Scalar>& psi) {
  if (psi.representation() != Representation::position) {
    throw PreconditionError("to_momentum: state is already in momentum representation");
  }
  ComplexArray<Scalar> out;
  psi.grid().forward(psi.amplitudes(), out);
  return {psi.grid_ptr(), std::move(out), Representation::momentum};
}

template <typename Scalar>
Wavefunction<Scalar> to_position(const Wavefunction<Scalar>& psi) {
  if (psi.representation() != Representation::momentum) {
    throw PreconditionError("to_position: state is already in position representation");
  }
  ComplexArray<Scalar> out;
  psi.grid().inverse(psi.amplitudes(), out);
  return {psi.grid_ptr(), std::move(out), Representation::position};
}

template <typename Scalar>
Wavefunction<Scalar> in_position(const Wavefunction<Scalar>& psi) {
  return psi.representation() == Representation::position ? psi : to_position(psi);
}

template <typename Scalar>
Wavefunction<Scalar> in_momentum(const Wavefunction<Scalar>& psi) {
  return psi.representation() == Representation::momentum ? psi : to_momentum(psi);
}

/// Normalized Gaussian (2/(pi dx^2))^{1/4} exp(-((x-x0)/dx)^2) exp(i p0 x).
/// `delta_x` is the half-width at which the probability density falls to
/// 1/e^2 of its peak.
template <typename Scalar>
Wavefunction<Scalar> gaussian_packet(const GridPtr<Scalar>& grid, Scalar x0, Scalar delta_x,
                                     Scalar p0 = Scalar(0)) {
  if (!(delta_x >= Scalar(4) * grid->dx())) {
    throw PreconditionError("gaussian_packet: width below 4 grid spacings");
  }
  const Scalar margin = Scalar(0.1) * grid->length();
  if (x0 < grid->x_min() + margin || x0 > grid->x_max() - margin) {
    throw PreconditionError("gaussian_packet: centre outside the central 80% of the grid");
  }
  const Scalar norm = std::pow(Scalar(2) / (std::numbers::pi_v<Scalar> * delta_x * delta_x), Scalar(0.25));
  const auto& x = grid->x_axis();
  ComplexArray<Scalar> amp(grid->ssize());
  for (Eigen::Index j = 0; j < amp.size(); ++j) {
    const Scalar u = (x(j) - x0) / delta_x;
    amp(j) = norm * std::exp(-u * u) * std::polar(Scalar(1), p0 * x(j));
  }
  return {grid, std::move(amp), Representation::position};
}

/// Squared norm in the state's own representation.
template <typename Scalar>
Scalar norm2(const Wavefunction<Scalar>& psi) {
  return psi.amplitudes().abs2().sum() * psi.measure();
}

template <typename Scalar>
RealArray<Scalar> probability_density(const Wavefunction<Scalar>& psi) {
  return in_position(psi).amplitudes().abs2();
}

/// |psi_hat|^2 on the ascending momentum axis (`Grid::p_sorted()`).
template <typename Scalar>
RealArray<Scalar> momentum_density(const Wavefunction<Scalar>& psi) {
  const auto mom = in_momentum(psi);
  const auto& order = psi.grid().sorted_order();
  RealArray<Scalar> out(psi.grid().ssize());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = std::norm(mom.amplitudes()(order[static_cast<std::size_t>(i)]));
  }
  return out;
}

namespace detail {

template <typename Scalar>
Scalar checked_norm(const RealArray<Scalar>& density, Scalar measure) {
  const Scalar total = density.sum() * measure;
  if (!(total > Scalar(0))) throw PreconditionError("expectation of a zero-norm state");
  return total;
}

}  // namespace detail

template <typename Scalar>
Scalar expectation_position(const Wavefunction<Scalar>& psi) {
  const RealArray<Scalar> rho = probability_density(psi);
  const Scalar total = detail::checked_norm<Scalar>(rho, psi.grid().dx());
  return (rho * psi.grid().x_axis()).sum() * psi.grid().dx() / total;
}

template <typename Scalar>
Scalar expectation_momentum(const Wavefunction<Scalar>& psi) {
  const RealArray<Scalar> rho = in_momentum(psi).amplitudes().abs2();
  const Scalar total = detail::checked_norm<Scalar>(rho, psi.grid().dp());
  return (rho * psi.grid().p_axis()).sum() * psi.grid().dp() / total;
}

/// Probability in [a, b] by the composite rule: interior lattice points get
/// weight dx, points sitting exactly on an endpoint get dx/2. An interval
/// covering the whole periodic cell returns the full norm. `b` may be +inf.
template <typename Scalar>
Scalar region_probability(const Wavefunction<Scalar>& psi, Scalar a, Scalar b) {
  const auto& g = psi.grid();
  const RealArray<Scalar> rho = probability_density(psi);
  if (a <= g.x_min() && b >= g.x_max()) return rho.sum() * g.dx();

  const Scalar eps = Scalar(1e-9) * g.dx();
  const auto& x = g.x_axis();
  Scalar sum = 0;
  for (Eigen::Index j = 0; j < rho.size(); ++j) {
    if (x(j) < a - eps || x(j) > b + eps) continue;
    const bool on_edge = std::abs(x(j) - a) <= eps || std::abs(x(j) - b) <= eps;
    sum += on_edge ? Scalar(0.5) * rho(j) : rho(j);
  }
  return sum * g.dx();
}

template <typename Scalar>
struct WidthEstimate {
  Scalar value;
  /// Set when the density crosses back above the 1/e^2 level outside the
  /// central lobe; `value` then only describes the dominant peak.
  bool multimodal;
};

/// Half-width at which the density falls to 1/e^2 of its peak, linearly
/// interpolated on each side and averaged.
template <typename Scalar>
WidthEstimate<Scalar> half_width_1e2(const Wavefunction<Scalar>& psi, Axis axis) {
  const auto& g = psi.grid();
  RealArray<Scalar> rho;
  RealArray<Scalar> coord;
  if (axis == Axis::position) {
    rho = probability_density(psi);
    coord = g.x_axis();
  } else {
    rho = momentum_density(psi);
    coord = g.p_sorted();
  }
  Eigen::Index peak = 0;
  const Scalar peak_value = rho.maxCoeff(&peak);
  if (!(peak_value > Scalar(0))) throw PreconditionError("half_width_1e2: zero density");
  const Scalar level = peak_value * std::exp(Scalar(-2));
  const Eigen::Index n = rho.size();

  Eigen::Index right = peak;
  while (right + 1 < n && rho(right + 1) >= level) ++right;
  Eigen::Index left = peak;
  while (left > 0 && rho(left - 1) >= level) --left;

  auto crossing = [&](Eigen::Index inside, Eigen::Index outside) {
    const Scalar t = (rho(inside) - level) / (rho(inside) - rho(outside));
    return coord(inside) + t * (coord(outside) - coord(inside));
  };
  const Scalar x_right = right + 1 < n ? crossing(right, right + 1) : coord(right);
  const Scalar x_left = left > 0 ? crossing(left, left - 1) : coord(left);

  bool multimodal = false;
  for (Eigen::Index j = 0; j < n; ++j) {
    if ((j < left - 1 || j > right + 1) && rho(j) >= level) {
      multimodal = true;
      break;
    }
  }
  return {Scalar(0.5) * (x_right - x_left), multimodal};
}

}  // namespace qzd

#endif  // QZD_STATE_HPP
