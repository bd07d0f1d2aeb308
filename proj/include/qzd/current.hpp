#ifndef QZD_CURRENT_HPP
#define QZD_CURRENT_HPP

#include <complex>
#include <numbers>

#include "qzd/state.hpp"

namespace qzd {

/// j(x) = Im{psi* dpsi/dx} / m on the position axis, with dpsi/dx taken
/// spectrally (the unpaired Nyquist mode is dropped from the derivative).
template <typename Scalar>
RealArray<Scalar> probability_current(const Wavefunction<Scalar>& psi, Scalar mass) {
  const auto pos = in_position(psi);
  const auto& g = psi.grid();
  ComplexArray<Scalar> mom;
  g.forward(pos.amplitudes(), mom);
  const Eigen::Index nyquist = g.ssize() / 2;
  for (Eigen::Index k = 0; k < mom.size(); ++k) {
    mom(k) *= k == nyquist ? std::complex<Scalar>(0) : std::complex<Scalar>(0, g.p_axis()(k));
  }
  ComplexArray<Scalar> deriv;
  g.inverse(std::move(mom), deriv);
  return (pos.amplitudes().conjugate() * deriv).imag() / mass;
}

/// j at an arbitrary position from momentum amplitudes, by direct
/// summation of the band-limited interpolant. O(n); used on the hot path
/// where the momentum amplitudes are already at hand.
template <typename Scalar>
Scalar point_current(const Grid<Scalar>& g, const ComplexArray<Scalar>& momentum_amplitudes,
                     Scalar mass, Scalar x) {
  using Complex = std::complex<Scalar>;
  const Eigen::Index nyquist = g.ssize() / 2;
  Complex value(0);
  Complex slope(0);
  for (Eigen::Index k = 0; k < momentum_amplitudes.size(); ++k) {
    const Scalar p = g.p_axis()(k);
    const Complex term = momentum_amplitudes(k) * std::polar(Scalar(1), p * x);
    value += term;
    if (k != nyquist) slope += Complex(0, p) * term;
  }
  const Scalar scale = g.dp() / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
  return (std::conj(value * scale) * (slope * scale)).imag() / mass;
}

}  // namespace qzd

#endif  // QZD_CURRENT_HPP
