#ifndef QZD_GRID_HPP
#define QZD_GRID_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "qzd/errors.hpp"

namespace qzd {

template <typename Scalar>
using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexArray = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Uniform periodic lattice on [x_min, x_max) together with its conjugate
/// momentum lattice.
///
/// The momentum axis is kept in natural transform ordering: k*dp for
/// k = 0..n/2-1 followed by (k-n)*dp for k = n/2..n-1. `sorted_order()`
/// gives the permutation that produces ascending momenta for export.
///
/// Transform convention (the only place it lives):
///
///   psi_hat(p_k) = dx/sqrt(2 pi) * sum_j psi(x_j) exp(-i p_k x_j)
///   psi(x_j)     = dp/sqrt(2 pi) * sum_k psi_hat(p_k) exp(+i p_k x_j)
///
/// which approximates the continuum unitary Fourier pair, so that
/// sum |psi|^2 dx == sum |psi_hat|^2 dp exactly (dx * dp * n = 2 pi).
template <typename Scalar = double>
class Grid {
 public:
  using Real = Scalar;
  using Complex = std::complex<Scalar>;

  Grid(Scalar x_min, Scalar x_max, std::size_t n)
      : x_min_(x_min), x_max_(x_max), n_(n) {
    if (!(x_max > x_min)) {
      throw PreconditionError("grid: x_max must be greater than x_min");
    }
    if (n < 8 || (n & (n - 1)) != 0) {
      throw PreconditionError("grid: point count must be a power of two >= 8, got " +
                              std::to_string(n));
    }
    const auto count = static_cast<Eigen::Index>(n);
    length_ = x_max - x_min;
    dx_ = length_ / static_cast<Scalar>(n);
    dp_ = Scalar(2) * std::numbers::pi_v<Scalar> / length_;

    x_axis_.resize(count);
    p_axis_.resize(count);
    for (Eigen::Index j = 0; j < count; ++j) {
      x_axis_(j) = x_min + static_cast<Scalar>(j) * dx_;
      const Eigen::Index k = j < count / 2 ? j : j - count;
      p_axis_(j) = static_cast<Scalar>(k) * dp_;
    }

    const Scalar inv_sqrt_2pi = Scalar(1) / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
    forward_factor_.resize(count);
    inverse_factor_.resize(count);
    for (Eigen::Index k = 0; k < count; ++k) {
      const Complex phase = std::polar(Scalar(1), -p_axis_(k) * x_min);
      forward_factor_(k) = dx_ * inv_sqrt_2pi * phase;
      inverse_factor_(k) = dp_ * inv_sqrt_2pi * std::conj(phase);
    }

    sorted_order_.resize(n);
    std::iota(sorted_order_.begin(), sorted_order_.end(), Eigen::Index{0});
    std::stable_sort(sorted_order_.begin(), sorted_order_.end(),
                     [this](Eigen::Index a, Eigen::Index b) { return p_axis_(a) < p_axis_(b); });
  }

  Scalar x_min() const { return x_min_; }
  Scalar x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  Eigen::Index ssize() const { return static_cast<Eigen::Index>(n_); }
  Scalar dx() const { return dx_; }
  Scalar dp() const { return dp_; }
  Scalar length() const { return length_; }
  /// Largest representable |p| (the Nyquist momentum).
  Scalar p_max() const { return std::numbers::pi_v<Scalar> / dx_; }

  const RealArray<Scalar>& x_axis() const { return x_axis_; }
  const RealArray<Scalar>& p_axis() const { return p_axis_; }
  const std::vector<Eigen::Index>& sorted_order() const { return sorted_order_; }

  RealArray<Scalar> p_sorted() const {
    RealArray<Scalar> out(ssize());
    for (Eigen::Index i = 0; i < ssize(); ++i) out(i) = p_axis_(sorted_order_[static_cast<std::size_t>(i)]);
    return out;
  }

  /// Index of the lattice point closest to x.
  Eigen::Index nearest_index(Scalar x) const {
    const auto j = static_cast<Eigen::Index>(std::llround((x - x_min_) / dx_));
    return std::clamp<Eigen::Index>(j, 0, ssize() - 1);
  }

  /// Position amplitudes -> momentum amplitudes. `out` must not alias `in`.
  void forward(const ComplexArray<Scalar>& in, ComplexArray<Scalar>& out) const {
    out.resize(ssize());
    engine().fwd(out.data(), in.data(), ssize());
    out *= forward_factor_;
  }

  /// Momentum amplitudes -> position amplitudes. `in` is taken by value
  /// because the normalization is applied before the transform.
  void inverse(ComplexArray<Scalar> in, ComplexArray<Scalar>& out) const {
    in *= inverse_factor_;
    out.resize(ssize());
    engine().inv(out.data(), in.data(), ssize());
  }

  bool operator==(const Grid& other) const {
    return x_min_ == other.x_min_ && x_max_ == other.x_max_ && n_ == other.n_;
  }

 private:
  // kissfft caches twiddles per size; one engine per thread keeps the grid
  // itself immutable and shareable.
  static Eigen::FFT<Scalar>& engine() {
    thread_local Eigen::FFT<Scalar> fft = [] {
      Eigen::FFT<Scalar> f;
      f.SetFlag(Eigen::FFT<Scalar>::Unscaled);
      return f;
    }();
    return fft;
  }

  Scalar x_min_;
  Scalar x_max_;
  std::size_t n_;
  Scalar length_{};
  Scalar dx_{};
  Scalar dp_{};
  RealArray<Scalar> x_axis_;
  RealArray<Scalar> p_axis_;
  ComplexArray<Scalar> forward_factor_;
  ComplexArray<Scalar> inverse_factor_;
  std::vector<Eigen::Index> sorted_order_;
};

template <typename Scalar>
using GridPtr = std::shared_ptr<const Grid<Scalar>>;

template <typename Scalar = double>
GridPtr<Scalar> make_grid(Scalar x_min, Scalar x_max, std::size_t n) {
  return std::make_shared<const Grid<Scalar>>(x_min, x_max, n);
}

}  // namespace qzd

#endif  // QZD_GRID_HPP
