#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "qzd/state.hpp"

using namespace qzd;
using Complex = std::complex<double>;

namespace {

Wavefunction<double> random_state(const GridPtr<double>& grid, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  ComplexArray<double> amp(grid->ssize());
  for (auto& z : amp) z = {normal(rng), normal(rng)};
  return {grid, amp};
}

double relative_l2(const ComplexArray<double>& a, const ComplexArray<double>& b) {
  return std::sqrt((a - b).abs2().sum() / b.abs2().sum());
}

}  // namespace

TEST_CASE("two-pi box with eight points") {
  const auto g = make_grid(-std::numbers::pi, std::numbers::pi, 8);
  CHECK(std::abs(g->dx() - std::numbers::pi / 4) <= 1e-15);
  CHECK(std::abs(g->dp() - 1.0) <= 1e-15);
  const double expected[] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int k = 0; k < 8; ++k) CHECK(std::abs(g->p_axis()(k) - expected[k]) <= 1e-14);
}

TEST_CASE("working grid spacing and momentum range") {
  const auto g = make_grid(-150.0, 150.0, 2048);
  CHECK(std::abs(g->dx() - 0.1465) <= 1e-3 * 0.1465);
  CHECK(std::abs(g->p_max() - 21.45) <= 1e-3 * 21.45);
  CHECK(g->length() == 300.0);
}

TEST_CASE("construction preconditions") {
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 7), PreconditionError);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 12), PreconditionError);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 4), PreconditionError);
  CHECK_THROWS_AS(make_grid(1.0, 1.0, 16), PreconditionError);
  CHECK_THROWS_AS(make_grid(2.0, 1.0, 16), PreconditionError);
}

TEST_CASE("axis invariants") {
  for (std::size_t n : {16u, 256u, 2048u}) {
    const auto g = make_grid(-37.5, 80.0, n);
    const double product = 2 * std::numbers::pi / static_cast<double>(n);
    CHECK(std::abs(g->dx() * g->dp() - product) <= 1e-14 * product);
    std::set<double> values(g->p_axis().begin(), g->p_axis().end());
    CHECK(values.size() == n);
    const auto sorted = g->p_sorted();
    CHECK(std::is_sorted(sorted.begin(), sorted.end()));
    const double half = static_cast<double>(n / 2);
    CHECK(std::abs(sorted.minCoeff() + half * g->dp()) <= 1e-12 * g->p_max());
    CHECK(std::abs(sorted.maxCoeff() - (half - 1) * g->dp()) <= 1e-12 * g->p_max());
    CHECK(sorted.minCoeff() >= -g->p_max() * (1 + 1e-14));
    CHECK(sorted.maxCoeff() < g->p_max());
    CHECK(g->x_axis()(0) == -37.5);
    CHECK(std::abs(g->x_axis()(g->ssize() - 1) - (80.0 - g->dx())) <= 1e-12);
  }
}

TEST_CASE("constant field transforms to the zero mode") {
  const auto g = make_grid(-10.0, 10.0, 64);
  ComplexArray<double> amp = ComplexArray<double>::Constant(g->ssize(), 1.0 / std::sqrt(g->length()));
  const auto mom = to_momentum(Wavefunction<double>(g, amp));
  CHECK(std::abs(std::norm(mom.amplitudes()(0)) * g->dp() - 1.0) <= 1e-13);
  CHECK(mom.amplitudes().tail(63).abs2().maxCoeff() < 1e-28);
}

TEST_CASE("roundtrip and Parseval on random fields") {
  const auto g = make_grid(-150.0, 150.0, 2048);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto psi = random_state(g, seed);
    const auto mom = to_momentum(psi);
    CHECK(mom.representation() == Representation::momentum);
    CHECK(relative_l2(to_position(mom).amplitudes(), psi.amplitudes()) <= 1e-12);
    CHECK(std::abs(norm2(mom) - norm2(psi)) / norm2(psi) <= 1e-12);
  }
}

TEST_CASE("minimal packet has momentum half-width sqrt 2") {
  const auto g = make_grid(-150.0, 150.0, 2048);
  const auto psi = gaussian_packet(g, 30.0, std::sqrt(2.0));
  const auto w = half_width_1e2(to_momentum(psi), Axis::momentum);
  CHECK_FALSE(w.multimodal);
  CHECK(std::abs(w.value - std::sqrt(2.0)) <= 0.01 * std::sqrt(2.0));
}

TEST_CASE("representation mismatch is rejected") {
  const auto g = make_grid(-10.0, 10.0, 64);
  const auto psi = gaussian_packet(g, 0.0, 2.0);
  CHECK_THROWS_AS(to_position(psi), PreconditionError);
  CHECK_THROWS_AS(to_momentum(to_momentum(psi)), PreconditionError);
}
