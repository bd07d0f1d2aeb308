#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "qzd/current.hpp"
#include "qzd/diagnostics.hpp"

using namespace qzd;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kA = 1.856e-3;

struct ShiftedWell {
  using Scalar = double;
  double evaluate(double x) const { return -std::exp(-(x - 1) * (x - 1)); }
  double derivative(double x) const { return 2 * (x - 1) * std::exp(-(x - 1) * (x - 1)); }
  double extremum() const { return 1; }
  bool symmetric() const { return false; }
};

struct Setup {
  GridPtr<double> grid = make_grid(-150.0, 150.0, 2048);
  GaussianPotential<double> well{10, 30};
  Wavefunction<double> psi0 = gaussian_packet(grid, 30.0, kSqrt2);
  double t_telep = teleportation_time_analytic(1.0, kSqrt2, well, 30.0);

  QzdConfig<double> config(double horizon, std::size_t n) const {
    QzdConfig<double> c;
    c.mass = 1;
    c.delta_v = kSqrt2;
    c.horizon = horizon;
    c.n_measurements = n;
    return c;
  }
};

}  // namespace

TEST_CASE("current of a real packet vanishes") {
  const Setup s;
  CHECK(probability_current(s.psi0, 1.0).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("current of a plane wave") {
  const Setup s;
  const auto& g = *s.grid;
  for (const Eigen::Index k : {5, 40, 2000}) {
    ComplexArray<double> mom = ComplexArray<double>::Zero(g.ssize());
    mom(k) = 1.0 / std::sqrt(g.dp());
    const auto psi = to_position(Wavefunction<double>(s.grid, mom, Representation::momentum));
    for (const double m : {1.0, 206.767}) {
      const RealArray<double> expected = g.p_axis()(k) / m * probability_density(psi);
      CHECK((probability_current(psi, m) - expected).abs().maxCoeff() <= 1e-14 * std::abs(g.p_axis()(k)));
      CHECK(std::abs(point_current(g, mom, m, 0.37) - expected(0)) <= 1e-12 * std::abs(expected(0)));
    }
  }
}

TEST_CASE("point current agrees with the current field") {
  const Setup s;
  const auto psi = evolve(s.psi0, s.well, 1.0, 2.0, 0.05);
  const auto field = probability_current(psi, 1.0);
  const auto mom = to_momentum(psi);
  for (const Eigen::Index j : {1000, 1200, 1230, 1300}) {
    const double x = s.grid->x_axis()(j);
    CHECK(std::abs(point_current(*s.grid, mom.amplitudes(), 1.0, x) - field(j)) <= 1e-13);
  }
}

TEST_CASE("continuity holds without measurements") {
  const Setup s;
  const auto rec = qzd_run(s.psi0, s.well, s.config(30.0, 0));
  const auto rep = continuity_report(rec);
  CHECK(rep.times.front() == 0.0);
  CHECK(rep.decrement_series.front() == 0.0);
  CHECK(rep.flux_integral_series.front() == 0.0);
  CHECK(rep.residual_series.front() == 0.0);
  CHECK(std::abs(rep.norm_series.front() - 1.0) <= 1e-12);
  CHECK(rep.max_abs_residual() <= 0.01);
  CHECK(std::abs(rep.decrement_series.back() - rep.flux_integral_series.back()) <= 0.01);
  CHECK(rep.decrement_series.back() > 0.5);

  // d/dt P[0, inf) = j(0, t), by central differences over the substeps.
  double worst = 0;
  for (std::size_t i = 1; i + 1 < rec.sample_times.size(); ++i) {
    const double rate = (rec.sample_region_prob[i + 1] - rec.sample_region_prob[i - 1]) /
                        (rec.sample_times[i + 1] - rec.sample_times[i - 1]);
    worst = std::max(worst, std::abs(rate - rec.flux_series[i]));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("continuity is violated under frequent measurement") {
  const Setup s;
  const auto rep = continuity_report(qzd_run(s.psi0, s.well, s.config(s.t_telep, 2048)));
  CHECK(std::abs(rep.norm_series.front() - 1.0) <= 1e-12);
  CHECK(rep.decrement_series.back() >= 0.9);
  CHECK(rep.max_abs_flux_integral() <= 0.01);
}

TEST_CASE("continuity needs the flux series") {
  const Setup s;
  auto config = s.config(2.0, 16);
  config.record_flux_at.reset();
  CHECK_THROWS_AS(continuity_report(qzd_run(s.psi0, s.well, config)), PreconditionError);
}

TEST_CASE("analytic teleportation time") {
  const Setup s;
  CHECK(std::abs(s.t_telep - 11.532) <= 1e-3);
  CHECK(std::abs(s.t_telep - 2 * kSqrt2 / 0.24526) <= 1e-3);
  CHECK_THROWS_AS(teleportation_time_analytic(1.0, kSqrt2, s.well, 0.0), NoTeleportationError);
  CHECK(teleportation_time_analytic(1.0, kSqrt2, s.well.flipped(), 30.0) == s.t_telep);
  CHECK(teleportation_time_analytic(1.0, kSqrt2, s.well, -30.0) == s.t_telep);
  CHECK(teleportation_time_analytic(1.0, kSqrt2, s.well.flipped(), -30.0) == s.t_telep);

  const ShiftedWell v;
  const double x1 = mirror_turning_point(v, -0.2);
  const double expected = 0.3 / std::abs(v.derivative(-0.2)) + 0.3 / std::abs(v.derivative(x1));
  CHECK(std::abs(teleportation_time_analytic(1.0, 0.3, v, -0.2) - expected) <= 1e-12);
}

TEST_CASE("thermal teleportation times") {
  const GaussianPotential<double> fixed(0.4396, 1000);
  const double te = teleportation_time_thermal(kA, 1.0, fixed, 1414.2);
  CHECK(std::abs(te - 512) <= 0.5);
  CHECK(std::abs(teleportation_time_analytic(1.0, std::sqrt(kA), fixed, 1414.2) - te) <= 1e-12);

  const double m_mu = 206.767;
  const GaussianPotential<double> scaled(0.4396 * std::sqrt(m_mu), 1000);
  const double tmu = teleportation_time_thermal(kA, m_mu, scaled, 1414.2);
  CHECK(std::abs(tmu - te) <= 1e-10 * te);

  const double tp = teleportation_time_thermal(kA, 1836.0, fixed, 1414.2);
  CHECK(std::abs(tp / te - std::sqrt(1836.0)) <= 1e-9 * std::sqrt(1836.0));
  CHECK(std::abs(tp / te - 42.85) <= 0.01);
  CHECK_THROWS_AS(teleportation_time_thermal(0.0, 1.0, fixed, 1414.2), PreconditionError);
}

TEST_CASE("measured teleportation time of the anchor configuration") {
  const Setup s;
  auto config = s.config(2 * s.t_telep, 2048);
  config.probes = {-30.0};
  const auto measured = teleportation_time_measured(qzd_run(s.psi0, s.well, config), -30.0);
  CHECK_FALSE(measured.at_edge);
  CHECK(measured.teleported);
  CHECK(std::abs(measured.time - 11.533) <= 0.5);
}

TEST_CASE("measured time within five percent of the analytic time") {
  const Setup s;
  for (const auto& v : {s.well, s.well.flipped()}) {
    auto config = s.config(2 * s.t_telep, 2048);
    config.probes = {-30.0};
    const auto measured = teleportation_time_measured(qzd_run(s.psi0, v, config), -30.0);
    REQUIRE_FALSE(measured.at_edge);
    CHECK(std::abs(measured.time - s.t_telep) <= 0.05 * s.t_telep);
  }
}

TEST_CASE("monotone density is flagged as an edge") {
  const Setup s;
  auto config = s.config(s.t_telep, 1);
  config.probes = {-30.0};
  const auto measured = teleportation_time_measured(qzd_run(s.psi0, s.well, config), -30.0);
  CHECK(measured.at_edge);
  config.probes.clear();
  CHECK_THROWS_AS(teleportation_time_measured(qzd_run(s.psi0, s.well, config), -30.0), PreconditionError);
}

TEST_CASE("snapshot-based measured time") {
  const Setup s;
  auto config = s.config(2 * s.t_telep, 2048);
  config.snapshot_stride = 16;
  const auto measured = teleportation_time_measured(qzd_run(s.psi0, s.well, config), -30.0);
  CHECK_FALSE(measured.at_edge);
  CHECK(std::abs(measured.time - s.t_telep) <= 0.05 * s.t_telep);
}

TEST_CASE("parabolic refinement") {
  // y = 3 - (t - 1.3)^2
  auto y = [](double t) { return 3 - (t - 1.3) * (t - 1.3); };
  CHECK(std::abs(detail::parabola_vertex(1.0, 1.5, 2.0, y(1.0), y(1.5), y(2.0)) - 1.3) <= 1e-14);
  CHECK(detail::parabola_vertex(0.0, 1.0, 2.0, 0.0, 1.0, 2.0) == 1.0);
}

TEST_CASE("two-site overlaps") {
  const Setup s;
  const auto start = overlap_coefficients(s.psi0, 30.0, kSqrt2);
  CHECK(std::abs(std::norm(start.alpha) - 1.0) <= 1e-12);
  CHECK(std::norm(start.beta) <= 1e-12);

  const auto half = qzd_run(s.psi0, s.well, s.config(s.t_telep / 2, 512));
  const auto mid = overlap_coefficients(half.final_state, 30.0, kSqrt2);
  CHECK(std::abs(std::norm(mid.alpha) - std::norm(mid.beta)) <= 0.15);
  CHECK(std::norm(mid.alpha) + std::norm(mid.beta) <= norm2(half.final_state) + 1e-10);

  const auto full = qzd_run(s.psi0, s.well, s.config(s.t_telep, 1024));
  const auto end = overlap_coefficients(full.final_state, 30.0, kSqrt2);
  CHECK(std::norm(end.alpha) <= 0.02);
  CHECK(std::norm(end.alpha) + std::norm(end.beta) <= full.final_survival() + 1e-10);
  CHECK(std::abs(std::norm(end.beta) - 0.93) <= 0.02);

  CHECK_THROWS_AS(overlap_coefficients(s.psi0, 1.0, kSqrt2), PreconditionError);
}

TEST_CASE("thermal parameters") {
  const auto e = thermal_params(kA, 1.0);
  CHECK(std::abs(e.v_th - 0.04308) <= 1e-5);
  CHECK(std::abs(e.v_th * kVelocityAuInMetresPerSecond - 9.4e4) <= 0.02 * 9.4e4);
  CHECK(std::abs(e.delta_x - 46.43) <= 0.01);
  CHECK(std::abs(e.delta_x * kLengthAuInMetres - 2.46e-9) <= 0.02 * 2.46e-9);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> log_a(-6, 0);
  std::uniform_real_distribution<double> log_m(0, 4);
  for (int i = 0; i < 50; ++i) {
    const double a = std::pow(10.0, log_a(rng));
    const double m = std::pow(10.0, log_m(rng));
    const auto t = thermal_params(a, m);
    CHECK(std::abs(t.v_th * m - std::sqrt(a * m)) <= 1e-14 * std::sqrt(a * m));
    CHECK(std::abs(t.delta_x * t.delta_p - 2.0) <= 1e-15);
  }
  CHECK_THROWS_AS(thermal_params(-1.0, 1.0), PreconditionError);
}
