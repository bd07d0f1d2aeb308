#include "qzd/check.hpp"

#include <cmath>
#include <random>

#include "qzd/zeno.hpp"

namespace qzd {

namespace {

CheckResult make(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, value <= tolerance};
}

ComplexArray<double> random_field(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  ComplexArray<double> out(n);
  for (auto& z : out) z = {normal(rng), normal(rng)};
  return out;
}

}  // namespace

std::vector<CheckResult> run_invariant_checks() {
  std::vector<CheckResult> out;
  const auto grid = make_grid<double>(-60, 60, 1024);
  const GaussianPotential<double> well(10, 15);
  const double sqrt2 = std::sqrt(2.0);
  const auto packet = gaussian_packet(grid, 15.0, sqrt2);

  {
    const auto plan = StepPlan<double>::from(grid, well, 1.0, 0.05);
    auto psi = packet;
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
      const double before = norm2(psi);
      psi = step(psi, plan);
      worst = std::max(worst, std::abs(norm2(psi) - before));
    }
    out.push_back(make("split-step unitarity (per step)", worst, 1e-12));
  }
  {
    const Wavefunction<double> psi(grid, random_field(grid->ssize(), 7));
    const double pos = norm2(psi);
    const double mom = norm2(to_momentum(psi));
    out.push_back(make("Parseval (relative)", std::abs(pos - mom) / pos, 1e-12));
    const auto back = to_position(to_momentum(psi));
    const double err = std::sqrt((back.amplitudes() - psi.amplitudes()).abs2().sum() / psi.amplitudes().abs2().sum());
    out.push_back(make("transform roundtrip (relative L2)", err, 1e-12));
  }
  {
    const auto window = make_window(grid, 1.0, sqrt2);
    const auto evolved = evolve(packet, well, 1.0, 2.0, 0.05);
    const auto once = project(in_momentum(evolved), window);
    const auto twice = project(once.state, window);
    const bool identical = (once.state.amplitudes() == twice.state.amplitudes()).all();
    out.push_back(make("projector idempotence (second p_step - 1)", std::abs(twice.p_step - 1.0) + (identical ? 0.0 : 1.0),
                       1e-14));
  }
  {
    QzdConfig<double> config;
    config.mass = 1;
    config.delta_v = sqrt2;
    config.horizon = 4;
    config.n_measurements = 64;
    const auto rec = qzd_run(packet, well, config);
    double product = 1;
    double worst = 0;
    for (std::size_t i = 0; i < rec.survival.size(); ++i) {
      product *= rec.step_probabilities[i];
      worst = std::max(worst, std::abs(rec.survival[i] - product));
    }
    out.push_back(make("survival equals product of step probabilities", worst, 1e-10));
  }
  {
    QzdConfig<double> config;
    config.mass = 1;
    config.delta_v = 1e6;
    config.horizon = 1;
    config.n_measurements = 10;
    config.max_substep = 0.05;
    const auto rec = qzd_run(packet, well, config);
    const auto plain = evolve(packet, well, 1.0, 1.0, 0.05);
    const double diff = std::sqrt((rec.final_state.amplitudes() - plain.amplitudes()).abs2().sum() * grid->dx());
    out.push_back(make("all-pass window matches plain evolution (L2)", diff + std::abs(rec.final_survival() - 1.0),
                       1e-10));
  }
  return out;
}

}  // namespace qzd
