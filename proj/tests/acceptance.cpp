// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "qzd/check.hpp"
#include "qzd/experiments.hpp"
#include "qzd/sweep.hpp"

using namespace qzd;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kInf = std::numeric_limits<double>::infinity();

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::size_t cores() { return std::max(1u, std::thread::hardware_concurrency()); }

// m = 1, dv = sqrt 2, well V0 = 10, xp = 30, packet at 30 with dx = sqrt 2.
struct Fig3Config {
  GridPtr<double> grid;
  GaussianPotential<double> potential;
  Wavefunction<double> psi0;

  explicit Fig3Config(std::size_t n = 2048, PotentialKind kind = PotentialKind::well)
      : grid(make_grid(-150.0, 150.0, n)), potential(10, 30, kind), psi0(gaussian_packet(grid, 30.0, kSqrt2)) {}

  QzdConfig<double> config(double horizon, std::size_t n_measurements) const {
    QzdConfig<double> c;
    c.mass = 1;
    c.delta_v = kSqrt2;
    c.horizon = horizon;
    c.n_measurements = n_measurements;
    return c;
  }

  double t_analytic() const { return teleportation_time_analytic(1.0, kSqrt2, potential, 30.0); }

  // Run on to twice the teleportation time with the same interval so the
  // density maximum at -x0 is bracketed.
  MeasuredTime<double> measured() const {
    auto c = config(2 * t_analytic(), 2048);
    c.probes = {-30.0};
    c.record_flux_at.reset();
    return teleportation_time_measured(qzd_run(psi0, potential, c), -30.0);
  }
};

Verdict p1() {
  const auto start = std::chrono::steady_clock::now();
  const Fig3Config f;
  const auto rec = qzd_run(f.psi0, f.potential, f.config(11.533, 1024));
  const double elapsed = seconds_since(start);
  const double p = rec.final_survival();
  const double beta2 = std::norm(overlap_coefficients(rec.final_state, 30.0, kSqrt2).beta);
  const bool pass = std::abs(p - 0.93) <= 0.02 && beta2 >= 0.9 && elapsed <= 60;
  return {pass, fmt("P_N = %.4f (target 0.93 +- 0.02), |beta|^2 = %.4f (target >= 0.9), %.2f s", p, beta2, elapsed)};
}

Verdict p2() {
  const Fig3Config f;
  const double analytic = f.t_analytic();
  const auto m = f.measured();
  const double rel = std::abs(m.time - analytic) / analytic;
  const bool pass = std::abs(analytic - 11.532) <= 1e-3 && !m.at_edge && m.teleported && rel <= 0.05;
  return {pass, fmt("analytic %.5f (target 11.532 +- 1e-3), measured %.4f (%.2f%% off, limit 5%%)", analytic, m.time,
                    100 * rel)};
}

Verdict p3() {
  const Fig3Config f;
  const double t = f.t_analytic();
  const auto zeno = qzd_run(f.psi0, f.potential, f.config(t, 2048));
  const auto rep = continuity_report(zeno);
  const double start = zeno.sample_region_prob.front();
  const double end = zeno.sample_region_prob.back();
  const double flux = rep.max_abs_flux_integral();
  const auto control = continuity_report(qzd_run(f.psi0, f.potential, f.config(30.0, 0)));
  const double residual = control.max_abs_residual();
  const bool pass = start >= 0.999 && end <= 0.05 && flux <= 0.01 && residual <= 0.02;
  return {pass, fmt("N=2^11: P[0,inf) %.5f -> %.4f, max |int j(0)dt| = %.2e; N=0 control max residual %.2e", start,
                    end, flux, residual)};
}

Verdict p4() {
  const Fig3Config f;
  std::vector<std::size_t> n_list;
  for (std::size_t n = 16; n <= 2048; n *= 2) n_list.push_back(n);
  const auto rows = sweep_measurements(f.psi0, f.potential, f.config(30.0, 1), n_list, cores());
  double worst_drop = 0;
  std::string curve;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) worst_drop = std::max(worst_drop, rows[i - 1].survival - rows[i].survival);
    curve += fmt("%s%.3f", i ? " " : "", rows[i].survival);
  }
  const double gain = rows.back().survival - rows[2].survival;
  const bool pass = worst_drop <= 0.01 && gain >= 0.1;
  return {pass, fmt("P(2^4..2^11) = [%s], largest drop %.4f (limit 0.01), P(2^11)-P(2^6) = %.3f (limit 0.1)",
                    curve.c_str(), worst_drop, gain)};
}

Verdict p5() {
  const Fig3Config well;
  const Fig3Config barrier(2048, PotentialKind::barrier);
  const double t = well.t_analytic();
  const double pw = qzd_run(well.psi0, well.potential, well.config(t, 1024)).final_survival();
  const double pb = qzd_run(barrier.psi0, barrier.potential, barrier.config(t, 1024)).final_survival();
  const auto mw = well.measured();
  const auto mb = barrier.measured();
  const double rel = std::abs(mb.time - mw.time) / mw.time;
  const double rel_analytic = std::abs(mb.time - t) / t;
  const bool pass = std::abs(pb - pw) <= 0.03 && !mb.at_edge && rel <= 0.05 && rel_analytic <= 0.05;
  return {pass, fmt("P barrier %.4f vs well %.4f (limit 0.03); T_meas barrier %.4f vs well %.4f (%.2f%%), vs "
                    "analytic %.2f%% (limit 5%%)",
                    pb, pw, mb.time, mw.time, 100 * rel, 100 * rel_analytic)};
}

Verdict p6() {
  const auto start = std::chrono::steady_clock::now();
  const RunnerOptions options{.jobs = cores()};
  std::string detail;
  bool pass = true;

  for (const char* name : {"fig5b", "fig5c"}) {
    const auto spec = preset(name);
    const auto result = run_experiment(spec, options);
    const auto& n_list = spec.measurement.n_list;
    std::string rows;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      const auto id = "_N" + std::to_string(n_list[i]);
      const double pe = result.run("electron" + id).survival;
      const double pm = result.run("muon" + id).survival;
      const bool intermediate = i > 0 && i + 1 < n_list.size();
      pass = pass && pe > pm && (!intermediate || pe - pm >= 0.02);
      rows += fmt(" N=%zu e=%.3f mu=%.3f;", n_list[i], pe, pm);
    }
    detail += fmt("%s:%s ", name, rows.c_str());
  }

  {
    const auto spec = preset("fig5d");
    const auto result = run_experiment(spec, options);
    const double pe = result.run("electron_dt1").survival;
    const double pm = result.run("muon_dt1").survival;
    pass = pass && std::abs(pe - pm) <= 0.05;
    detail += fmt("fig5d dt=1: e=%.4f mu=%.4f (|diff| limit 0.05); ", pe, pm);
  }

  {
    auto b = preset("fig5b");
    auto c = preset("fig5c");
    b.include_extended = c.include_extended = true;
    const double tb0 = setup_particle(b, b.particles[0]).t_telep_analytic;
    const double tc0 = setup_particle(c, c.particles[0]).t_telep_analytic;
    double worst_b = 0;
    double worst_c = 0;
    for (const auto& p : b.particles) {
      worst_b = std::max(worst_b, std::abs(setup_particle(b, p).t_telep_analytic / tb0 - 1));
      const double ratio = setup_particle(c, p).t_telep_analytic / tc0;
      worst_c = std::max(worst_c, std::abs(ratio / std::sqrt(p.mass) - 1));
    }
    pass = pass && worst_b <= 1e-9 && worst_c <= 1e-9;
    detail += fmt("T_b spread %.1e, T_c/sqrt(m) spread %.1e; ", worst_b, worst_c);
  }
  const double elapsed = seconds_since(start);
  pass = pass && elapsed <= 900;
  return {pass, detail + fmt("%.0f s", elapsed)};
}

Verdict p7() {
  const auto start = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (const auto& c : run_invariant_checks()) {
    pass = pass && c.passed;
    if (!c.passed) detail += c.name + " failed; ";
  }

  // Free packet against its closed form.
  const auto g = make_grid(-150.0, 150.0, 2048);
  const auto psi = gaussian_packet(g, -20.0, kSqrt2, 1.3);
  struct Free {
    using Scalar = double;
    double evaluate(double) const { return 0; }
    double derivative(double) const { return 0; }
    double extremum() const { return 0; }
    bool symmetric() const { return true; }
  };
  const double t = 2.5;
  const auto evolved = evolve(psi, Free{}, 1.0, t, 0.05);
  double oracle = 0;
  for (Eigen::Index j = 0; j < g->ssize(); ++j) {
    const double x = g->x_axis()(j);
    const std::complex<double> w(1, t / 1.0);  // 1 + i t / (2 m s^2), s^2 = dx^2 / 4 = 1/2
    const std::complex<double> e = std::complex<double>(-(x + 20) * (x + 20) / 2, 1.3 * (x + 20) - 1.3 * 1.3 * t / 2) / w;
    const auto exact = std::pow(std::numbers::pi, -0.25) / std::sqrt(w) * std::exp(e) * std::polar(1.0, -1.3 * 20);
    oracle = std::max(oracle, std::abs(evolved.amplitudes()(j) - exact));
  }
  pass = pass && oracle <= 1e-10;

  const Fig3Config coarse(2048);
  const Fig3Config fine(4096);
  const double pc = qzd_run(coarse.psi0, coarse.potential, coarse.config(11.533, 1024)).final_survival();
  const double pf = qzd_run(fine.psi0, fine.potential, fine.config(11.533, 1024)).final_survival();
  pass = pass && std::abs(pf - pc) <= 0.005;
  const double elapsed = seconds_since(start);
  pass = pass && elapsed <= 30;
  return {pass, detail + fmt("invariant suite %s, free-packet oracle %.1e, grid doubling dP = %.1e, %.1f s",
                             detail.empty() ? "clean" : "with failures", oracle, std::abs(pf - pc), elapsed)};
}

Verdict p8() {
  const auto e = thermal_params(1.856e-3, 1.0);
  const double v = e.v_th * kVelocityAuInMetresPerSecond;
  const double dx = e.delta_x * kLengthAuInMetres;
  const bool pass = std::abs(v - 9.4e4) <= 0.02 * 9.4e4 && std::abs(dx - 2.46e-9) <= 0.02 * 2.46e-9;
  return {pass, fmt("v_th = %.4g m/s (target 9.4e4 +- 2%%), dx = %.4g m (target 2.46e-9 +- 2%%)", v, dx)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"P1", p1}, {"P2", p2}, {"P3", p3}, {"P4", p4}, {"P5", p5}, {"P6", p6}, {"P7", p7}, {"P8", p8}};
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
