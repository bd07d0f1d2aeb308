#ifndef QZD_SPEC_HPP
#define QZD_SPEC_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qzd/potential.hpp"

namespace qzd {

struct GridSpec {
  double x_min = -150;
  double x_max = 150;
  std::size_t n = 2048;
};

struct PotentialSpec {
  std::string shape = "gaussian";
  PotentialKind kind = PotentialKind::well;
  double v0 = 10;
  double xp = 30;
  /// Scale v0 by sqrt(m / m_e) per particle (equal teleportation times).
  bool v0_mass_scaling = false;
};

struct ParticleSpec {
  std::string name;
  double mass = 1;
  /// Only run when the experiment asks for the extended particle set.
  bool extended = false;
};

struct PacketSpec {
  double x0 = 30;
  /// Exactly one of delta_x and thermal_a is set.
  std::optional<double> delta_x;
  std::optional<double> thermal_a;
};

enum class HorizonMode { fixed, analytic, thermal };
enum class Scheme { fig2, fig3, fig4, fig5b, fig5c, fig5d, custom };

struct MeasurementSpec {
  /// Velocity window; derived as sqrt(a/m) from the packet's thermal_a
  /// when absent.
  std::optional<double> delta_v;
  HorizonMode horizon_mode = HorizonMode::fixed;
  double horizon = 30;
  /// Used by `run` and single-run figures.
  std::size_t n_measurements = 1024;
  /// Used by sweeps.
  std::vector<std::size_t> n_list;
  /// Shared measurement intervals (scheme d); N = round(T / dt).
  std::vector<double> dt_list;
  /// Extra snapshot runs (fig2 panels c, d).
  std::vector<std::size_t> snapshot_n;
  /// Horizon of the no-measurement control run (fig2 a, fig4 a).
  double control_horizon = 30;
  double substep_tau = 0.05;
  std::size_t snapshot_stride = 0;
  bool record_flux = true;
  double leak_tolerance = 1e-3;
};

struct ExperimentSpec {
  std::string name = "custom";
  Scheme scheme = Scheme::custom;
  GridSpec grid;
  PotentialSpec potential;
  std::vector<ParticleSpec> particles;
  PacketSpec packet;
  MeasurementSpec measurement;
  bool include_extended = false;
  std::string output_dir = "runs";
};

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& text);
std::string to_string(HorizonMode mode);
std::string to_string(PotentialKind kind);

nlohmann::json to_json(const ExperimentSpec& spec);
/// Validates the document against the schema; unknown or missing fields and
/// wrong types raise ConfigError naming the dotted field path.
ExperimentSpec spec_from_json(const nlohmann::json& doc);

std::string serialize_spec(const ExperimentSpec& spec);
/// Parses text; syntax errors report line and column.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::string& path);

/// Built-in presets: fig2, fig3, fig4, fig5b, fig5c, fig5d.
std::vector<std::string> preset_names();
ExperimentSpec preset(const std::string& name);

/// Applies a KEY=VALUE override. KEY is a dotted path into the schema
/// (`measurement.n_list`) or a leaf name that is unique within it
/// (`n_measurements`). VALUE is read as JSON when it parses, else as a
/// string.
ExperimentSpec apply_override(const ExperimentSpec& spec, const std::string& assignment);

}  // namespace qzd

#endif  // QZD_SPEC_HPP
