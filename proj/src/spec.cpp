#include "qzd/spec.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qzd/errors.hpp"

namespace qzd {

using nlohmann::json;

namespace {

// Walks one JSON object, checking types and recording which keys were
// consumed so that unknown keys can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_.empty() ? "document" : path_, "expected an object");
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    if (it == node_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json& required(const std::string& key) {
    const json* v = find(key);
    if (!v) fail(field(key), "missing required field");
    return *v;
  }

  double number(const std::string& key) { return as_number(required(key), field(key)); }
  double number_or(const std::string& key, double fallback) {
    const json* v = find(key);
    return v ? as_number(*v, field(key)) : fallback;
  }
  std::optional<double> optional_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_number(*v, field(key));
  }
  std::size_t count(const std::string& key) { return as_count(required(key), field(key)); }
  std::size_t count_or(const std::string& key, std::size_t fallback) {
    const json* v = find(key);
    return v ? as_count(*v, field(key)) : fallback;
  }
  std::string string(const std::string& key) {
    const json& v = required(key);
    if (!v.is_string()) fail(field(key), "expected a string");
    return v.get<std::string>();
  }
  std::string string_or(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) fail(field(key), "expected a string");
    return v->get<std::string>();
  }
  bool boolean_or(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(field(key), "expected true or false");
    return v->get<bool>();
  }
  std::vector<std::size_t> counts_or_empty(const std::string& key) {
    std::vector<std::size_t> out;
    const json* v = find(key);
    if (!v) return out;
    if (!v->is_array()) fail(field(key), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      out.push_back(as_count((*v)[i], field(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }
  std::vector<double> numbers_or_empty(const std::string& key) {
    std::vector<double> out;
    const json* v = find(key);
    if (!v) return out;
    if (!v->is_array()) fail(field(key), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      out.push_back(as_number((*v)[i], field(key) + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.contains(item.key())) fail(field(item.key()), "unknown field");
    }
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError("field '" + where + "': " + what);
  }

 private:
  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(where, "expected a finite number");
    return d;
  }
  static std::size_t as_count(const json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(where, "expected a non-negative integer");
    return v.get<std::size_t>();
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

HorizonMode horizon_from_string(const std::string& text) {
  if (text == "fixed") return HorizonMode::fixed;
  if (text == "analytic") return HorizonMode::analytic;
  if (text == "thermal") return HorizonMode::thermal;
  throw ConfigError("field 'measurement.horizon_mode': expected fixed, analytic or thermal, got '" + text + "'");
}

PotentialKind kind_from_string(const std::string& text) {
  if (text == "well") return PotentialKind::well;
  if (text == "barrier") return PotentialKind::barrier;
  throw ConfigError("field 'potential.kind': expected well or barrier, got '" + text + "'");
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::fig2: return "fig2";
    case Scheme::fig3: return "fig3";
    case Scheme::fig4: return "fig4";
    case Scheme::fig5b: return "fig5b";
    case Scheme::fig5c: return "fig5c";
    case Scheme::fig5d: return "fig5d";
    case Scheme::custom: return "custom";
  }
  return "custom";
}

Scheme scheme_from_string(const std::string& text) {
  for (Scheme s : {Scheme::fig2, Scheme::fig3, Scheme::fig4, Scheme::fig5b, Scheme::fig5c, Scheme::fig5d,
                   Scheme::custom}) {
    if (to_string(s) == text) return s;
  }
  throw ConfigError("field 'scheme': unknown scheme '" + text + "'");
}

std::string to_string(HorizonMode mode) {
  switch (mode) {
    case HorizonMode::fixed: return "fixed";
    case HorizonMode::analytic: return "analytic";
    case HorizonMode::thermal: return "thermal";
  }
  return "fixed";
}

std::string to_string(PotentialKind kind) { return kind == PotentialKind::well ? "well" : "barrier"; }

json to_json(const ExperimentSpec& spec) {
  json particles = json::array();
  for (const auto& p : spec.particles) {
    particles.push_back({{"name", p.name}, {"mass", p.mass}, {"extended", p.extended}});
  }
  const auto& m = spec.measurement;
  return {
      {"name", spec.name},
      {"scheme", to_string(spec.scheme)},
      {"output_dir", spec.output_dir},
      {"include_extended", spec.include_extended},
      {"grid", {{"x_min", spec.grid.x_min}, {"x_max", spec.grid.x_max}, {"n", spec.grid.n}}},
      {"potential",
       {{"shape", spec.potential.shape},
        {"kind", to_string(spec.potential.kind)},
        {"v0", spec.potential.v0},
        {"xp", spec.potential.xp},
        {"v0_mass_scaling", spec.potential.v0_mass_scaling}}},
      {"particles", particles},
      {"packet",
       {{"x0", spec.packet.x0},
        {"delta_x", optional_to_json(spec.packet.delta_x)},
        {"thermal_a", optional_to_json(spec.packet.thermal_a)}}},
      {"measurement",
       {{"delta_v", optional_to_json(m.delta_v)},
        {"horizon_mode", to_string(m.horizon_mode)},
        {"horizon", m.horizon},
        {"n_measurements", m.n_measurements},
        {"n_list", m.n_list},
        {"dt_list", m.dt_list},
        {"snapshot_n", m.snapshot_n},
        {"control_horizon", m.control_horizon},
        {"substep_tau", m.substep_tau},
        {"snapshot_stride", m.snapshot_stride},
        {"record_flux", m.record_flux},
        {"leak_tolerance", m.leak_tolerance}}},
  };
}

ExperimentSpec spec_from_json(const json& doc) {
  ExperimentSpec spec;
  ObjectReader top(doc, "");
  spec.name = top.string("name");
  spec.scheme = scheme_from_string(top.string_or("scheme", "custom"));
  spec.output_dir = top.string_or("output_dir", "runs");
  spec.include_extended = top.boolean_or("include_extended", false);

  {
    ObjectReader r(top.required("grid"), "grid");
    spec.grid.x_min = r.number("x_min");
    spec.grid.x_max = r.number("x_max");
    spec.grid.n = r.count("n");
    r.finish();
  }
  {
    ObjectReader r(top.required("potential"), "potential");
    spec.potential.shape = r.string_or("shape", "gaussian");
    if (spec.potential.shape != "gaussian") {
      ObjectReader::fail("potential.shape", "only \"gaussian\" is supported");
    }
    spec.potential.kind = kind_from_string(r.string("kind"));
    spec.potential.v0 = r.number("v0");
    spec.potential.xp = r.number("xp");
    spec.potential.v0_mass_scaling = r.boolean_or("v0_mass_scaling", false);
    if (!(spec.potential.v0 > 0)) ObjectReader::fail("potential.v0", "must be positive");
    if (!(spec.potential.xp > 0)) ObjectReader::fail("potential.xp", "must be positive");
    r.finish();
  }
  {
    const json& list = top.required("particles");
    if (!list.is_array() || list.empty()) ObjectReader::fail("particles", "expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      ObjectReader r(list[i], "particles[" + std::to_string(i) + "]");
      ParticleSpec p;
      p.name = r.string("name");
      p.mass = r.number("mass");
      p.extended = r.boolean_or("extended", false);
      if (!(p.mass > 0)) ObjectReader::fail(r.field("mass"), "must be positive");
      r.finish();
      spec.particles.push_back(p);
    }
  }
  {
    ObjectReader r(top.required("packet"), "packet");
    spec.packet.x0 = r.number("x0");
    spec.packet.delta_x = r.optional_number("delta_x");
    spec.packet.thermal_a = r.optional_number("thermal_a");
    if (spec.packet.delta_x.has_value() == spec.packet.thermal_a.has_value()) {
      ObjectReader::fail("packet", "exactly one of delta_x and thermal_a must be given");
    }
    if (spec.packet.thermal_a && !(*spec.packet.thermal_a > 0)) ObjectReader::fail("packet.thermal_a", "must be positive");
    if (spec.packet.delta_x && !(*spec.packet.delta_x > 0)) ObjectReader::fail("packet.delta_x", "must be positive");
    r.finish();
  }
  {
    ObjectReader r(top.required("measurement"), "measurement");
    auto& m = spec.measurement;
    m.delta_v = r.optional_number("delta_v");
    m.horizon_mode = horizon_from_string(r.string("horizon_mode"));
    m.horizon = r.number_or("horizon", m.horizon);
    m.n_measurements = r.count_or("n_measurements", m.n_measurements);
    m.n_list = r.counts_or_empty("n_list");
    m.dt_list = r.numbers_or_empty("dt_list");
    m.snapshot_n = r.counts_or_empty("snapshot_n");
    m.control_horizon = r.number_or("control_horizon", m.control_horizon);
    m.substep_tau = r.number_or("substep_tau", m.substep_tau);
    m.snapshot_stride = r.count_or("snapshot_stride", m.snapshot_stride);
    m.record_flux = r.boolean_or("record_flux", m.record_flux);
    m.leak_tolerance = r.number_or("leak_tolerance", m.leak_tolerance);
    if (!m.delta_v && !spec.packet.thermal_a) {
      ObjectReader::fail("measurement.delta_v", "missing required field (no packet.thermal_a to derive it from)");
    }
    if (m.delta_v && !(*m.delta_v > 0)) ObjectReader::fail("measurement.delta_v", "must be positive");
    if (m.horizon_mode == HorizonMode::thermal && !spec.packet.thermal_a) {
      ObjectReader::fail("measurement.horizon_mode", "thermal horizon needs packet.thermal_a");
    }
    if (!(m.horizon > 0)) ObjectReader::fail("measurement.horizon", "must be positive");
    if (!(m.substep_tau > 0)) ObjectReader::fail("measurement.substep_tau", "must be positive");
    for (double dt : m.dt_list) {
      if (!(dt > 0)) ObjectReader::fail("measurement.dt_list", "entries must be positive");
    }
    r.finish();
  }
  top.finish();
  return spec;
}

std::string serialize_spec(const ExperimentSpec& spec) { return to_json(spec).dump(2) + "\n"; }

ExperimentSpec parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
  return spec_from_json(doc);
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_spec(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4", "fig5b", "fig5c", "fig5d"}; }

ExperimentSpec preset(const std::string& name) {
  const double sqrt2 = std::sqrt(2.0);
  ExperimentSpec s;
  s.name = name;
  s.particles = {{"electron", 1.0, false}};
  s.packet.x0 = 30;
  s.packet.delta_x = sqrt2;
  s.measurement.delta_v = sqrt2;

  if (name == "fig2") {
    s.scheme = Scheme::fig2;
    s.measurement.horizon_mode = HorizonMode::fixed;
    s.measurement.horizon = 30;
    s.measurement.n_list = {16, 32, 64, 128, 256, 512, 1024, 2048};
    s.measurement.snapshot_n = {256, 1024};
    s.measurement.snapshot_stride = 10;
    return s;
  }
  if (name == "fig3") {
    s.scheme = Scheme::fig3;
    s.measurement.horizon_mode = HorizonMode::analytic;
    s.measurement.n_measurements = 1024;
    return s;
  }
  if (name == "fig4") {
    s.scheme = Scheme::fig4;
    s.measurement.horizon_mode = HorizonMode::analytic;
    s.measurement.n_measurements = 2048;
    return s;
  }
  if (name == "fig5b" || name == "fig5c" || name == "fig5d") {
    s.scheme = scheme_from_string(name);
    s.grid = {-4500, 4500, 32768};
    s.potential = {"gaussian", PotentialKind::well, 0.4396, 1000, name == "fig5b"};
    s.particles = {{"electron", 1.0, false},
                   {"muon", 206.767, false},
                   {"pion", 273.767, true},
                   {"proton", 1836.0, true}};
    s.packet = {1414.2, std::nullopt, 1.856e-3};
    s.measurement.delta_v = std::nullopt;
    s.measurement.horizon_mode = HorizonMode::thermal;
    s.measurement.substep_tau = 0.5;
    s.measurement.record_flux = false;
    if (name == "fig5d") {
      s.measurement.dt_list = {4, 2, 1};
    } else {
      s.measurement.n_list = {64, 128, 256, 512};
    }
    s.measurement.n_measurements = 512;
    return s;
  }
  throw ConfigError("unknown preset '" + name + "'");
}

namespace {

void collect_leaf_paths(const json& node, const std::string& prefix, std::vector<std::string>& out) {
  if (node.is_object()) {
    for (const auto& item : node.items()) {
      collect_leaf_paths(item.value(), prefix.empty() ? item.key() : prefix + "." + item.key(), out);
    }
  } else {
    out.push_back(prefix);
  }
}

}  // namespace

ExperimentSpec apply_override(const ExperimentSpec& spec, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("malformed override '" + assignment + "': expected KEY=VALUE");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json doc = to_json(spec);
  std::vector<std::string> leaves;
  collect_leaf_paths(doc, "", leaves);

  std::string path;
  if (key.find('.') != std::string::npos) {
    if (std::find(leaves.begin(), leaves.end(), key) == leaves.end()) {
      throw ConfigError("override '" + key + "' does not name a schema field");
    }
    path = key;
  } else {
    std::vector<std::string> matches;
    for (const auto& leaf : leaves) {
      const auto dot = leaf.rfind('.');
      if ((dot == std::string::npos ? leaf : leaf.substr(dot + 1)) == key) matches.push_back(leaf);
    }
    if (matches.empty()) throw ConfigError("override '" + key + "' does not name a schema field");
    if (matches.size() > 1) throw ConfigError("override '" + key + "' is ambiguous; use a dotted path");
    path = matches.front();
  }

  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json::json_pointer ptr("/" + [&] {
    std::string p = path;
    std::replace(p.begin(), p.end(), '.', '/');
    return p;
  }());
  doc[ptr] = value;
  try {
    return spec_from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError("override '" + assignment + "': " + e.what());
  }
}

}  // namespace qzd
