#include "qzd/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qzd/check.hpp"
#include "qzd/errors.hpp"
#include "qzd/experiments.hpp"
#include "qzd/persist.hpp"

namespace qzd {

namespace {

struct Options {
  std::string preset;
  std::string spec_path;
  std::string figure;
  std::string out;
  std::vector<std::string> overrides;
  std::size_t jobs = 0;
  bool quiet = false;
};

void add_spec_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--preset", o.preset, "Built-in preset (fig2, fig3, fig4, fig5b, fig5c, fig5d)");
  cmd->add_option("--spec", o.spec_path, "Experiment spec file (JSON)")->check(CLI::ExistingFile);
}

void add_common_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "Output root directory (default: the spec's output_dir)");
  cmd->add_option("--set", o.overrides, "KEY=VALUE override, repeatable")->allow_extra_args(false);
  cmd->add_option("--jobs", o.jobs, "Worker threads (default: available cores)")->check(CLI::PositiveNumber);
  cmd->add_flag("--quiet", o.quiet, "No progress output");
}

ExperimentSpec resolve_spec(const Options& o) {
  ExperimentSpec spec;
  if (!o.preset.empty() && !o.spec_path.empty()) throw ConfigError("give either --preset or --spec, not both");
  if (!o.preset.empty()) {
    spec = preset(o.preset);
  } else if (!o.spec_path.empty()) {
    spec = load_spec(o.spec_path);
  } else {
    throw ConfigError("a spec is required: --preset NAME or --spec FILE");
  }
  for (const auto& assignment : o.overrides) spec = apply_override(spec, assignment);
  return spec;
}

int check_command(std::ostream& out) {
  bool ok = true;
  for (const auto& c : run_invariant_checks()) {
    char line[160];
    std::snprintf(line, sizeof line, "%s  %-48s %.3e (tol %.0e)", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                  c.tolerance);
    out << line << '\n';
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum Zeno dynamics teleportation simulator"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Run one measurement sequence from a spec");
  add_spec_options(run, o);
  add_common_options(run, o);
  auto* sweep = app.add_subcommand("sweep", "Sweep the number of measurements over measurement.n_list");
  add_spec_options(sweep, o);
  add_common_options(sweep, o);
  auto* figure = app.add_subcommand("figure", "Run a figure experiment from its preset");
  figure->add_option("name", o.figure, "fig2, fig3, fig4, fig5b, fig5c or fig5d")->required();
  add_common_options(figure, o);
  auto* check = app.add_subcommand("check", "Run the fast numerical invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  if (check->parsed()) return check_command(out);

  try {
    ExperimentSpec spec;
    if (figure->parsed()) {
      o.preset = o.figure;
      spec = resolve_spec(o);
    } else {
      spec = resolve_spec(o);
    }
    const std::filesystem::path root = o.out.empty() ? std::filesystem::path(spec.output_dir) : std::filesystem::path(o.out);

    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw ConfigError("output directory '" + root.string() + "' is not writable: " + ec.message());

    RunnerOptions options;
    options.jobs = o.jobs ? o.jobs : std::max(1u, std::thread::hardware_concurrency());
    if (!o.quiet) options.log = [&err](const std::string& line) { err << line << '\n'; };

    ExperimentResult result;
    if (run->parsed()) {
      result = run_single(spec, options);
    } else if (sweep->parsed()) {
      result = run_sweep(spec, options);
    } else {
      result = run_experiment(spec, options);
    }
    const auto dir = persist(result, root);
    if (!o.quiet) err << "wrote " << dir.string() << '\n';
    return 0;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace qzd
