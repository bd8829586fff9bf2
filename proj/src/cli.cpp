#include "hausdorff/cli.hpp"

#include "hausdorff/scenario.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <optional>
#include <ostream>

namespace hausdorff {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hausdorff operator scenarios on R^n, SO(n) and spheres", "hausdorff-cli"};
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  bool verbose = false;
  bool list = false;
  app.add_option("scenario", config_path, "Scenario config (JSON)");
  app.add_option("-o,--out", out_dir, "Output directory (overrides the config)");
  app.add_option("-s,--seed", seed, "Seed override");
  app.add_option("-n,--samples", samples, "Override of the scenario's main sample count")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "Print check details");
  app.add_flag("--list", list, "List scenarios and their sample counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  if (list) {
    for (const std::string& name : scenario_names()) {
      out << name << " (main sample count: " << primary_sample_key(name) << ")";
      for (const auto& [key, value] : default_samples(name)) out << " " << key << "=" << value;
      out << "\n";
    }
    return kExitPass;
  }
  if (config_path.empty()) {
    err << "error: a scenario file is required\n";
    return kExitConfigError;
  }

  try {
    ScenarioConfig config = load_config(config_path);
    if (seed) config.seed = *seed;
    if (samples) config.samples[primary_sample_key(config.scenario)] = *samples;
    if (!out_dir.empty()) config.output = out_dir;
    if (config.output.empty()) config.output = "out/" + config.scenario;
    config = parse_config(to_json(config));

    const RunReport report = run_scenario(config);
    const std::vector<std::string> written = emit_report(report, config.output);

    for (const Check& c : report.checks) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name << "  residual=" << std::setprecision(6) << c.residual
          << " tolerance=" << c.tolerance << "\n";
      if (verbose) out << "  " << c.detail.dump() << "\n";
    }
    if (verbose)
      for (const std::string& path : written) out << "wrote " << path << "\n";
    out << report.config.scenario << ": " << (report.pass() ? "pass" : "FAIL") << " (" << report.checks.size()
        << " checks, " << std::setprecision(3) << report.seconds << " s) -> " << config.output << "\n";
    if (!report.pass()) {
      const auto failures = report.failures();
      err << failures.size() << " check(s) failed:";
      for (const std::string& f : failures) err << " " << f;
      err << "\n";
      return kExitCheckFailure;
    }
    return kExitPass;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace hausdorff
