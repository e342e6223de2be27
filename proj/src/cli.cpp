#include <chrono>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "harness/error.hpp"
#include "harness/experiment.hpp"

namespace harness {

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BudgetExceeded:
    case ErrorKind::SeriesBudgetExceeded:
    case ErrorKind::WindowTooLarge:
    case ErrorKind::WindowTooSmall:
    case ErrorKind::TableTooSmall:
    case ErrorKind::TruncationTooCoarse:
    case ErrorKind::QuadratureFailure:
      return 2;
    default:
      return 1;
  }
}

void set_path(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::ConfigParse, "--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &root;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot - pos);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Harness process laboratory"};
  app.set_version_flag("--version", std::string(tool_version()));
  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  std::vector<std::string> sets;
  bool check = false;
  bool no_timing = false;
  app.add_option("experiment", experiment, "potential, covariance, pi0-sample, hydro, coupling, fluctuation, "
                                           "scaling, lclt or green-sum");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--set", sets, "override a config field, e.g. --set noise.variance=0");
  app.add_flag("--check", check, "exit 3 when an acceptance band fails");
  app.add_flag("--no-timing", no_timing, "write null elapsed times so reruns are byte-identical");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  json resolved;
  try {
    json file = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error(ErrorKind::ConfigParse, "cannot open config '" + config_path + "'");
      file = json::parse(in, nullptr, false);
      if (file.is_discarded()) throw Error(ErrorKind::ConfigParse, "'" + config_path + "' is not valid JSON");
    }
    json overrides = json::object();
    for (const auto& s : sets) set_path(overrides, s);
    if (!experiment.empty()) overrides["experiment"] = experiment;
    if (seed) overrides["seed"] = *seed;
    if (workers) overrides["workers"] = *workers;
    if (out_dir) overrides["out"] = *out_dir;
    resolved = resolve_config(file, overrides);

    const auto start = std::chrono::steady_clock::now();
    const ExperimentResult result = run_experiment(resolved);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_outputs(resolved, result, elapsed, {resolved.at("out").get<std::string>(), !no_timing});

    for (const auto& c : result.checks) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (" << c.band << ")\n";
    }
    out << resolved.at("experiment").get<std::string>() << ": wrote " << resolved.at("out").get<std::string>()
        << " in " << elapsed << " s\n";
    if (check && !result.all_pass()) return 3;
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    err << "error: ConfigParse: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace harness
