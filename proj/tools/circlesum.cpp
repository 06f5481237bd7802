// circlesum: experiment harness for exponential sums over graded polynomial
// systems. Each subcommand reads a config file and writes <prefix>.csv plus
// a <prefix>.json manifest. See README.md for the config format.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "circlesum/runner.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::string> out_prefix;
  std::optional<unsigned> workers;
};

int run_command(const std::string& command, const CommonArgs& args) {
  using namespace circlesum;
  std::optional<unsigned> workers = args.workers;
  if (!workers.has_value()) {
    if (const char* env = std::getenv("CIRCLESUM_WORKERS")) {
      try {
        workers = static_cast<unsigned>(std::stoul(env));
      } catch (...) {
        std::cerr << "invalid CIRCLESUM_WORKERS value '" << env << "'\n";
        return 1;
      }
    }
  }
  try {
    KeyValueConfig cfg = KeyValueConfig::parse_file(args.config_path);
    ExperimentConfig ex =
        load_experiment(cfg, command, args.out_prefix, workers);
    std::string diagnostic;
    int status = run_experiment_status(ex, &diagnostic);
    if (status != 0) std::cerr << "error: " << diagnostic << "\n";
    return status;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exponential sums, rank-deficiency counts, and threshold "
               "constants for graded polynomial systems"};
  app.set_version_flag("--version", circlesum::kVersion);
  app.require_subcommand(1);

  std::vector<std::pair<std::string, std::string>> commands = {
      {"eval-sum", "evaluate the exponential sum at one frequency point"},
      {"scan-alpha", "evaluate |S| over a uniform frequency grid"},
      {"count-variety", "count rank-deficient tuples in growing boxes"},
      {"estimate-g", "fit the count power law and report the exponent"},
      {"compute-b1", "minimum support of a combination of the linear forms"},
      {"thresholds", "measure per-degree constants and threshold formulas"},
      {"verify-dichotomy", "classify grid points by the two alternatives"},
      {"singular-integral", "evaluate the unit-box oscillatory integral"},
      {"partial-summation-check", "residuals of the summation identity"},
  };

  std::map<std::string, CommonArgs> args;
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    CommonArgs& a = args[name];
    sub->add_option("--config", a.config_path, "config file path")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", a.out_prefix, "output file prefix");
    sub->add_option("--workers", a.workers, "worker thread count");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // exit statuses are pinned to {0, 1, 2}; fold CLI parse errors into 1
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (const auto& [name, desc] : commands)
    if (app.got_subcommand(name)) return run_command(name, args[name]);
  return 1;
}
