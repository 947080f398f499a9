#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hwave/config.hpp"
#include "hwave/errors.hpp"
#include "hwave/experiments.hpp"

namespace {

struct Cli {
  std::string config;
  std::string out_dir = ".";
  unsigned threads = 0;  // 0: HWAVE_THREADS env, else hardware default
  std::optional<std::uint64_t> seed;
};

void add_common_options(CLI::App* sub, Cli& cli) {
  sub->add_option("--config", cli.config, "experiment configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out-dir", cli.out_dir, "directory for CSV/report products (default .)");
  sub->add_option("--threads", cli.threads, "worker threads (0 = HWAVE_THREADS or hardware)")
      ->check(CLI::Range(0u, 4096u));
  sub->add_option("--seed", cli.seed, "seed for randomized families (overrides config)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hwave: damped semilinear wave equation on the Heisenberg group"};
  app.set_version_flag("--version", "hwave 1.0.0");
  app.require_subcommand(1);

  Cli cli;
  add_common_options(app.add_subcommand("simulate", "run the solver, write series and snapshots"),
                     cli);
  add_common_options(app.add_subcommand("decay", "linear run (or CSV) plus log-log decay fits"),
                     cli);
  add_common_options(
      app.add_subcommand("sweep", "(p, amplitude) outcome table around the critical exponent"),
      cli);
  add_common_options(app.add_subcommand("inequality", "functional-inequality audit suites"), cli);
  add_common_options(
      app.add_subcommand("certificate", "test-function blow-up certificate quadrature"), cli);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // bad invocation is a configuration error
  }

  const std::string sub = app.get_subcommands().front()->get_name();

  // The subcommand must agree with the configured experiment; catching the
  // mismatch here beats failing halfway into a long run.
  try {
    const hwave::IniConfig cfg = hwave::IniConfig::parse_file(cli.config);
    const std::string name = cfg.get_string("experiment", "name");
    if (name != sub) {
      std::fprintf(stderr, "config error: [experiment] name '%s' does not match subcommand '%s'\n",
                   name.c_str(), sub.c_str());
      return 2;
    }
  } catch (const hwave::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  hwave::RunOptions opts;
  opts.out_dir = cli.out_dir;
  opts.threads = cli.threads;
  opts.seed = cli.seed;
  return hwave::run_experiment(cli.config, opts);
}
