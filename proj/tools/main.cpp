// mctslab command line: run and sweep experiments, run verification suites.
//
// Exit codes: 0 success, 1 failed assertion or invariant, 2 bad config or usage.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mctslab/errors.hpp"
#include "mctslab/harness/config.hpp"
#include "mctslab/harness/experiment.hpp"
#include "mctslab/harness/runner.hpp"
#include "mctslab/harness/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kAssertionFailure = 1;
constexpr int kConfigError = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Base seed (overrides run.seed)");
  cmd->add_option("--workers", c.workers, "Worker threads (overrides run.workers)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "Output CSV path (overrides output.path)");
}

int run_experiment(const std::string& path, const Common& c, bool allow_sweep) {
  mctslab::Config cfg = mctslab::Config::load(path);
  if (!allow_sweep && !cfg.keys_with_prefix("sweep.").empty()) {
    throw cfg.error(cfg.keys_with_prefix("sweep.").front(), "sweep axes need the 'sweep' subcommand");
  }
  cfg = mctslab::apply_overrides(std::move(cfg), {c.seed, c.workers, c.out});
  const mctslab::ExperimentConfig ex = mctslab::build_experiment(cfg);
  const auto records = mctslab::run_records(ex);
  const auto paths = mctslab::write_outputs(ex, records);
  std::fprintf(stderr, "%zu records written to %s\n", records.size(), paths.csv.string().c_str());
  return kOk;
}

int run_verify(const std::string& suite, const Common& c, std::optional<double> fault_tau) {
  mctslab::VerifyOptions options;
  if (c.seed) options.seed = *c.seed;
  options.fault_tau = fault_tau;
  const mctslab::VerifyReport report = mctslab::verify_suite(suite, options);
  for (const auto& a : report.assertions) {
    std::fprintf(stderr, "%s %s: %s\n", a.passed ? "PASS" : "FAIL", a.name.c_str(), a.detail.c_str());
  }
  const std::string json = report.to_json();
  if (c.out) {
    std::ofstream f(*c.out, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error(*c.out + ": cannot open for writing");
    f << json;
  } else {
    std::cout << json;
  }
  return report.passed() ? kOk : kAssertionFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo tree search experiments with power-mean and regularized backups"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, verify_opts;
  std::string run_config, sweep_config, suite;
  std::optional<double> fault_tau;

  auto* run = app.add_subcommand("run", "Run a single-variant experiment");
  run->add_option("config", run_config, "Config file")->required();
  add_common(run, run_opts);

  auto* sweep = app.add_subcommand("sweep", "Run every variant of the sweep.* axes");
  sweep->add_option("config", sweep_config, "Config file")->required();
  add_common(sweep, sweep_opts);

  auto* verify = app.add_subcommand("verify", "Run a verification suite and print a JSON report");
  verify->add_option("suite", suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(mctslab::verify_suites()));
  add_common(verify, verify_opts);
  verify->add_option("--fault-tau", fault_tau, "Force this temperature into the regularizer suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return run_experiment(run_config, run_opts, false);
    if (*sweep) return run_experiment(sweep_config, sweep_opts, true);
    return run_verify(suite, verify_opts, fault_tau);
  } catch (const mctslab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const mctslab::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kAssertionFailure;
  }
}
