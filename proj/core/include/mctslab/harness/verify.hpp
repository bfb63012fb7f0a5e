#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mctslab {

struct Assertion {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<Assertion> assertions;

  bool passed() const;
  std::string to_json() const;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  /// Replaces every regularizer temperature in the regularizers suite.
  std::optional<double> fault_tau;
  /// Monte-Carlo trials per (p, n) cell of the concentration suite.
  std::size_t mc_trials = 1'000'000;
  /// Simulations per run in the MCTS part of oracle-equivalence.
  std::size_t mcts_simulations = 100'000;
  std::size_t mcts_runs = 25;
};

const std::vector<std::string>& verify_suites();

/// Runs a named suite. Throws std::invalid_argument for an unknown name.
VerifyReport verify_suite(const std::string& suite, const VerifyOptions& options);

VerifyReport verify_kernels(const VerifyOptions& options);
VerifyReport verify_regularizers(const VerifyOptions& options);
VerifyReport verify_concentration(const VerifyOptions& options);
VerifyReport verify_oracle_equivalence(const VerifyOptions& options);

}  // namespace mctslab
