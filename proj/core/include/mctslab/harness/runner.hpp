#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mctslab/harness/experiment.hpp"

namespace mctslab {

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

/// Per (variant, budget, metric) summary over runs.
struct Aggregate {
  std::string variant;
  std::size_t budget = 0;
  std::string metric;
  std::size_t runs = 0;
  double mean = 0.0;
  double two_std = 0.0;
  double std_err = 0.0;
};

struct RunOutputs {
  std::filesystem::path csv;
  std::filesystem::path aggregate_csv;
  std::filesystem::path timing_csv;
  std::filesystem::path meta_json;
};

/// Column order of the raw CSV.
inline constexpr const char* kRecordHeader =
    "variant,config_hash,run,seed,budget,return,success,eps_omega,eps_uct,regret";
inline constexpr const char* kAggregateHeader = "variant,budget,metric,runs,mean,two_std,std_err";

/// Applies command-line overrides to a config.
Config apply_overrides(Config cfg, const RunOverrides& overrides);

/// Runs every (variant, run, budget) cell on `workers` threads. Records come
/// back in (variant, run, budget) order regardless of scheduling.
std::vector<ExperimentRecord> run_records(const ExperimentConfig& ex);

/// Aggregates over runs. A metric is reported only when it is finite in every
/// row of the group.
std::vector<Aggregate> aggregate(const std::vector<ExperimentRecord>& records);

std::string records_csv(const std::vector<ExperimentRecord>& records);
std::string aggregates_csv(const std::vector<Aggregate>& aggregates);
std::string timing_csv(const std::vector<ExperimentRecord>& records);
std::string meta_json(const ExperimentConfig& ex);

/// Sidecar paths derived from the CSV path: x.csv -> x.aggregate.csv,
/// x.timing.csv, x.meta.json.
RunOutputs output_paths(const std::filesystem::path& csv);

/// Writes the four output files. Throws std::runtime_error when a file
/// cannot be written.
RunOutputs write_outputs(const ExperimentConfig& ex, const std::vector<ExperimentRecord>& records);

std::string library_version();

}  // namespace mctslab
