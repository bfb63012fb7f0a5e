#include "mctslab/harness/runner.hpp"

#include <algorithm>
#include <atomic>
#include <boost/version.hpp>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "mctslab/stats.hpp"

#ifndef MCTSLAB_VERSION
#define MCTSLAB_VERSION "unknown"
#endif

namespace mctslab {

std::string library_version() { return MCTSLAB_VERSION; }

Config apply_overrides(Config cfg, const RunOverrides& o) {
  if (o.seed) cfg.set("run.seed", std::to_string(*o.seed));
  if (o.workers) cfg.set("run.workers", std::to_string(*o.workers));
  if (o.out) cfg.set("output.path", *o.out);
  return cfg;
}

std::vector<ExperimentRecord> run_records(const ExperimentConfig& ex) {
  struct Cell {
    std::size_t variant;
    std::size_t run;
    std::size_t budget;
  };
  std::vector<Cell> cells;
  for (std::size_t v = 0; v < ex.variants.size(); ++v) {
    for (std::size_t r = 0; r < ex.runs; ++r) {
      for (std::size_t b : ex.budgets) cells.push_back({v, r, b});
    }
  }
  std::vector<ExperimentRecord> out(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        const Cell& c = cells[i];
        out[i] = run_cell(ex.variants[c.variant], ex.seed, c.run, c.budget);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(cells.size());
        return;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(ex.workers, static_cast<int>(cells.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<Aggregate> aggregate(const std::vector<ExperimentRecord>& records) {
  std::vector<std::pair<std::string, std::size_t>> order;
  std::map<std::pair<std::string, std::size_t>, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.variant, r.budget);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  using Getter = double (*)(const ExperimentRecord&);
  const std::vector<std::pair<const char*, Getter>> metrics = {
      {"return", [](const ExperimentRecord& r) { return r.ret; }},
      {"success", [](const ExperimentRecord& r) { return r.success ? 1.0 : 0.0; }},
      {"eps_omega", [](const ExperimentRecord& r) { return r.eps_omega; }},
      {"eps_uct", [](const ExperimentRecord& r) { return r.eps_uct; }},
      {"regret", [](const ExperimentRecord& r) { return r.regret; }},
  };
  std::vector<Aggregate> out;
  for (const auto& key : order) {
    const auto& rows = groups[key];
    for (const auto& [name, get] : metrics) {
      std::vector<double> xs;
      for (const auto* r : rows) xs.push_back(get(*r));
      if (!std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); })) continue;
      Aggregate a;
      a.variant = key.first;
      a.budget = key.second;
      a.metric = name;
      a.runs = xs.size();
      a.mean = stats::mean(xs);
      a.two_std = 2.0 * stats::stddev(xs);
      a.std_err = stats::std_err(xs);
      out.push_back(a);
    }
  }
  return out;
}

std::string records_csv(const std::vector<ExperimentRecord>& records) {
  std::string s = std::string(kRecordHeader) + "\n";
  for (const auto& r : records) {
    s += r.variant + "," + r.config_hash + "," + std::to_string(r.run) + "," + std::to_string(r.seed) + "," +
         std::to_string(r.budget) + "," + format_double(r.ret) + "," + (r.success ? "1" : "0") + "," +
         format_double(r.eps_omega) + "," + format_double(r.eps_uct) + "," + format_double(r.regret) + "\n";
  }
  return s;
}

std::string aggregates_csv(const std::vector<Aggregate>& aggregates) {
  std::string s = std::string(kAggregateHeader) + "\n";
  for (const auto& a : aggregates) {
    s += a.variant + "," + std::to_string(a.budget) + "," + a.metric + "," + std::to_string(a.runs) + "," +
         format_double(a.mean) + "," + format_double(a.two_std) + "," + format_double(a.std_err) + "\n";
  }
  return s;
}

std::string timing_csv(const std::vector<ExperimentRecord>& records) {
  std::string s = "variant,run,budget,wall_ms\n";
  for (const auto& r : records) {
    s += r.variant + "," + std::to_string(r.run) + "," + std::to_string(r.budget) + "," + format_double(r.wall_ms) +
         "\n";
  }
  return s;
}

std::string meta_json(const ExperimentConfig& ex) {
  nlohmann::ordered_json j;
  Config hashed = ex.base;
  hashed.erase("output.path");
  hashed.erase("run.workers");
  j["config_hash"] = hashed.hash_hex();
  j["seed"] = ex.seed;
  j["runs"] = ex.runs;
  j["budgets"] = ex.budgets;
  nlohmann::ordered_json variants = nlohmann::ordered_json::array();
  for (const auto& v : ex.variants) {
    Config h = v.config;
    h.erase("output.path");
    h.erase("run.workers");
    variants.push_back({{"label", v.label}, {"config_hash", h.hash_hex()}});
  }
  j["variants"] = variants;
  j["columns"] = kRecordHeader;
  j["versions"] = {
      {"mctslab", library_version()},
      {"compiler", __VERSION__},
      {"cplusplus", __cplusplus},
      {"boost", BOOST_LIB_VERSION},
  };
  return j.dump(2) + "\n";
}

RunOutputs output_paths(const std::filesystem::path& csv) {
  std::filesystem::path stem = csv;
  if (stem.extension() == ".csv") stem.replace_extension();
  const std::string base = stem.string();
  return {csv, base + ".aggregate.csv", base + ".timing.csv", base + ".meta.json"};
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

}  // namespace

RunOutputs write_outputs(const ExperimentConfig& ex, const std::vector<ExperimentRecord>& records) {
  const RunOutputs paths = output_paths(ex.output);
  write_file(paths.csv, records_csv(records));
  write_file(paths.aggregate_csv, aggregates_csv(aggregate(records)));
  write_file(paths.timing_csv, timing_csv(records));
  write_file(paths.meta_json, meta_json(ex));
  return paths;
}

}  // namespace mctslab
