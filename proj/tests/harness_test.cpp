#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mctslab/harness/config.hpp"
#include "mctslab/harness/experiment.hpp"
#include "mctslab/harness/runner.hpp"
#include "mctslab/harness/verify.hpp"

using namespace mctslab;
namespace fs = std::filesystem;

namespace {

std::string what_of(const std::string& text) {
  try {
    build_experiment(Config::parse(text, "t.cfg"));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mctslab_harness_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

constexpr const char* kLake =
    "env.name = frozenlake\n"
    "search.budgets = 8, 32\n"
    "search.backup = power\n"
    "search.backup.p = 2.2\n"
    "run.count = 3\n"
    "run.seed = 17\n";

}  // namespace

TEST_CASE("config parsing") {
  const Config c = Config::parse("# comment\n a.b = 1.5 # trailing\n\nc = x, y ,z\nd = inf\n", "s");
  CHECK(c.get_double("a.b") == 1.5);
  CHECK(c.get_list("c") == std::vector<std::string>{"x", "y", "z"});
  CHECK(std::isinf(c.get_double("d")));
  CHECK(c.get_int("missing", 4) == 4);
  CHECK(c.canonical() == "a.b=1.5\nc=x, y ,z\nd=inf\n");
  CHECK(c.hash() == Config::parse("d = inf\nc = x, y ,z\na.b=1.5", "other").hash());

  CHECK_THROWS_AS(Config::parse("a = 1\na = 2"), ConfigError);
  CHECK_THROWS_AS(Config::parse("novalue"), ConfigError);
  CHECK_THROWS_AS(Config::parse("a ="), ConfigError);
  CHECK_THROWS_AS(Config::parse("a = x").get_double("a"), ConfigError);
  CHECK_THROWS_AS(Config::parse("a = 1.5").get_int("a"), ConfigError);
  CHECK_THROWS_AS(Config::parse("a = 1").get_string("b"), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/x.cfg"), ConfigError);
}

TEST_CASE("config diagnostics name the line and key") {
  CHECK(what_of("env.name = frozenlake\nsearch.budgets = 4\n\nsearch.gama = 0.9\n").find("t.cfg:4") !=
        std::string::npos);
  CHECK(what_of("env.name = frozenlake\nsearch.budgets = 4\n\nsearch.gama = 0.9\n").find("search.gama") !=
        std::string::npos);
  CHECK(what_of("env.name = lake\nsearch.budgets = 4\n").find("env.name") != std::string::npos);
  CHECK(what_of("env.name = frozenlake\nsearch.budgets = 8, 4\n").find("ascending") != std::string::npos);
  CHECK_FALSE(what_of("env.name = frozenlake\nsearch.budgets = 4\nsearch.gamma = 1.5\n").empty());
  CHECK_FALSE(what_of("env.name = frozenlake\nsearch.budgets = 4\nsearch.backup = power\nsearch.backup.p = 0.5\n")
                  .empty());
  CHECK_FALSE(what_of("env.name = frozenlake\nsearch.budgets = 4\nrun.count = 0\n").empty());
  CHECK_FALSE(what_of("env.name = frozenlake\nsearch.budgets = 4\nsweep.search.budgets = 1, 2\n").empty());
  CHECK_FALSE(what_of("env.name = frozenlake\nsearch.budgets = 4\nsearch.gamma = 0.9\nsweep.search.gamma = 1\n")
                  .empty());
  CHECK_FALSE(what_of("env.name = synthetic\nenv.k = 1\nsearch.budgets = 4\n").empty());
  CHECK_FALSE(what_of("env.name = rocksample\nenv.n = 2\nenv.k = 9\nsearch.budgets = 4\n").empty());
  CHECK(what_of(kLake).empty());
}

TEST_CASE("sweeps expand into variants") {
  const ExperimentConfig ex = build_experiment(Config::parse(
      "env.name = frozenlake\nsearch.budgets = 4\nsearch.backup = power\nsweep.search.backup.p = 1, 2.2, inf\n"
      "sweep.search.gamma = 0.9, 1\n"));
  REQUIRE(ex.variants.size() == 6);
  CHECK(ex.variants[0].label == "search.backup.p=1;search.gamma=0.9");
  CHECK(ex.variants[5].label == "search.backup.p=inf;search.gamma=1");
  CHECK(ex.variants[5].config.get_double("search.gamma") == 1.0);
  CHECK_FALSE(ex.variants[0].config.has("sweep.search.gamma"));
  const SearchConfig sc = search_config_from(ex.variants[4].config, 4, RewardRange{0.0, 1.0});
  CHECK(std::isinf(sc.backup.p));
  CHECK(sc.gamma == 0.9);
  CHECK(sc.n_simulations == 4);
  CHECK(build_experiment(Config::parse(kLake)).variants.size() == 1);
}

TEST_CASE("row accounting and determinism") {
  const ExperimentConfig ex = build_experiment(Config::parse(kLake));
  const auto records = run_records(ex);
  REQUIRE(records.size() == 6);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].run == i / 2);
    CHECK(records[i].budget == (i % 2 == 0 ? 8u : 32u));
    CHECK(records[i].seed == cell_seed(17, records[i].run, records[i].budget));
    CHECK(std::isnan(records[i].regret));
  }
  const std::string csv = records_csv(records);
  CHECK(split(csv, '\n').size() == 7);
  CHECK(split(csv, '\n')[0] == kRecordHeader);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(records_csv(run_records(ex)) == csv);

  ExperimentConfig parallel = ex;
  parallel.workers = 3;
  CHECK(records_csv(run_records(parallel)) == csv);

  const ExperimentRecord one = run_cell(ex.variants[0], ex.seed, 2, 32);
  CHECK(one.ret == records[5].ret);
  CHECK(one.success == records[5].success);
}

TEST_CASE("aggregates match a direct recomputation") {
  ExperimentConfig ex = build_experiment(Config::parse(
      "env.name = synthetic\nenv.k = 3\nenv.d = 2\nsearch.budgets = 16, 64\nsearch.policy = e3w\n"
      "search.e3w.regularizer = tsallis\nrun.count = 4\nrun.seed = 3\n"));
  const auto records = run_records(ex);
  const auto aggs = aggregate(records);
  std::map<std::pair<std::size_t, std::string>, std::vector<double>> cols;
  for (const auto& r : records) {
    cols[{r.budget, "return"}].push_back(r.ret);
    cols[{r.budget, "success"}].push_back(r.success ? 1.0 : 0.0);
    cols[{r.budget, "eps_omega"}].push_back(r.eps_omega);
    cols[{r.budget, "eps_uct"}].push_back(r.eps_uct);
    cols[{r.budget, "regret"}].push_back(r.regret);
  }
  CHECK(aggs.size() == cols.size());
  for (const auto& a : aggs) {
    const auto it = cols.find({a.budget, a.metric});
    REQUIRE(it != cols.end());
    const auto& xs = it->second;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    CHECK(a.runs == 4);
    CHECK(a.mean == doctest::Approx(m).epsilon(1e-12));
    CHECK(a.two_std == doctest::Approx(2.0 * sd).epsilon(1e-12));
    CHECK(a.std_err == doctest::Approx(sd / 2.0).epsilon(1e-12));
  }
  const std::string text = aggregates_csv(aggs);
  CHECK(split(text, '\n')[0] == kAggregateHeader);
  CHECK(split(text, '\n').size() == aggs.size() + 1);
}

TEST_CASE("synthetic trees cycle across runs") {
  const Config cfg = Config::parse("env.name = synthetic\nenv.k = 3\nenv.d = 2\nenv.trees = 5\nsearch.budgets = 4\n");
  const auto t0 = synthetic_tree_for_run(cfg, 9, 0);
  CHECK(synthetic_tree_for_run(cfg, 9, 5)->edge_values() == t0->edge_values());
  CHECK_FALSE(synthetic_tree_for_run(cfg, 9, 1)->edge_values() == t0->edge_values());
  CHECK_FALSE(synthetic_tree_for_run(cfg, 10, 0)->edge_values() == t0->edge_values());
}

TEST_CASE("outputs and overrides") {
  CHECK(output_paths("a/b.csv").aggregate_csv == fs::path("a/b.aggregate.csv"));
  CHECK(output_paths("a/b.csv").meta_json == fs::path("a/b.meta.json"));
  CHECK(output_paths("a/b.csv").timing_csv == fs::path("a/b.timing.csv"));

  const Config over = apply_overrides(Config::parse(kLake), {std::uint64_t{5}, 2, std::string("x.csv")});
  CHECK(over.get_uint("run.seed", 0) == 5);
  CHECK(over.get_int("run.workers") == 2);
  CHECK(over.get_string("output.path") == "x.csv");

  ExperimentConfig ex = build_experiment(Config::parse(kLake));
  ex.output = scratch("lake.csv").string();
  const auto records = run_records(ex);
  const RunOutputs out = write_outputs(ex, records);
  CHECK(slurp(out.csv) == records_csv(records));
  CHECK(slurp(out.aggregate_csv) == aggregates_csv(aggregate(records)));
  const std::string meta = slurp(out.meta_json);
  CHECK(meta.find(ex.base.hash_hex()) != std::string::npos);
  CHECK(meta.find(library_version()) != std::string::npos);

  // A regular file cannot be a parent directory.
  ex.output = (out.csv / "x.csv").string();
  CHECK_THROWS(write_outputs(ex, records));
}

TEST_CASE("verify suites") {
  CHECK(verify_suites().size() == 4);
  CHECK_THROWS_AS(verify_suite("nope", {}), std::invalid_argument);
  const VerifyReport ok = verify_suite("kernels", {});
  CHECK(ok.passed());
  VerifyOptions bad;
  bad.fault_tau = -1.0;
  const VerifyReport broken = verify_suite("regularizers", bad);
  CHECK_FALSE(broken.passed());
  bool bounded_failed = false;
  for (const auto& a : broken.assertions) bounded_failed |= a.name.find("bounded") != std::string::npos && !a.passed;
  CHECK(bounded_failed);
}

#ifdef MCTSLAB_CLI
namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(MCTSLAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("command line exit codes") {
  const fs::path good = scratch("cli.cfg");
  std::ofstream(good) << kLake << "output.path = " << scratch("cli.csv").string() << "\n";
  const fs::path bad = scratch("bad.cfg");
  std::ofstream(bad) << "env.name = frozenlake\nsearch.budgets = 4\nsearch.gama = 1\n";
  const fs::path swept = scratch("swept.cfg");
  std::ofstream(swept) << kLake << "sweep.search.gamma = 0.9, 1\noutput.path = " << scratch("sw.csv").string()
                       << "\n";

  CHECK(cli("run " + good.string()) == 0);
  const std::string first = slurp(scratch("cli.csv"));
  CHECK(cli("run " + good.string() + " --workers 2") == 0);
  CHECK(slurp(scratch("cli.csv")) == first);
  CHECK(cli("run " + good.string() + " --seed 4 --out " + scratch("s4.csv").string()) == 0);
  CHECK(fs::exists(scratch("s4.meta.json")));
  CHECK_FALSE(slurp(scratch("s4.csv")) == first);

  CHECK(cli("run " + bad.string()) == 2);
  CHECK(cli("run /nonexistent.cfg") == 2);
  CHECK(cli("run " + swept.string()) == 2);
  CHECK(cli("sweep " + swept.string()) == 0);
  CHECK(split(slurp(scratch("sw.csv")), '\n').size() == 13);
  CHECK(cli("run " + good.string() + " --workers 0") == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("verify nope") == 2);
  CHECK(cli("verify kernels --out " + scratch("k.json").string()) == 0);
  CHECK(slurp(scratch("k.json")).find("\"passed\": true") != std::string::npos);
  CHECK(cli("verify regularizers --fault-tau -1") == 1);
  CHECK(cli("run " + good.string() + " --out " + (good / "x.csv").string()) == 1);
}
#endif
