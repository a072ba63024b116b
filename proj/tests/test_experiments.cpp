#include "latentlab/experiments.hpp"

#include "doctest.h"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>

namespace expt = latentlab::experiments;
using nlohmann::json;

TEST_SUITE_BEGIN("experiments");

TEST_CASE("registry lists the eight experiments") {
  const auto names = expt::experiment_names();
  REQUIRE(names.size() == 8);
  CHECK(names[0] == "encoder-validity-linear");
  CHECK(names[1] == "encoder-validity-loglinear");
  CHECK(names[2] == "nn-separation-small-T");
  CHECK(names[3] == "nn-separation-large-T");
  CHECK(names[4] == "manifold-detect");
  CHECK(names[5] == "semisup-curve");
  CHECK(names[6] == "supervised-lower-bound");
  CHECK(names[7] == "oracle-fixtures");
  for (const auto& name : names) {
    CHECK(expt::is_experiment(name));
    CHECK(expt::default_config(name).contains("seed"));
  }
  CHECK(!expt::is_experiment("nope"));
  CHECK_THROWS_AS(expt::default_config("nope"), expt::ConfigError);
}

TEST_CASE("config validation reports field paths") {
  CHECK_THROWS_WITH_AS(expt::resolve_config("encoder-validity-linear", json{{"m", 50}}, true),
                       doctest::Contains("config.seed"), expt::ConfigError);
  CHECK_THROWS_WITH_AS(
      expt::resolve_config("encoder-validity-linear", json{{"seed", 1}, {"bogus", 2}}, true),
      doctest::Contains("config.bogus"), expt::ConfigError);
  CHECK_THROWS_WITH_AS(
      expt::resolve_config("encoder-validity-linear", json{{"seed", 1}, {"m", "many"}}, true),
      doctest::Contains("config.m"), expt::ConfigError);
  CHECK_THROWS_WITH_AS(
      expt::resolve_config("manifold-detect", json{{"seed", 1}, {"gsbm", json{{"zz", 1}}}}, true),
      doctest::Contains("config.gsbm.zz"), expt::ConfigError);
  const auto resolved =
      expt::resolve_config("encoder-validity-linear", json{{"seed", 5}, {"trials", 7}}, true);
  CHECK(resolved.at("trials") == 7);
  CHECK(resolved.at("m") == 200);  // default preserved
}

TEST_CASE("runs are deterministic across thread counts and seeds matter") {
  const json cfg = {{"seed", 99}, {"m", 40},          {"k", 4},
                    {"T", 16},    {"trials", 40},     {"sweep_trials", 30},
                    {"sweep_T", json::array({8, 16})}};
  const auto a = expt::run_experiment("encoder-validity-linear", cfg, 1);
  const auto b = expt::run_experiment("encoder-validity-linear", cfg, 3);
  CHECK(a.csv == b.csv);
  CHECK(a.summary.dump() == b.summary.dump());
  CHECK(a.run_id == b.run_id);

  json other = cfg;
  other["seed"] = 100;
  const auto c = expt::run_experiment("encoder-validity-linear", other, 1);
  CHECK(c.run_id != a.run_id);

  // an experiment whose rows are seed-sensitive
  const json sup = {{"seed", 1}, {"M", 4000}, {"k", 400}, {"t_train", 5}, {"queries", 50}};
  json sup2 = sup;
  sup2["seed"] = 2;
  CHECK(expt::run_experiment("supervised-lower-bound", sup, 1).csv !=
        expt::run_experiment("supervised-lower-bound", sup2, 1).csv);
}

TEST_CASE("summary embeds the resolved config and version string") {
  const json cfg = {{"seed", 12},
                    {"pmf", json{{"pairs", 2000}}},
                    {"posterior", json{{"encoder_trials", 200}}}};
  const auto result = expt::run_experiment("oracle-fixtures", cfg, 2);
  CHECK(result.summary.at("version") == expt::kVersion);
  CHECK(result.summary.at("experiment") == "oracle-fixtures");
  CHECK(result.summary.at("config").at("seed") == 12);
  CHECK(result.summary.at("config").at("pmf").at("pairs") == 2000);
  CHECK(result.summary.at("config").at("pmf").at("m") == 50);  // default
  CHECK(result.summary.at("run_id") == result.run_id);
  // fixtures payload is exported for the property suite
  CHECK(result.summary.at("results").at("fixtures").contains("overlap_pmf_same"));
}

TEST_CASE("run_and_write lays out results.csv and summary.json under the run id") {
  const auto root = std::filesystem::temp_directory_path() / "latentlab_runs";
  std::filesystem::remove_all(root);
  const json cfg = {{"seed", 31}, {"M", 4000}, {"k", 400}, {"t_train", 5}, {"queries", 50}};
  const auto dir = expt::run_and_write("supervised-lower-bound", cfg, root.string(), 2);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "results.csv"));
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "summary.json"));
  std::ifstream summary(std::filesystem::path(dir) / "summary.json");
  json parsed;
  summary >> parsed;
  CHECK(parsed.at("config").at("seed") == 31);
  // CSV header is the documented column set
  std::ifstream csv(std::filesystem::path(dir) / "results.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "query,truth,prediction");
  std::filesystem::remove_all(root);
}

TEST_CASE("every experiment runs on a reduced config") {
  const std::map<std::string, json> small = {
      {"encoder-validity-linear",
       {{"seed", 1}, {"m", 40}, {"k", 4}, {"T", 16}, {"trials", 20}, {"sweep_trials", 10},
        {"sweep_T", json::array({8, 16})}}},
      {"encoder-validity-loglinear",
       {{"seed", 2}, {"M", 500}, {"d", 10}, {"T", 20}, {"trials", 5},
        {"sweep_T", json::array({10, 20})}, {"z_latents", 5}}},
      {"nn-separation-small-T",
       {{"seed", 3}, {"m", 200}, {"T", 8}, {"N", 80}, {"runs", 3}, {"k_scan", 4},
        {"k_values", json::array({3, 6})}, {"pair_budget", 5000}}},
      {"nn-separation-large-T",
       {{"seed", 4}, {"M", 2000}, {"m", 100}, {"k", 5}, {"T", 30}, {"pairs", 30},
        {"train_users", 60}, {"queries", 20}}},
      {"manifold-detect",
       {{"seed", 5}, {"contiguity", json{{"m", 2500}, {"T", 5}, {"k", 6}}},
        {"violating", json{{"N", 80}}}, {"n_graphs", 50},
        {"gsbm", json{{"m", 400}, {"T", 8}, {"k", 4}, {"N", 150}}}}},
      {"semisup-curve",
       {{"seed", 6}, {"m", 30}, {"k", 6}, {"T", 10}, {"t_grid", json::array({5, 20})},
        {"n_test", 100}, {"hinge_budget", 20000}}},
      {"supervised-lower-bound",
       {{"seed", 7}, {"M", 5000}, {"k", 500}, {"t_train", 5}, {"queries", 100}}},
      {"oracle-fixtures",
       {{"seed", 8}, {"pmf", json{{"pairs", 1000}}}, {"posterior", json{{"encoder_trials", 200}}}}},
  };
  for (const auto& name : expt::experiment_names()) {
    CAPTURE(name);
    const auto result = expt::run_experiment(name, small.at(name), 2);
    CHECK(!result.csv.empty());
    CHECK(result.summary.contains("results"));
  }
}

TEST_SUITE_END();
