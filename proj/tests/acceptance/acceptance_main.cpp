// Acceptance harness: runs the numbered acceptance checks end to end and
// prints one [PASS]/[FAIL] line per criterion with the measured quantities.
// Exit status is the number of failed criteria.

#include "latentlab/baselines.hpp"
#include "latentlab/core.hpp"
#include "latentlab/encoders.hpp"
#include "latentlab/experiments.hpp"
#include "latentlab/graph.hpp"
#include "latentlab/loglinear.hpp"
#include "latentlab/lp.hpp"
#include "latentlab/mixture.hpp"
#include "latentlab/oracle.hpp"
#include "latentlab/semisup.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <string>
#include <vector>

using namespace latentlab;
namespace expt = latentlab::experiments;
using nlohmann::json;

namespace {

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<bool(std::vector<std::string>&)> run;
};

std::string fmt(double v) { return expt::format_double(v); }

bool check(std::vector<std::string>& notes, const std::string& label, bool ok,
           const std::string& measured) {
  notes.push_back(std::string(ok ? "ok   " : "FAIL ") + label + ": " + measured);
  return ok;
}

int default_threads() { return default_thread_count(); }

// 1. pseudo-inverse correctness against tolerance and the exhaustive oracle
bool criterion1(std::vector<std::string>& notes) {
  bool ok = true;
  RngStream rng = derive_stream(4242, 0);
  double worst_residual = 0.0;
  int built = 0;
  while (built < 50) {
    const int m = 10 + static_cast<int>(rng.uniform_below(41));  // 10..50
    const int k = 2 + static_cast<int>(rng.uniform_below(9));    // 2..10
    Mat a(m, k);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) a(i, j) = rng.normal();
    Eigen::BDCSVD<Mat> svd(a);
    if (svd.singularValues()[k - 1] < 0.2) continue;
    const auto pinv = low_variance_pseudoinverse(a, 1e-6);
    worst_residual = std::max(worst_residual, pinv.residual);
    ++built;
  }
  ok &= check(notes, "50 random A residuals <= 1e-6", worst_residual <= 1e-6, fmt(worst_residual));

  const auto shared = make_shared_core(40, 6, 0.5, rng);
  const auto disjoint = make_disjoint_partition(60, 6, rng);
  const auto bounded = make_bounded_overlap(4000, 100, 10, 0.05, rng);
  double variant_residual = 0.0;
  for (const auto* s : {&shared, &disjoint, &bounded}) {
    const auto pinv = low_variance_pseudoinverse(movie_genre_matrix(*s), 1e-6);
    variant_residual = std::max(variant_residual, pinv.residual);
  }
  ok &= check(notes, "three variant matrices residuals <= 1e-6", variant_residual <= 1e-6,
              fmt(variant_residual));

  double worst_gap = 0.0;
  int instances = 0;
  while (instances < 12) {
    const int m = 2 + static_cast<int>(rng.uniform_below(5));  // 2..6
    const int k = 1 + static_cast<int>(rng.uniform_below(3));  // 1..3
    if (k > m) continue;
    Mat a(m, k);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) a(i, j) = rng.normal();
    Eigen::BDCSVD<Mat> svd(a);
    if (svd.singularValues()[k - 1] < 0.25) continue;
    for (int j = 0; j < k; ++j) {
      Vec e = Vec::Zero(k);
      e[j] = 1.0;
      const double lp = minimize_infnorm(a, e).objective;
      const double oracle_value = oracle::exhaustive_min_infnorm(a, j);
      worst_gap = std::max(worst_gap, std::abs(lp - oracle_value) / std::max(1.0, oracle_value));
    }
    ++instances;
  }
  ok &= check(notes, "lambda within 1e-6 of exhaustive-LP optimum (M<=6,k<=3)", worst_gap <= 1e-6,
              fmt(worst_gap));
  return ok;
}

// 2. linear encoder validity at the shared-core acceptance instance
bool criterion2(std::vector<std::string>& notes) {
  const auto result = expt::run_experiment("encoder-validity-linear", json::object(), default_threads());
  const auto& r = result.summary.at("results");
  bool ok = true;
  ok &= check(notes, "beta_hat >= 0.99 at eps = lambda sqrt(s/T), l1",
              r.at("beta_hat").get<double>() >= 0.99, fmt(r.at("beta_hat").get<double>()));
  bool medians_ok = true;
  std::string medians;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& point : r.at("sweep")) {
    const double med = point.at("median_error").get<double>();
    medians += (medians.empty() ? "" : " -> ") + fmt(med);
    if (med > prev + 1e-9) medians_ok = false;  // float-noise tolerance on exact-recovery zeros
    prev = med;
  }
  ok &= check(notes, "error median non-increasing over T in {25,100,400}", medians_ok, medians);
  ok &= check(notes, "pseudo-inverse residual <= 1e-6", r.at("residual").get<double>() <= 1e-6,
              fmt(r.at("residual").get<double>()));
  return ok;
}

// 3. overlap oracle agreement
bool criterion3(std::vector<std::string>& notes) {
  const auto result = expt::run_experiment("oracle-fixtures", json::object(), default_threads());
  const auto& r = result.summary.at("results");
  bool ok = true;
  ok &= check(notes, "Monte Carlo pmf within 3 binomial sigma (tau 0..3)",
              r.at("pmf_within_3sigma").get<bool>(),
              r.at("pmf_within_3sigma").get<bool>() ? "yes" : "no");
  ok &= check(notes, "closed form equals exhaustive enumeration at m <= 8",
              r.at("enumeration_equality").get<bool>(),
              r.at("enumeration_equality").get<bool>() ? "yes" : "no");
  return ok;
}

// 4. small-T nearest-neighbor failure
bool criterion4(std::vector<std::string>& notes) {
  const auto result = expt::run_experiment("nn-separation-small-T", json::object(), default_threads());
  const auto& r = result.summary.at("results");
  bool ok = true;
  ok &= check(notes, "max pairwise overlap <= 30 in >= 99/100 runs",
              r.at("runs_ok").get<int>() >= 99,
              std::to_string(r.at("runs_ok").get<int>()) + "/100, worst " +
                  std::to_string(r.at("max_overlap_worst").get<int>()));
  bool ratios_ok = true;
  std::string shown;
  for (const auto& item : r.at("ratios")) {
    const double k = item.at("k").get<double>();
    const double ratio = item.at("ratio_tau1").get<double>();
    if (ratio < k / 4.0) ratios_ok = false;
    shown += "k=" + fmt(k) + ":" + fmt(ratio) + " ";
  }
  ok &= check(notes, "posterior ratio >= k/4 for k in {10,20,40}", ratios_ok, shown);
  ok &= check(notes, "ratio strictly increasing in k", r.at("ratio_increasing").get<bool>(),
              r.at("ratio_increasing").get<bool>() ? "yes" : "no");
  return ok;
}

// 5. large-T nearest-neighbor success
bool criterion5(std::vector<std::string>& notes) {
  const auto result = expt::run_experiment("nn-separation-large-T", json::object(), default_threads());
  const auto& r = result.summary.at("results");
  bool ok = true;
  ok &= check(notes, "same-set overlap >= 0.8 (1/s) T^2/m in >= 95% of pairs",
              r.at("same_frac").get<double>() >= 0.95,
              fmt(r.at("same_frac").get<double>()) + " (floor " +
                  fmt(r.at("same_floor").get<double>()) + ")");
  ok &= check(notes, "diff-set overlap <= 1.2 (1/s - 1/s^2) T^2/m in >= 95% of pairs",
              r.at("diff_frac").get<double>() >= 0.95,
              fmt(r.at("diff_frac").get<double>()) + " (ceiling " +
                  fmt(r.at("diff_ceiling").get<double>()) + ")");
  ok &= check(notes, "knn movie-task accuracy >= 0.9 on 500 queries",
              r.at("knn_accuracy").get<double>() >= 0.9, fmt(r.at("knn_accuracy").get<double>()));
  return ok;
}

// 6. log-linear encoder behavior
bool criterion6(std::vector<std::string>& notes) {
  const auto result =
      expt::run_experiment("encoder-validity-loglinear", json::object(), default_threads());
  const auto& r = result.summary.at("results");
  bool ok = true;
  ok &= check(notes, "mean <f(x), h> >= 0.8 at T = 500", r.at("mean_cosine").get<double>() >= 0.8,
              fmt(r.at("mean_cosine").get<double>()));
  bool increasing = true;
  double prev = -1.0;
  std::string shown;
  for (const auto& point : r.at("cosine_by_T")) {
    const double c = point.at("mean_cosine").get<double>();
    if (c <= prev) increasing = false;
    prev = c;
    shown += "T=" + std::to_string(point.at("T").get<int>()) + ":" + fmt(c) + " ";
  }
  ok &= check(notes, "mean cosine increasing over T in {50,500,5000}", increasing, shown);
  const double signal = r.at("signal_mean_per_draw").get<double>();
  const double target = r.at("signal_target").get<double>();
  ok &= check(notes, "per-draw signal within 15% of B^2/(4d)",
              std::abs(signal - target) <= 0.15 * target, fmt(signal) + " vs " + fmt(target));
  ok &= check(notes, "Z within 2% of M exp(B^2/(8d)) for every tested latent",
              r.at("z").at("frac_within").get<double>() == 1.0,
              "max dev " + fmt(r.at("z").at("max_dev").get<double>()));
  return ok;
}

// 7. manifold separation
bool criterion7(std::vector<std::string>& notes) {
  const auto result = expt::run_experiment("manifold-detect", json::object(), default_threads());
  const auto& r = result.summary.at("results");
  const auto& c = r.at("contiguity");
  const auto& v = r.at("violating");
  const auto& g = r.at("gsbm");
  bool ok = true;
  ok &= check(notes, "contiguity regime holds with >= 4x margin",
              c.at("holds").get<bool>() && c.at("margin").get<double>() >= 4.0,
              "margin " + fmt(c.at("margin").get<double>()));
  ok &= check(notes, "contiguity combined AUC <= 0.65 over 200 graphs/class",
              c.at("combined_auc").get<double>() <= 0.65, fmt(c.at("combined_auc").get<double>()));
  ok &= check(notes, "violating regime (k=2) broken by >= 4x",
              !v.at("holds").get<bool>() && v.at("margin").get<double>() >= 4.0,
              "margin " + fmt(v.at("margin").get<double>()));
  ok &= check(notes, "violating combined AUC >= 0.9", v.at("combined_auc").get<double>() >= 0.9,
              fmt(v.at("combined_auc").get<double>()));
  ok &= check(notes, "nn-graph block frequencies conform to a/b with 3-sigma slack",
              g.at("conforms").get<bool>(),
              "max_in " + fmt(g.at("max_in_prob").get<double>()) + " vs a " +
                  fmt(g.at("a").get<double>()) + ", min_out " +
                  fmt(g.at("min_out_prob").get<double>()) + " vs b " + fmt(g.at("b").get<double>()));
  return ok;
}

// 8. semi-supervised separation
bool criterion8(std::vector<std::string>& notes) {
  const auto curve_result = expt::run_experiment("semisup-curve", json::object(), default_threads());
  const auto& c = curve_result.summary.at("results");
  bool ok = true;
  ok &= check(notes, "encoder pipeline test error <= 0.05 at t = 200",
              c.at("final_test_error").get<double>() <= 0.05,
              fmt(c.at("final_test_error").get<double>()));
  ok &= check(notes, "measured error <= C_t + R_t + E_t at every grid t",
              c.at("bound_respected").get<bool>(), c.at("bound_respected").get<bool>() ? "yes" : "no");
  const auto base_result =
      expt::run_experiment("supervised-lower-bound", json::object(), default_threads());
  const auto& b = base_result.summary.at("results");
  ok &= check(notes, "supervised baseline accuracy <= 0.55 (bound 1/2 + O(stT^2/k))",
              b.at("accuracy").get<double>() <= 0.55,
              fmt(b.at("accuracy").get<double>()) + " (nominal " +
                  fmt(b.at("nominal_bound").get<double>()) + ")");
  return ok;
}

// 9. posterior concentration
bool criterion9(std::vector<std::string>& notes) {
  const auto result = expt::run_experiment("oracle-fixtures", json::object(), default_threads());
  const auto& p = result.summary.at("results").at("posterior");
  const double beta_hat = p.at("beta_hat").get<double>();
  const double delta = p.at("delta").get<double>();
  const double fraction = p.at("fraction_good").get<double>();
  return check(notes, "fraction of x with concentrated posterior >= 1 - delta",
               p.at("ok").get<bool>(),
               "fraction " + fmt(fraction) + ", 1-delta " + fmt(1.0 - delta) + ", beta_hat " +
                   fmt(beta_hat));
}

// 10. byte-identical CSVs across 1/4/8 worker threads for every experiment
bool criterion10(std::vector<std::string>& notes) {
  const std::map<std::string, json> small_configs = {
      {"encoder-validity-linear",
       json{{"seed", 7001},
            {"m", 60},
            {"k", 8},
            {"T", 24},
            {"trials", 60},
            {"sweep_trials", 60},
            {"sweep_T", json::array({12, 24})}}},
      {"encoder-validity-loglinear",
       json{{"seed", 7002},
            {"M", 2000},
            {"d", 25},
            {"T", 50},
            {"trials", 10},
            {"sweep_T", json::array({10, 50})},
            {"z_latents", 10}}},
      {"nn-separation-small-T",
       json{{"seed", 7003},
            {"m", 400},
            {"T", 10},
            {"N", 150},
            {"runs", 5},
            {"k_scan", 6},
            {"k_values", json::array({4, 8})},
            {"pair_budget", 20000}}},
      {"nn-separation-large-T",
       json{{"seed", 7004},
            {"M", 3000},
            {"m", 120},
            {"k", 6},
            {"T", 40},
            {"pairs", 60},
            {"train_users", 150},
            {"queries", 40}}},
      {"manifold-detect",
       json{{"seed", 7005},
            {"contiguity", json{{"m", 3600}, {"T", 6}, {"k", 8}}},
            {"violating", json{{"N", 120}}},
            {"n_graphs", 50},
            {"gsbm", json{{"m", 900}, {"T", 12}, {"k", 5}, {"N", 250}}}}},
      {"semisup-curve",
       json{{"seed", 7006},
            {"m", 40},
            {"k", 8},
            {"T", 12},
            {"t_grid", json::array({10, 30})},
            {"n_test", 200},
            {"hinge_budget", 50000}}},
      {"supervised-lower-bound",
       json{{"seed", 7007}, {"M", 20000}, {"k", 2000}, {"t_train", 10}, {"queries", 300}}},
      {"oracle-fixtures",
       json{{"seed", 7008},
            {"pmf", json{{"pairs", 5000}}},
            {"posterior", json{{"encoder_trials", 500}}}}},
  };
  bool ok = true;
  for (const auto& name : expt::experiment_names()) {
    const auto& cfg = small_configs.at(name);
    const auto r1 = expt::run_experiment(name, cfg, 1);
    const auto r4 = expt::run_experiment(name, cfg, 4);
    const auto r8 = expt::run_experiment(name, cfg, 8);
    const bool same = r1.csv == r4.csv && r1.csv == r8.csv &&
                      r1.summary.dump() == r4.summary.dump() &&
                      r1.summary.dump() == r8.summary.dump();
    ok &= check(notes, name + " byte-identical across 1/4/8 threads", same, same ? "yes" : "no");
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  const std::vector<Criterion> criteria = {
      {1, "pseudo-inverse correctness", 60, criterion1},
      {2, "linear encoder validity", 120, criterion2},
      {3, "overlap oracle agreement", 60, criterion3},
      {4, "small-T nearest-neighbor failure", 300, criterion4},
      {5, "large-T nearest-neighbor success", 300, criterion5},
      {6, "log-linear encoder", 600, criterion6},
      {7, "manifold separation", 600, criterion7},
      {8, "semi-supervised separation", 600, criterion8},
      {9, "posterior concentration", 60, criterion9},
      {10, "determinism across thread counts", 600, criterion10},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    std::vector<std::string> notes;
    bool pass = false;
    double elapsed = 0.0;
    try {
      const auto start = std::chrono::steady_clock::now();
      pass = criterion.run(notes);
      elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (elapsed > criterion.budget_seconds) {
        pass = false;
        notes.push_back("FAIL runtime budget: " + fmt(elapsed) + "s > " +
                        fmt(criterion.budget_seconds) + "s");
      }
    } catch (const std::exception& e) {
      pass = false;
      notes.push_back(std::string("FAIL exception: ") + e.what());
    }
    std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion.id,
                criterion.name.c_str(), elapsed);
    for (const auto& note : notes) std::printf("    %s\n", note.c_str());
    if (!pass) ++failures;
  }
  return failures;
}
