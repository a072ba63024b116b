#include "latentlab/experiments.hpp"

#include "latentlab/baselines.hpp"
#include "latentlab/core.hpp"
#include "latentlab/encoders.hpp"
#include "latentlab/graph.hpp"
#include "latentlab/loglinear.hpp"
#include "latentlab/mixture.hpp"
#include "latentlab/oracle.hpp"
#include "latentlab/semisup.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>

namespace latentlab::experiments {

using nlohmann::json;

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buffer, ptr);
}

namespace {

constexpr std::uint64_t stream_id(std::uint64_t phase, std::uint64_t index) {
  return (phase << 40) | index;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out += ',';
      out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += row[i];
      }
      out += '\n';
    }
    return out;
  }
};

std::string fmt_u(std::uint64_t v) { return std::to_string(v); }
std::string fmt_i(std::int64_t v) { return std::to_string(v); }

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

json merge_config(const json& defaults, const json& user, const std::string& path) {
  if (defaults.is_object()) {
    if (!user.is_object()) throw ConfigError(path + ": expected an object");
    json out = defaults;
    for (const auto& [key, value] : user.items()) {
      if (!defaults.contains(key)) throw ConfigError(path + "." + key + ": unknown field");
      out[key] = merge_config(defaults.at(key), value, path + "." + key);
    }
    return out;
  }
  if (defaults.is_array()) {
    if (!user.is_array()) throw ConfigError(path + ": expected an array");
    return user;
  }
  if (defaults.is_number_integer() && !user.is_number_integer())
    throw ConfigError(path + ": expected an integer");
  if (defaults.is_number() && !user.is_number()) throw ConfigError(path + ": expected a number");
  if (defaults.is_string() && !user.is_string()) throw ConfigError(path + ": expected a string");
  if (defaults.is_boolean() && !user.is_boolean()) throw ConfigError(path + ": expected a boolean");
  return user;
}

Vec alternating_hyperplane(std::uint32_t k) {
  if (k % 2 != 0) throw ConfigError("config.k: alternating labels need an even genre count");
  Vec w(k);
  for (std::uint32_t i = 0; i < k; ++i) w[i] = (i % 2 == 0) ? 1.0 : -1.0;
  return w;
}

// ---------------------------------------------------------------------------
// encoder-validity-linear
// ---------------------------------------------------------------------------

json linear_defaults() {
  return json{{"seed", 20240601},
              {"m", 200},
              {"k", 20},
              {"p", 0.5},
              {"s", 1},
              {"T", 100},
              {"trials", 1000},
              {"sweep_T", json::array({25, 100, 400})},
              {"sweep_trials", 1000},
              {"sweep_s", 1}};
}

RunResult run_linear(const json& cfg, int threads) {
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const auto k = cfg.at("k").get<std::uint32_t>();
  const auto s = cfg.at("s").get<std::uint32_t>();
  const auto T = cfg.at("T").get<std::uint32_t>();

  RngStream struct_rng = derive_stream(seed, stream_id(1, 0));
  const auto structure = make_shared_core(cfg.at("m").get<std::uint32_t>(), k,
                                          cfg.at("p").get<double>(), struct_rng);
  const auto pinv = low_variance_pseudoinverse(movie_genre_matrix(structure));

  MixtureModel model;
  model.structure = structure;
  model.genres_per_user = s;
  model.ratings_per_user = T;
  model.validate();

  const double epsilon = pinv.lambda * std::sqrt(static_cast<double>(s) / T);
  const double tau = 2.0 * pinv.lambda * std::sqrt(std::log(static_cast<double>(k)) / T);
  const auto trial = [&](RngStream& rng) {
    const auto user = sample_user(k, s, rng);
    const auto x = emit(model, user, rng);
    return std::make_pair(linear_encode(pinv, x).h_est, user.simplex());
  };
  const auto report = measure_encoder(trial, cfg.at("trials").get<int>(), epsilon, Norm::L1, seed,
                                      stream_id(2, 0), threads);

  const auto sweep_T = cfg.at("sweep_T").get<std::vector<std::uint32_t>>();
  const auto sweep_trials = cfg.at("sweep_trials").get<int>();
  const auto sweep_s = cfg.at("sweep_s").get<std::uint32_t>();
  const std::uint32_t t_max = *std::max_element(sweep_T.begin(), sweep_T.end());
  std::vector<std::vector<double>> sweep_err(sweep_T.size(), std::vector<double>(sweep_trials));
  parallel_for(static_cast<std::size_t>(sweep_trials), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(seed, stream_id(3, i));
    const auto user = sample_user(k, sweep_s, rng);
    const auto draws = independent_draw_sequence(structure, user, user.simplex(), t_max, rng);
    for (std::size_t ti = 0; ti < sweep_T.size(); ++ti) {
      RatingSample x;
      x.mode = ReplacementMode::Multiset;
      x.movie_ids.assign(draws.begin(), draws.begin() + sweep_T[ti]);
      std::sort(x.movie_ids.begin(), x.movie_ids.end());
      sweep_err[ti][i] = norm_error(linear_encode(pinv, x).h_est, user.simplex(), Norm::L1);
    }
  });

  Csv csv;
  csv.header = {"phase", "T", "trial", "error"};
  for (int i = 0; i < report.trials; ++i)
    csv.rows.push_back({"validity", fmt_u(T), fmt_i(i), format_double(report.errors[i])});
  for (std::size_t ti = 0; ti < sweep_T.size(); ++ti)
    for (int i = 0; i < sweep_trials; ++i)
      csv.rows.push_back({"sweep", fmt_u(sweep_T[ti]), fmt_i(i), format_double(sweep_err[ti][i])});

  json sweep_summary = json::array();
  for (std::size_t ti = 0; ti < sweep_T.size(); ++ti)
    sweep_summary.push_back(json{{"T", sweep_T[ti]},
                                 {"mean_error", mean_of(sweep_err[ti])},
                                 {"median_error", median_of(sweep_err[ti])}});
  RunResult out;
  out.summary = json{{"lambda", pinv.lambda},
                     {"residual", pinv.residual},
                     {"tau", tau},
                     {"epsilon", epsilon},
                     {"beta_hat", report.success_prob},
                     {"successes", report.successes},
                     {"trials", report.trials},
                     {"err_q50", report.err_q50},
                     {"err_q90", report.err_q90},
                     {"err_q99", report.err_q99},
                     {"sweep", sweep_summary},
                     {"structure_hash", structure_hash(structure)}};
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// encoder-validity-loglinear
// ---------------------------------------------------------------------------

json loglinear_defaults() {
  return json{{"seed", 20240602},
              {"M", 50000},
              {"d", 100},
              {"B", 2.0},
              {"T", 500},
              {"trials", 50},
              {"sweep_T", json::array({50, 500, 5000})},
              {"z_latents", 50},
              {"z_epsilon", 0.02}};
}

RunResult run_loglinear(const json& cfg, int threads) {
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const auto m = cfg.at("M").get<std::uint32_t>();
  const auto d = cfg.at("d").get<std::uint32_t>();
  const auto b = cfg.at("B").get<double>();
  const auto T = cfg.at("T").get<std::uint32_t>();
  const int trials = cfg.at("trials").get<int>();
  auto sweep_T = cfg.at("sweep_T").get<std::vector<std::uint32_t>>();
  if (std::find(sweep_T.begin(), sweep_T.end(), T) == sweep_T.end()) sweep_T.push_back(T);
  std::sort(sweep_T.begin(), sweep_T.end());
  const std::uint32_t t_max = sweep_T.back();

  RngStream w_rng = derive_stream(seed, stream_id(1, 0));
  const auto vectors = sample_movie_vectors(m, d, b, w_rng);

  struct TrialRow {
    std::uint32_t T;
    double cosine, signal_sum, offaxis_max_sq;
  };
  std::vector<std::vector<TrialRow>> rows(trials);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(seed, stream_id(2, i));
    const Vec h = sample_sphere_latent(d, rng);
    const auto draws = loglinear_draw_sequence(vectors, h, t_max, rng);
    const Mat basis = oracle::householder_basis(h);
    Vec acc = Vec::Zero(d);
    std::size_t consumed = 0;
    for (const std::uint32_t t : sweep_T) {
      for (; consumed < t; ++consumed) acc += vectors.W.row(draws[consumed]).transpose();
      const Vec coords = basis.transpose() * acc;
      TrialRow row;
      row.T = t;
      row.cosine = h.dot(acc) / acc.norm();
      row.signal_sum = h.dot(acc);
      row.offaxis_max_sq = coords.tail(d - 1).cwiseAbs2().maxCoeff();
      rows[i].push_back(row);
    }
  });

  RngStream z_rng = derive_stream(seed, stream_id(3, 0));
  const auto z_report = z_concentration_report(vectors, cfg.at("z_latents").get<int>(),
                                               cfg.at("z_epsilon").get<double>(), z_rng);

  Csv csv;
  csv.header = {"trial", "T", "cosine", "signal_sum", "offaxis_max_sq"};
  for (int i = 0; i < trials; ++i)
    for (const auto& row : rows[i])
      csv.rows.push_back({fmt_i(i), fmt_u(row.T), format_double(row.cosine),
                          format_double(row.signal_sum), format_double(row.offaxis_max_sq)});

  json cos_by_T = json::array();
  for (const std::uint32_t t : sweep_T) {
    std::vector<double> cosines;
    for (int i = 0; i < trials; ++i)
      for (const auto& row : rows[i])
        if (row.T == t) cosines.push_back(row.cosine);
    cos_by_T.push_back(json{{"T", t}, {"mean_cosine", mean_of(cosines)}});
  }
  std::vector<double> signal, offaxis, cos_main;
  for (int i = 0; i < trials; ++i)
    for (const auto& row : rows[i])
      if (row.T == T) {
        signal.push_back(row.signal_sum / T);
        offaxis.push_back(row.offaxis_max_sq);
        cos_main.push_back(row.cosine);
      }

  int offaxis_within = 0;
  const double offaxis_bound = 20.0 * static_cast<double>(T) * T / (static_cast<double>(m) * d);
  for (double v : offaxis)
    if (v <= offaxis_bound) ++offaxis_within;

  RunResult out;
  out.summary = json{{"mean_cosine", mean_of(cos_main)},
                     {"cosine_by_T", cos_by_T},
                     {"signal_mean_per_draw", mean_of(signal)},
                     {"signal_target", b * b / (4.0 * d)},
                     {"offaxis_bound", offaxis_bound},
                     {"offaxis_within_bound_frac",
                      static_cast<double>(offaxis_within) / std::max<std::size_t>(1, offaxis.size())},
                     {"z", json{{"mean_ratio", z_report.mean_ratio},
                                {"max_dev", z_report.max_dev},
                                {"frac_within", z_report.frac_within},
                                {"epsilon", z_report.epsilon}}}};
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// nn-separation-small-T
// ---------------------------------------------------------------------------

json small_t_defaults() {
  return json{{"seed", 20240603},
              {"m", 10000},
              {"p", 0.5},
              {"T", 40},
              {"N", 2000},
              {"k_scan", 20},
              {"runs", 100},
              {"overlap_cap", 30},
              {"k_values", json::array({10, 20, 40})},
              {"pair_budget", 4000000}};
}

RunResult run_small_t(const json& cfg, int threads) {
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const auto m = cfg.at("m").get<std::uint32_t>();
  const auto p = cfg.at("p").get<double>();
  const auto T = cfg.at("T").get<std::uint32_t>();
  const auto n = cfg.at("N").get<std::uint32_t>();
  const int runs = cfg.at("runs").get<int>();
  const auto cap = cfg.at("overlap_cap").get<std::uint32_t>();

  std::vector<std::uint32_t> max_overlaps(runs);
  const auto k_scan = cfg.at("k_scan").get<std::uint32_t>();
  parallel_for(static_cast<std::size_t>(runs), threads, [&](std::size_t r) {
    RngStream rng = derive_stream(seed, stream_id(2, r));
    const auto structure = make_shared_core(m, k_scan, p, rng);
    MixtureModel model;
    model.structure = structure;
    model.genres_per_user = 1;
    model.ratings_per_user = T;
    std::vector<RatingSample> users;
    users.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i)
      users.push_back(emit(model, sample_user(k_scan, 1, rng), rng));
    max_overlaps[r] = max_pairwise_overlap(users);
  });
  int runs_ok = 0;
  for (std::uint32_t v : max_overlaps)
    if (v <= cap) ++runs_ok;

  const auto k_values = cfg.at("k_values").get<std::vector<std::uint32_t>>();
  std::vector<double> ratios(k_values.size());
  parallel_for(k_values.size(), threads, [&](std::size_t ki) {
    RngStream rng = derive_stream(seed, stream_id(3, ki));
    const std::uint32_t k = k_values[ki];
    const auto structure = make_shared_core(m, k, p, rng);
    MixtureModel model;
    model.structure = structure;
    model.genres_per_user = 1;
    model.ratings_per_user = T;
    std::vector<UserRecord> users;
    users.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto u = sample_user(k, 1, rng);
      users.push_back({emit(model, u, rng), u, std::nullopt});
    }
    const auto hist = overlap_histogram(users, cfg.at("pair_budget").get<std::uint64_t>(), rng);
    ratios[ki] = hist.ratio[1];
  });
  bool increasing = true;
  for (std::size_t i = 1; i < ratios.size(); ++i)
    if (ratios[i] <= ratios[i - 1]) increasing = false;

  Csv csv;
  csv.header = {"phase", "index", "k", "value"};
  for (int r = 0; r < runs; ++r)
    csv.rows.push_back({"max-overlap", fmt_i(r), fmt_u(k_scan), fmt_u(max_overlaps[r])});
  for (std::size_t ki = 0; ki < k_values.size(); ++ki)
    csv.rows.push_back({"posterior-ratio", fmt_i(static_cast<int>(ki)), fmt_u(k_values[ki]),
                        format_double(ratios[ki])});

  json ratio_json = json::array();
  for (std::size_t ki = 0; ki < k_values.size(); ++ki)
    ratio_json.push_back(json{{"k", k_values[ki]}, {"ratio_tau1", ratios[ki]}});
  RunResult out;
  out.summary = json{{"runs", runs},
                     {"runs_ok", runs_ok},
                     {"overlap_cap", cap},
                     {"max_overlap_worst",
                      *std::max_element(max_overlaps.begin(), max_overlaps.end())},
                     {"ratios", ratio_json},
                     {"ratio_increasing", increasing}};
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// nn-separation-large-T
// ---------------------------------------------------------------------------

json large_t_defaults() {
  return json{{"seed", 20240604},
              {"M", 20000},
              {"m", 400},
              {"k", 10},
              {"delta", 0.05},
              {"s", 2},
              {"T", 120},
              {"pairs", 1000},
              {"factor_same", 0.8},
              {"factor_diff", 1.2},
              {"train_users", 2000},
              {"queries", 500}};
}

RunResult run_large_t(const json& cfg, int threads) {
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const auto k = cfg.at("k").get<std::uint32_t>();
  const auto s = cfg.at("s").get<std::uint32_t>();
  const auto T = cfg.at("T").get<std::uint32_t>();
  const int pairs = cfg.at("pairs").get<int>();

  RngStream struct_rng = derive_stream(seed, stream_id(1, 0));
  const auto structure =
      make_bounded_overlap(cfg.at("M").get<std::uint32_t>(), cfg.at("m").get<std::uint32_t>(), k,
                           cfg.at("delta").get<double>(), struct_rng);
  MixtureModel model;
  model.structure = structure;
  model.genres_per_user = s;
  model.ratings_per_user = T;
  model.validate();

  const auto thresholds = larget_thresholds(s, T, structure.genre_size());
  const double same_floor = cfg.at("factor_same").get<double>() * thresholds.same_min;
  const double diff_ceiling = cfg.at("factor_diff").get<double>() * thresholds.diff_max;

  std::vector<std::uint32_t> same_overlap(pairs), diff_overlap(pairs);
  parallel_for(static_cast<std::size_t>(pairs), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(seed, stream_id(2, i));
    const auto user = sample_user(k, s, rng);
    same_overlap[i] = overlap(emit(model, user, rng), emit(model, user, rng));
  });
  parallel_for(static_cast<std::size_t>(pairs), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(seed, stream_id(3, i));
    const auto u1 = sample_user(k, s, rng);
    auto u2 = sample_user(k, s, rng);
    while (u2.genre_ids == u1.genre_ids) u2 = sample_user(k, s, rng);
    diff_overlap[i] = overlap(emit(model, u1, rng), emit(model, u2, rng));
  });
  int same_ok = 0, diff_ok = 0;
  for (int i = 0; i < pairs; ++i) {
    if (same_overlap[i] >= same_floor) ++same_ok;
    if (diff_overlap[i] <= diff_ceiling) ++diff_ok;
  }

  // movie-task knn with the neighbor threshold at factor_same * same_min
  const auto tau = static_cast<std::uint32_t>(std::ceil(same_floor - 1e-9));
  const int train_n = cfg.at("train_users").get<int>();
  std::vector<UserRecord> train(train_n);
  parallel_for(static_cast<std::size_t>(train_n), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(seed, stream_id(4, i));
    const auto u = sample_user(k, s, rng);
    train[i] = {emit(model, u, rng), u, std::nullopt};
  });
  const int queries = cfg.at("queries").get<int>();
  std::vector<int> truth(queries), predicted(queries);
  parallel_for(static_cast<std::size_t>(queries), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(seed, stream_id(5, i));
    const auto u = sample_user(k, s, rng);
    const auto x = emit(model, u, rng);
    const auto uni = structure.genre_union(u.genre_ids);
    std::uint32_t movie = 0;
    if (rng.uniform01() < 0.5) {
      // held-out liked movie
      do {
        movie = uni[rng.uniform_below(uni.size())];
      } while (std::binary_search(x.movie_ids.begin(), x.movie_ids.end(), movie));
      truth[i] = 1;
    } else {
      do {
        movie = static_cast<std::uint32_t>(rng.uniform_below(structure.num_movies));
      } while (std::binary_search(uni.begin(), uni.end(), movie));
      truth[i] = 0;
    }
    predicted[i] = knn_predict_movie(train, x, tau, movie);
  });
  int correct = 0;
  for (int i = 0; i < queries; ++i)
    if (truth[i] == predicted[i]) ++correct;

  Csv csv;
  csv.header = {"phase", "index", "overlap", "truth", "prediction"};
  for (int i = 0; i < pairs; ++i)
    csv.rows.push_back({"same-set", fmt_i(i), fmt_u(same_overlap[i]), "", ""});
  for (int i = 0; i < pairs; ++i)
    csv.rows.push_back({"diff-set", fmt_i(i), fmt_u(diff_overlap[i]), "", ""});
  for (int i = 0; i < queries; ++i)
    csv.rows.push_back({"query", fmt_i(i), "", fmt_i(truth[i]), fmt_i(predicted[i])});

  RunResult out;
  out.summary = json{{"same_min", thresholds.same_min},
                     {"diff_max", thresholds.diff_max},
                     {"same_floor", same_floor},
                     {"diff_ceiling", diff_ceiling},
                     {"same_frac", static_cast<double>(same_ok) / pairs},
                     {"diff_frac", static_cast<double>(diff_ok) / pairs},
                     {"knn_tau", tau},
                     {"knn_accuracy", static_cast<double>(correct) / queries},
                     {"structure_hash", structure_hash(structure)}};
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// manifold-detect
// ---------------------------------------------------------------------------

json manifold_defaults() {
  return json{{"seed", 20240605},
              {"contiguity", json{{"m", 200000}, {"T", 20}, {"p", 0.5}, {"k", 25}, {"tau", 1}}},
              {"violating", json{{"N", 500}, {"k", 2}, {"a", 0.4}, {"b", 0.277}}},
              {"n_graphs", 200},
              {"gsbm", json{{"m", 10000}, {"T", 40}, {"p", 0.5}, {"k", 20}, {"tau", 1}, {"N", 2000}}}};
}

RunResult run_manifold(const json& cfg, int threads) {
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const int n_graphs = cfg.at("n_graphs").get<int>();
  Csv csv;
  csv.header = {"phase", "model", "graph", "degree_variance", "triangle_count", "top_eigenvalue"};

  auto append_stats = [&](const std::string& phase, const DistinguishReport& rep) {
    for (int g = 0; g < n_graphs; ++g)
      csv.rows.push_back({phase, "A", fmt_i(g), format_double(rep.stats_a[0][g]),
                          format_double(rep.stats_a[1][g]), format_double(rep.stats_a[2][g])});
    for (int g = 0; g < n_graphs; ++g)
      csv.rows.push_back({phase, "B", fmt_i(g), format_double(rep.stats_b[0][g]),
                          format_double(rep.stats_b[1][g]), format_double(rep.stats_b[2][g])});
  };
  auto auc_json = [](const DistinguishReport& rep) {
    json j;
    for (const auto& [name, value] : rep.auc) j[name] = value;
    return j;
  };

  // contiguity regime: matched SBM(a, b) vs ER(phi) with N = (m/T^2)^tau
  const auto& ccfg = cfg.at("contiguity");
  const double cm = ccfg.at("m").get<double>();
  const double ct = ccfg.at("T").get<double>();
  const auto ctau = ccfg.at("tau").get<std::uint32_t>();
  const auto ck = ccfg.at("k").get<std::uint32_t>();
  const auto cn = static_cast<std::uint32_t>(std::llround(std::pow(cm / (ct * ct), ctau)));
  const auto cparams = block_params(ct, cm, ctau, ccfg.at("p").get<double>(), ck, cn);
  const auto ccheck = contiguity_condition(cparams);
  const GraphGenerator c_sbm = [&](RngStream& r) { return sbm_sample(cn, ck, cparams.a, cparams.b, r); };
  const GraphGenerator c_er = [&](RngStream& r) { return er_sample(cn, cparams.phi, r); };
  const auto c_rep =
      distinguish(c_sbm, c_er, n_graphs, derive_stream(seed, stream_id(2, 0)).next_u64(), threads);
  append_stats("contiguity", c_rep);

  // violating regime: explicit (a, b) with the condition broken
  const auto& vcfg = cfg.at("violating");
  BlockParams vparams;
  vparams.a = vcfg.at("a").get<double>();
  vparams.b = vcfg.at("b").get<double>();
  vparams.k = vcfg.at("k").get<std::uint32_t>();
  vparams.n = vcfg.at("N").get<std::uint32_t>();
  vparams.phi = (vparams.a + (vparams.k - 1) * vparams.b) / vparams.k;
  const auto vcheck = contiguity_condition(vparams);
  const GraphGenerator v_sbm = [&](RngStream& r) {
    return sbm_sample(vparams.n, vparams.k, vparams.a, vparams.b, r);
  };
  const GraphGenerator v_er = [&](RngStream& r) { return er_sample(vparams.n, vparams.phi, r); };
  const auto v_rep =
      distinguish(v_sbm, v_er, n_graphs, derive_stream(seed, stream_id(3, 0)).next_u64(), threads);
  append_stats("violating", v_rep);

  // empirical nearest-neighbor graph vs the g-SBM bounds
  const auto& gcfg = cfg.at("gsbm");
  const auto gm = gcfg.at("m").get<std::uint32_t>();
  const auto gT = gcfg.at("T").get<std::uint32_t>();
  const auto gk = gcfg.at("k").get<std::uint32_t>();
  const auto gn = gcfg.at("N").get<std::uint32_t>();
  const auto gtau = gcfg.at("tau").get<std::uint32_t>();
  RngStream g_rng = derive_stream(seed, stream_id(4, 0));
  const auto g_structure = make_shared_core(gm, gk, gcfg.at("p").get<double>(), g_rng);
  MixtureModel g_model;
  g_model.structure = g_structure;
  g_model.genres_per_user = 1;
  g_model.ratings_per_user = gT;
  std::vector<RatingSample> g_samples(gn);
  std::vector<std::uint32_t> g_genres(gn);
  parallel_for(gn, threads, [&](std::size_t i) {
    RngStream rng = derive_stream(seed, stream_id(5, i));
    const auto u = sample_user(gk, 1, rng);
    g_samples[i] = emit(g_model, u, rng);
    g_genres[i] = u.genre_ids[0];
  });
  const auto gparams = block_params(gT, gm, gtau, gcfg.at("p").get<double>(), gk, gn);
  const auto g_report = verify_gsbm_bounds(g_structure, g_samples, g_genres, gtau, gparams);
  const auto nn = nn_graph(g_samples, gtau);
  const double nn_mean_degree = 2.0 * static_cast<double>(nn.edges.size()) / gn;

  RunResult out;
  out.summary =
      json{{"contiguity",
            json{{"N", cn},
                 {"a", cparams.a},
                 {"b", cparams.b},
                 {"phi", cparams.phi},
                 {"lhs", ccheck.lhs},
                 {"rhs", ccheck.rhs},
                 {"holds", ccheck.holds},
                 {"margin", ccheck.rhs / std::max(ccheck.lhs, 1e-300)},
                 {"auc", auc_json(c_rep)},
                 {"combined_auc", c_rep.combined}}},
           {"violating",
            json{{"N", vparams.n},
                 {"a", vparams.a},
                 {"b", vparams.b},
                 {"phi", vparams.phi},
                 {"lhs", vcheck.lhs},
                 {"rhs", vcheck.rhs},
                 {"holds", vcheck.holds},
                 {"margin", vcheck.lhs / std::max(vcheck.rhs, 1e-300)},
                 {"auc", auc_json(v_rep)},
                 {"combined_auc", v_rep.combined}}},
           {"gsbm",
            json{{"a", g_report.a},
                 {"b", g_report.b},
                 {"max_in_prob", g_report.max_in_prob},
                 {"min_out_prob", g_report.min_out_prob},
                 {"sigma_in", g_report.sigma_in},
                 {"sigma_out", g_report.sigma_out},
                 {"conforms", g_report.conforms},
                 {"conforming_users", g_report.conforming_users},
                 {"nn_mean_degree", nn_mean_degree},
                 {"matched_er_degree", static_cast<double>(gn - 1) * gparams.phi}}}};
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// semisup-curve
// ---------------------------------------------------------------------------

json semisup_defaults() {
  return json{{"seed", 20240606},
              {"m", 200},
              {"k", 50},
              {"p", 0.3},
              {"s", 1},
              {"T", 30},
              {"t_grid", json::array({25, 50, 100, 200})},
              {"n_test", 2000},
              {"rho", 0.0},
              {"delta", 0.05},
              {"hinge_tol", 1e-6},
              {"hinge_budget", 200000}};
}

RunResult run_semisup(const json& cfg, int threads) {
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const auto k = cfg.at("k").get<std::uint32_t>();
  const auto s = cfg.at("s").get<std::uint32_t>();

  RngStream struct_rng = derive_stream(seed, stream_id(1, 0));
  const auto structure =
      make_shared_core(cfg.at("m").get<std::uint32_t>(), k, cfg.at("p").get<double>(), struct_rng);
  const auto pinv = low_variance_pseudoinverse(movie_genre_matrix(structure));
  MixtureModel model;
  model.structure = structure;
  model.genres_per_user = s;
  model.ratings_per_user = cfg.at("T").get<std::uint32_t>();
  model.validate();

  SemisupConfig sc;
  sc.w_true = alternating_hyperplane(k);
  sc.t_values = cfg.at("t_grid").get<std::vector<int>>();
  sc.n_test = cfg.at("n_test").get<int>();
  const double rho_cfg = cfg.at("rho").get<double>();
  sc.rho = rho_cfg > 0.0 ? rho_cfg : std::sqrt(static_cast<double>(k));
  sc.delta = cfg.at("delta").get<double>();
  sc.tol = cfg.at("hinge_tol").get<double>();
  sc.iteration_budget = cfg.at("hinge_budget").get<int>();

  const UserGenerator generator = [&](RngStream& rng) {
    const auto user = sample_user(k, s, rng);
    return std::make_pair(emit(model, user, rng), user);
  };
  const LatentEncoder encoder = [&](const RatingSample& x, const BinaryLatent&) {
    return linear_encode(pinv, x).h_est;
  };
  const auto curve = semisup_experiment(generator, encoder, sc, seed, threads);

  Csv csv;
  csv.header = {"t",   "test_error",    "C_t",           "R_t",
                "E_t", "total_bound",   "realized_beta", "realized_gamma"};
  json curve_json = json::array();
  bool bound_respected = true;
  for (const auto& point : curve) {
    csv.rows.push_back({fmt_i(point.t), format_double(point.test_error),
                        format_double(point.bound.c_t), format_double(point.bound.r_t),
                        format_double(point.bound.e_t), format_double(point.bound.total()),
                        format_double(point.realized_beta), format_double(point.realized_gamma)});
    curve_json.push_back(json{{"t", point.t},
                              {"test_error", point.test_error},
                              {"C_t", point.bound.c_t},
                              {"R_t", point.bound.r_t},
                              {"E_t", point.bound.e_t},
                              {"total_bound", point.bound.total()},
                              {"realized_beta", point.realized_beta},
                              {"realized_gamma", point.realized_gamma},
                              {"b_cap", point.b_cap},
                              {"margin", point.margin}});
    if (point.t > 0 && point.test_error > point.bound.total()) bound_respected = false;
  }
  RunResult out;
  out.summary = json{{"lambda", pinv.lambda},
                     {"rho", sc.rho},
                     {"curve", curve_json},
                     {"final_test_error", curve.empty() ? 1.0 : curve.back().test_error},
                     {"bound_respected", bound_respected}};
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// supervised-lower-bound
// ---------------------------------------------------------------------------

json supervised_defaults() {
  return json{{"seed", 20240607}, {"M", 1000000},  {"k", 100000},
              {"T", 3},           {"t_train", 20}, {"queries", 10000}};
}

RunResult run_supervised(const json& cfg, int threads) {
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const auto m_total = cfg.at("M").get<std::uint32_t>();
  const auto k = cfg.at("k").get<std::uint32_t>();
  const auto T = cfg.at("T").get<std::uint32_t>();
  const int t_train = cfg.at("t_train").get<int>();
  const int queries = cfg.at("queries").get<int>();

  RngStream struct_rng = derive_stream(seed, stream_id(1, 0));
  const auto structure = make_disjoint_partition(m_total, k, struct_rng);
  MixtureModel model;
  model.structure = structure;
  model.genres_per_user = 1;
  model.ratings_per_user = T;
  const Vec w_true = alternating_hyperplane(k);

  std::vector<UserRecord> train(t_train);
  parallel_for(static_cast<std::size_t>(t_train), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(seed, stream_id(2, i));
    const auto u = sample_user(k, 1, rng);
    train[i] = {emit(model, u, rng), u, label_hyperplane(w_true, u)};
  });

  std::vector<int> truth(queries), predicted(queries);
  parallel_for(static_cast<std::size_t>(queries), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(seed, stream_id(3, i));
    const auto u = sample_user(k, 1, rng);
    const auto x = emit(model, u, rng);
    truth[i] = label_hyperplane(w_true, u);
    predicted[i] = supervised_baseline(train, x);
  });
  int correct = 0;
  for (int i = 0; i < queries; ++i)
    if (truth[i] == predicted[i]) ++correct;

  Csv csv;
  csv.header = {"query", "truth", "prediction"};
  for (int i = 0; i < queries; ++i)
    csv.rows.push_back({fmt_i(i), fmt_i(truth[i]), fmt_i(predicted[i])});

  const double slack = 1.0 * t_train * T * T / static_cast<double>(k);
  RunResult out;
  out.summary = json{{"accuracy", static_cast<double>(correct) / queries},
                     {"advantage_term", slack},
                     {"nominal_bound", 0.5 + slack}};
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// oracle-fixtures
// ---------------------------------------------------------------------------

json oracle_defaults() {
  return json{
      {"seed", 20240608},
      {"pmf", json{{"m", 50}, {"T", 7}, {"taus", json::array({0, 1, 2, 3})}, {"pairs", 100000}}},
      {"enum_max_m", 8},
      {"indep_cases",
       json::array({json::array({2, 1, 1}), json::array({3, 2, 0}), json::array({3, 2, 1})})},
      {"posterior", json{{"m", 20}, {"k", 3}, {"p", 0.5}, {"T", 10}, {"encoder_trials", 10000}}}};
}

RunResult run_oracle_fixtures(const json& cfg, int threads) {
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  Csv csv;
  csv.header = {"check", "param", "expected", "observed", "zscore"};
  json fixtures;

  // Monte Carlo overlap pmf against the closed form
  const auto& pmf_cfg = cfg.at("pmf");
  const auto pm = pmf_cfg.at("m").get<std::uint32_t>();
  const auto pT = pmf_cfg.at("T").get<std::uint32_t>();
  const auto taus = pmf_cfg.at("taus").get<std::vector<std::uint32_t>>();
  const auto pairs = pmf_cfg.at("pairs").get<int>();
  std::vector<std::uint32_t> overlaps(pairs);
  parallel_for(static_cast<std::size_t>(pairs), threads, [&](std::size_t i) {
    RngStream rng = derive_stream(seed, stream_id(2, i));
    const auto a = rng.sample_without_replacement(pm, pT);
    const auto b = rng.sample_without_replacement(pm, pT);
    std::uint32_t o = 0;
    for (std::size_t x = 0, y = 0; x < a.size() && y < b.size();) {
      if (a[x] < b[y]) ++x;
      else if (a[x] > b[y]) ++y;
      else { ++o; ++x; ++y; }
    }
    overlaps[i] = o;
  });
  bool pmf_ok = true;
  json pmf_json = json::array();
  for (const std::uint32_t tau : taus) {
    int count = 0;
    for (std::uint32_t o : overlaps)
      if (o == tau) ++count;
    const double observed = static_cast<double>(count) / pairs;
    const double expected = oracle::exact_overlap_pmf_same(pm, pT, tau);
    const double sigma = std::sqrt(expected * (1.0 - expected) / pairs);
    const double z = sigma > 0 ? (observed - expected) / sigma : 0.0;
    if (std::abs(z) > 3.0) pmf_ok = false;
    pmf_json.push_back(json{{"tau", tau}, {"expected", expected}, {"observed", observed}, {"z", z}});
    csv.rows.push_back(
        {"pmf-same", fmt_u(tau), format_double(expected), format_double(observed), format_double(z)});
  }
  fixtures["overlap_pmf_same"] = pmf_json;

  // closed form vs exhaustive enumeration, exact equality
  bool enum_ok = true;
  const auto enum_max = cfg.at("enum_max_m").get<std::uint32_t>();
  for (std::uint32_t m = 1; m <= enum_max; ++m)
    for (std::uint32_t T = 1; T <= std::min<std::uint32_t>(4, m); ++T)
      for (std::uint32_t tau = 0; tau <= T; ++tau)
        if (oracle::overlap_pmf_same_rational(m, T, tau) !=
            oracle::enumerate_overlap_pmf_same(m, T, tau))
          enum_ok = false;
  csv.rows.push_back({"pmf-enumeration-equality", fmt_u(enum_max), "1", enum_ok ? "1" : "0", "0"});
  fixtures["enumeration_equality"] = enum_ok;

  // independent-emission formula next to the enumeration truth
  json indep_json = json::array();
  for (const auto& item : cfg.at("indep_cases")) {
    const auto c = item.get<std::vector<std::uint32_t>>();
    const auto rep = oracle::exact_overlap_pmf_indep(c[0], c[1], c[2]);
    indep_json.push_back(json{{"m", c[0]},
                              {"T", c[1]},
                              {"tau", c[2]},
                              {"formula", rep.formula},
                              {"enumeration", rep.enumeration},
                              {"difference", rep.difference}});
    csv.rows.push_back({"pmf-independent", fmt_u(c[0] * 100 + c[1] * 10 + c[2]),
                        format_double(rep.formula), format_double(rep.enumeration),
                        format_double(rep.difference)});
  }
  fixtures["overlap_pmf_independent"] = indep_json;

  // posterior concentration: exact posterior vs the measured encoder validity
  const auto& post_cfg = cfg.at("posterior");
  const auto m = post_cfg.at("m").get<std::uint32_t>();
  const auto k = post_cfg.at("k").get<std::uint32_t>();
  const auto p = post_cfg.at("p").get<double>();
  const auto T = post_cfg.at("T").get<std::uint32_t>();
  RngStream struct_rng = derive_stream(seed, stream_id(3, 0));
  const auto structure = make_shared_core(m, k, p, struct_rng);
  const auto pinv = low_variance_pseudoinverse(movie_genre_matrix(structure));
  MixtureModel model;
  model.structure = structure;
  model.genres_per_user = 1;
  model.ratings_per_user = T;
  const double gamma_hat = pinv.lambda * std::sqrt(1.0 / T);
  const auto trial = [&](RngStream& rng) {
    const auto user = sample_user(k, 1, rng);
    const auto x = emit(model, user, rng);
    return std::make_pair(linear_encode(pinv, x).h_est, user.simplex());
  };
  const auto report = measure_encoder(trial, post_cfg.at("encoder_trials").get<int>(), gamma_hat,
                                      Norm::L1, seed, stream_id(4, 0), threads);
  const double beta_hat = report.success_prob;
  const double delta = std::sqrt(std::max(0.0, 1.0 - beta_hat));

  // enumerate samples by their core-movie count: with the symmetric B this
  // class determines the encoder output and the posterior exactly
  const std::uint32_t core = static_cast<std::uint32_t>(std::llround(p * m));
  std::vector<std::uint32_t> core_ids, unique_ids;
  for (std::uint32_t id : structure.genres[0]) {
    bool in_all = true;
    for (std::uint32_t g = 1; g < k; ++g)
      if (!std::binary_search(structure.genres[g].begin(), structure.genres[g].end(), id))
        in_all = false;
    (in_all ? core_ids : unique_ids).push_back(id);
  }
  double fraction_good = 0.0;
  json classes = json::array();
  const std::uint32_t c_lo = T > m - core ? T - (m - core) : 0;
  for (std::uint32_t c = c_lo; c <= std::min(T, core); ++c) {
    const double weight = oracle::binomial_double(core, c) *
                          oracle::binomial_double(m - core, T - c) / oracle::binomial_double(m, T);
    RatingSample x;
    x.mode = ReplacementMode::Set;
    x.movie_ids.assign(core_ids.begin(), core_ids.begin() + c);
    x.movie_ids.insert(x.movie_ids.end(), unique_ids.begin(), unique_ids.begin() + (T - c));
    std::sort(x.movie_ids.begin(), x.movie_ids.end());
    const Vec f = linear_encode(pinv, x).h_est;
    const auto posterior = oracle::exact_posterior(structure, 1, x);
    double prob_within = 0.0;
    for (const auto& entry : posterior)
      if (norm_error(f, entry.latent.simplex(), Norm::L1) <= gamma_hat)
        prob_within += entry.probability;
    const bool good = prob_within >= 1.0 - delta;
    if (good) fraction_good += weight;
    classes.push_back(
        json{{"core_count", c}, {"weight", weight}, {"prob_within", prob_within}, {"good", good}});
    csv.rows.push_back({"posterior-class", fmt_u(c), format_double(weight),
                        format_double(prob_within), good ? "1" : "0"});
  }
  const bool posterior_ok = fraction_good >= 1.0 - delta;
  fixtures["posterior"] = json{{"beta_hat", beta_hat},   {"gamma_hat", gamma_hat},
                               {"delta", delta},         {"fraction_good", fraction_good},
                               {"ok", posterior_ok},     {"classes", classes}};

  RunResult out;
  out.summary = json{{"pmf_within_3sigma", pmf_ok},
                     {"enumeration_equality", enum_ok},
                     {"posterior", fixtures["posterior"]},
                     {"fixtures", fixtures}};
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------

struct Experiment {
  json (*defaults)();
  RunResult (*run)(const json&, int);
};

const std::vector<std::pair<std::string, Experiment>>& registry() {
  static const std::vector<std::pair<std::string, Experiment>> table = {
      {"encoder-validity-linear", {linear_defaults, run_linear}},
      {"encoder-validity-loglinear", {loglinear_defaults, run_loglinear}},
      {"nn-separation-small-T", {small_t_defaults, run_small_t}},
      {"nn-separation-large-T", {large_t_defaults, run_large_t}},
      {"manifold-detect", {manifold_defaults, run_manifold}},
      {"semisup-curve", {semisup_defaults, run_semisup}},
      {"supervised-lower-bound", {supervised_defaults, run_supervised}},
      {"oracle-fixtures", {oracle_defaults, run_oracle_fixtures}},
  };
  return table;
}

const Experiment& find_experiment(const std::string& name) {
  for (const auto& [key, experiment] : registry())
    if (key == name) return experiment;
  std::string valid;
  for (const auto& [key, experiment] : registry()) valid += " " + key;
  throw ConfigError("unknown experiment '" + name + "'; valid names:" + valid);
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& [key, experiment] : registry()) names.push_back(key);
  return names;
}

bool is_experiment(const std::string& name) {
  for (const auto& [key, experiment] : registry())
    if (key == name) return true;
  return false;
}

json default_config(const std::string& name) { return find_experiment(name).defaults(); }

json resolve_config(const std::string& name, const json& user, bool require_seed) {
  const auto& experiment = find_experiment(name);
  if (require_seed && !user.contains("seed"))
    throw ConfigError("config.seed: missing required field");
  return merge_config(experiment.defaults(), user, "config");
}

RunResult run_experiment(const std::string& name, const json& user_config, int threads) {
  const auto& experiment = find_experiment(name);
  const json resolved = resolve_config(name, user_config, /*require_seed=*/!user_config.empty());
  RunResult result = experiment.run(resolved, threads);
  result.run_id = hex64(fnv1a(resolved.dump()));
  json summary;
  summary["experiment"] = name;
  summary["version"] = kVersion;
  summary["run_id"] = result.run_id;
  summary["config"] = resolved;
  summary["results"] = result.summary;
  result.summary = std::move(summary);
  return result;
}

std::string run_and_write(const std::string& name, const json& user_config,
                          const std::string& out_dir, int threads) {
  const RunResult result = run_experiment(name, user_config, threads);
  const std::filesystem::path dir = std::filesystem::path(out_dir) / name / result.run_id;
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "results.csv", std::ios::binary);
    csv << result.csv;
    if (!csv) throw std::runtime_error("run_and_write: failed writing results.csv");
  }
  {
    std::ofstream summary(dir / "summary.json", std::ios::binary);
    summary << result.summary.dump(2) << '\n';
    if (!summary) throw std::runtime_error("run_and_write: failed writing summary.json");
  }
  return dir.string();
}

}  // namespace latentlab::experiments
