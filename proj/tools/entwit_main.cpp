#include "entwit/detect.hpp"
#include "entwit/errors.hpp"
#include "entwit/io.hpp"
#include "entwit/parallel.hpp"
#include "entwit/states.hpp"
#include "entwit/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace {

using namespace entwit;
using nlohmann::ordered_json;

BipartiteDims parse_dims(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) {
    throw std::invalid_argument("dims must look like 2x2 or 3x3, got: " + text);
  }
  try {
    return BipartiteDims(std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("dims must look like 2x2 or 3x3, got: " + text);
  }
}

Strategy parse_strategy(const std::string& name) {
  if (name == "diagonal") return Strategy::Diagonal;
  if (name == "full-square") return Strategy::FullSquare;
  if (name == "staircase") return Strategy::Staircase;
  throw std::invalid_argument("unknown strategy: " + name +
                              " (expected diagonal, full-square, or staircase)");
}

std::string out_path(const std::string& requested, const std::string& default_name) {
  if (!requested.empty()) return requested;
  const char* dir = std::getenv("ENTWIT_OUT_DIR");
  return std::string(dir != nullptr ? dir : ".") + "/" + default_name;
}

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct DetectCampaignOpts {
  std::string dims = "2x2";
  long trials = 100;
  std::uint64_t seed = 1;
  std::string strategy = "diagonal";
  int env_dim = 0;  // mixed-state draws; 0 means environment = system dimension
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  std::string out;
  SdpConfig sdp;
};

void add_sdp_flags(CLI::App* cmd, SdpConfig& sdp) {
  cmd->add_option("--gap-tol", sdp.gap_tol, "SDP duality gap tolerance");
  cmd->add_option("--max-iters", sdp.max_iterations, "SDP Newton step cap");
  cmd->add_option("--detection-threshold", sdp.detection_floor,
                  "detection floor: claim entanglement below -max(floor, 10*gap)");
}

const std::vector<std::string> kRunColumns{
    "seed",        "trial",    "d_a",         "d_b",         "negativity",
    "n_measurements", "detected", "final_value", "wall_time_ms"};

std::vector<std::string> run_row(std::uint64_t seed, long trial,
                                 const BipartiteDims& dims, const DetectionRun& run,
                                 double wall_ms) {
  char wall[32];
  std::snprintf(wall, sizeof(wall), "%.3f", wall_ms);
  return {std::to_string(seed),
          std::to_string(trial),
          std::to_string(dims.d_a),
          std::to_string(dims.d_b),
          format_double(run.negativity_true),
          std::to_string(run.n_global_measurements),
          run.detected ? "1" : "0",
          format_double(run.final_value),
          wall};
}

int run_detect_campaign(const DetectCampaignOpts& opt, bool maxent) {
  const BipartiteDims dims = parse_dims(opt.dims);
  if (opt.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (maxent && dims.d_a != dims.d_b) {
    throw std::invalid_argument("detect-maxent needs square dimensions");
  }
  const Strategy strategy = parse_strategy(opt.strategy);
  const int env = opt.env_dim > 0 ? opt.env_dim : dims.total();
  DetectConfig cfg;
  cfg.sdp = opt.sdp;

  RngStream master(opt.seed);
  std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(opt.trials));
  parallel_for(opt.trials, opt.threads, [&](long i) {
    RngStream sub = master.substream(static_cast<std::uint64_t>(i));
    const auto t0 = std::chrono::steady_clock::now();
    DensityMatrix rho =
        maxent ? DensityMatrix::pure(random_max_entangled(dims.d_a, sub), dims)
               : random_mixed_state(MixedStateSpec(dims.total(), env), sub)
                     .with_dims(dims);
    const DetectionRun run = run_detection(rho, dims, strategy, cfg, sub);
    rows[static_cast<std::size_t>(i)] = run_row(opt.seed, i, dims, run, elapsed_ms(t0));
  });

  const std::string path = out_path(
      opt.out, std::string(maxent ? "detect_maxent" : "detect_random") + "_seed" +
                   std::to_string(opt.seed) + ".csv");
  write_csv(path, "entwit.run_record.v1", kRunColumns, rows);
  std::printf("wrote %s (%ld rows)\n", path.c_str(), opt.trials);
  return 0;
}

ordered_json fraction_json(const FractionEstimate& f) {
  return ordered_json{{"count", f.count},
                      {"total", f.total},
                      {"fraction", f.fraction},
                      {"std_error", f.std_error}};
}

int run_rew_stats(const std::string& dims_text, long n_ops, long n_states,
                  int restarts, int env_dim, std::uint64_t seed,
                  const std::string& out) {
  const BipartiteDims dims = parse_dims(dims_text);
  RewConfig cfg;
  cfg.overlap_restarts = restarts;
  cfg.env_dim = env_dim;
  RngStream rng(seed);
  const RewSummary s = random_global_witness_experiment(dims, n_ops, n_states, rng, cfg);

  ordered_json j;
  j["schema"] = "entwit.rew_stats.v1";
  j["config"] = ordered_json{{"dims", dims_text}, {"n_ops", n_ops},
                             {"n_states", n_states}, {"restarts", restarts},
                             {"env_dim", env_dim}, {"seed", seed}};
  j["n_ops"] = s.n_ops;
  j["n_indefinite"] = s.n_indefinite;
  j["ppt_witness"] = fraction_json(s.ppt_witness);
  j["overlap_witness"] = fraction_json(s.overlap_witness);
  j["ppt_witness_fraction"] = s.ppt_witness.fraction;
  j["overlap_witness_fraction"] = s.overlap_witness.fraction;
  if (s.det_mixed_ppt) j["detection_mixed_ppt"] = fraction_json(*s.det_mixed_ppt);
  if (s.det_mixed_overlap) {
    j["detection_mixed_overlap"] = fraction_json(*s.det_mixed_overlap);
  }
  if (s.det_maxent_ppt) j["detection_maxent_ppt"] = fraction_json(*s.det_maxent_ppt);
  if (s.det_maxent_overlap) {
    j["detection_maxent_overlap"] = fraction_json(*s.det_maxent_overlap);
  }

  const std::string path =
      out_path(out, "rew_stats_seed" + std::to_string(seed) + ".json");
  write_text_file(path, j.dump(2) + "\n");
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

DensityMatrix draw_low_negativity_state(const BipartiteDims& dims, int env_dim,
                                        double neg_lo, double neg_hi, long max_draws,
                                        RngStream& rng) {
  const int env = env_dim > 0 ? env_dim : dims.total();
  for (long attempt = 0; attempt < max_draws; ++attempt) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(attempt));
    DensityMatrix rho =
        random_mixed_state(MixedStateSpec(dims.total(), env), sub).with_dims(dims);
    const double neg = negativity(rho.matrix(), dims);
    if (neg >= neg_lo && neg <= neg_hi) return rho;
  }
  throw std::invalid_argument("no state with negativity in [" +
                              format_double(neg_lo) + ", " + format_double(neg_hi) +
                              "] found after " + std::to_string(max_draws) +
                              " draws");
}

int run_confidence(const std::string& dims_text, std::uint64_t seed,
                   const std::string& state_path, double neg_lo, double neg_hi,
                   long max_draws, int env_dim, std::vector<int> rounds,
                   std::vector<long> shots_grid, double sigma,
                   const std::string& strategy_name, const SdpConfig& sdp,
                   const std::string& out) {
  const Strategy strategy = parse_strategy(strategy_name);
  if (rounds.empty() || shots_grid.empty()) {
    throw std::invalid_argument("confidence needs at least one round count and "
                                "one shots value");
  }
  RngStream rng(seed);
  RngStream draw_rng = rng.substream(0x647261u);
  DensityMatrix rho =
      state_path.empty()
          ? draw_low_negativity_state(parse_dims(dims_text), env_dim, neg_lo, neg_hi,
                                      max_draws, draw_rng)
          : read_state_file(state_path);
  if (!rho.dims().has_value()) {
    throw std::invalid_argument("state file lacks bipartite dimensions");
  }
  const double neg = negativity(rho.matrix(), *rho.dims());

  RngStream curve_rng = rng.substream(0x63666476u);
  const std::vector<ConfidencePoint> curve =
      confidence_curve(rho, strategy, rounds, shots_grid, sigma, sdp, curve_rng);

  const std::vector<std::string> columns{
      "seed",       "negativity", "n_rounds", "shots",
      "mean_value", "error_bound", "sigma",   "upper", "certified"};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(curve.size());
  for (const ConfidencePoint& pt : curve) {
    rows.push_back({std::to_string(seed), format_double(neg),
                    std::to_string(pt.n_rounds), std::to_string(pt.shots),
                    format_double(pt.mean_value), format_double(pt.error_bound),
                    format_double(sigma), format_double(pt.upper),
                    pt.certified ? "1" : "0"});
  }
  const std::string path =
      out_path(out, "confidence_seed" + std::to_string(seed) + ".csv");
  write_csv(path, "entwit.confidence.v1", columns, rows);
  std::printf("wrote %s (%zu rows)\n", path.c_str(), rows.size());
  return 0;
}

int run_analyze(const std::string& state_path, std::uint64_t seed,
                const std::string& strategy_name, long shots, int cert_rounds,
                double sigma, const SdpConfig& sdp, const std::string& out) {
  const DensityMatrix rho = read_state_file(state_path);
  if (!rho.dims().has_value()) {
    throw std::invalid_argument(state_path + ": state file lacks bipartite dimensions");
  }
  const BipartiteDims dims = *rho.dims();
  const Strategy strategy = parse_strategy(strategy_name);

  ordered_json j;
  j["schema"] = "entwit.analyze.v1";
  j["config"] = ordered_json{{"state", state_path}, {"seed", seed},
                             {"strategy", strategy_name}, {"shots", shots},
                             {"cert_rounds", cert_rounds}, {"sigma", sigma}};
  j["d_a"] = dims.d_a;
  j["d_b"] = dims.d_b;
  j["negativity"] = negativity(rho.matrix(), dims);
  j["npt"] = is_npt(rho, dims);
  j["tomographic_bound"] = tomographic_bound(dims);

  RngStream rng(seed);
  DetectConfig cfg;
  cfg.sdp = sdp;
  RngStream detect_rng = rng.substream(1);
  const DetectionRun run = run_detection(rho, dims, strategy, cfg, detect_rng);
  ordered_json rounds = ordered_json::array();
  for (const RoundLog& r : run.rounds) {
    ordered_json cells = ordered_json::array();
    for (const Cell& c : r.cells_added) cells.push_back({{"a", c.a}, {"b", c.b}});
    rounds.push_back({{"cells_added", cells},
                      {"sdp_value", r.sdp_value},
                      {"sdp_status", static_cast<int>(r.sdp_status)}});
  }
  j["detection"] = ordered_json{{"detected", run.detected},
                                {"n_measurements", run.n_global_measurements},
                                {"final_value", run.final_value},
                                {"rounds", rounds}};

  if (shots > 0) {
    std::vector<HermitianOperator> a_ops, b_ops;
    std::vector<Cell> cells;
    RngStream obs_rng = rng.substream(2);
    for (int round = 1; round <= cert_rounds; ++round) {
      const std::vector<Cell> added = next_cells(strategy, round, dims);
      if (added.empty()) break;
      int need_a = 0, need_b = 0;
      for (const Cell& c : added) {
        need_a = std::max(need_a, c.a);
        need_b = std::max(need_b, c.b);
      }
      while (static_cast<int>(a_ops.size()) < need_a) {
        a_ops.push_back(random_dichotomic(dims.d_a, obs_rng));
      }
      while (static_cast<int>(b_ops.size()) < need_b) {
        b_ops.push_back(random_dichotomic(dims.d_b, obs_rng));
      }
      cells.insert(cells.end(), added.begin(), added.end());
    }
    const MeasurementBasis basis = build_product_basis(dims, a_ops, b_ops, cells);
    std::vector<long> shots_per_cell(basis.cells.size(), shots);
    for (std::size_t i = 0; i < basis.cells.size(); ++i) {
      if (basis.cells[i] == Cell{0, 0}) shots_per_cell[i] = 0;
    }
    RngStream cert_rng = rng.substream(3);
    const SplitCertificate cert =
        split_data_certify(rho, basis, shots_per_cell, sigma, sdp, cert_rng);
    j["split_certificate"] =
        ordered_json{{"mean_value", cert.mean_value},
                     {"error_bound", cert.error_bound},
                     {"sigma_level", cert.sigma_level},
                     {"certified", cert.certified},
                     {"n_sampled_cells", basis.n_cells() - 1},
                     {"shots_per_cell", shots}};
  }

  const std::string path = out_path(out, "analyze_seed" + std::to_string(seed) + ".json");
  write_text_file(path, j.dump(2) + "\n");
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int run_gen_state(const std::string& kind, const std::string& dims_text, int env_dim,
                  double werner_p, std::uint64_t seed, const std::string& out) {
  RngStream rng(seed);
  const std::string path =
      out_path(out, "state_" + kind + "_seed" + std::to_string(seed) + ".json");
  DensityMatrix rho = [&]() -> DensityMatrix {
    if (kind == "bell") return bell_state();
    if (kind == "werner") return werner_state(werner_p);
    const BipartiteDims dims = parse_dims(dims_text);
    if (kind == "maxent") {
      if (dims.d_a != dims.d_b) {
        throw std::invalid_argument("maxent states need square dimensions");
      }
      return DensityMatrix::pure(random_max_entangled(dims.d_a, rng), dims);
    }
    if (kind == "mixed") {
      const int env = env_dim > 0 ? env_dim : dims.total();
      return random_mixed_state(MixedStateSpec(dims.total(), env), rng).with_dims(dims);
    }
    throw std::invalid_argument("unknown state kind: " + kind +
                                " (expected mixed, maxent, bell, or werner)");
  }();
  write_state_file(path, rho);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"entanglement detection with random local measurements"};
  app.require_subcommand(1);
  app.set_config("--config", "", "config file (TOML/INI style; flags override)");

  DetectCampaignOpts detect_opt;
  auto add_campaign_flags = [&](CLI::App* cmd) {
    cmd->add_option("--dims", detect_opt.dims, "bipartite dimensions, e.g. 2x2");
    cmd->add_option("--trials", detect_opt.trials, "number of detection runs");
    cmd->add_option("--seed", detect_opt.seed, "master seed");
    cmd->add_option("--strategy", detect_opt.strategy,
                    "diagonal | full-square | staircase");
    cmd->add_option("--env-dim", detect_opt.env_dim,
                    "environment dimension for mixed draws (0: system dimension)");
    cmd->add_option("--threads", detect_opt.threads, "worker threads");
    cmd->add_option("--out", detect_opt.out, "output CSV path");
    add_sdp_flags(cmd, detect_opt.sdp);
  };
  CLI::App* cmd_random = app.add_subcommand(
      "detect-random", "detection runs on induced-measure random mixed states");
  add_campaign_flags(cmd_random);
  CLI::App* cmd_maxent = app.add_subcommand(
      "detect-maxent", "detection runs on random maximally entangled states");
  add_campaign_flags(cmd_maxent);

  std::string rew_dims = "2x2";
  long rew_ops = 10000, rew_states = 0;
  int rew_restarts = kDefaultSeeSawRestarts, rew_env = 0;
  std::uint64_t rew_seed = 1;
  std::string rew_out;
  CLI::App* cmd_rew = app.add_subcommand(
      "rew-stats", "random-global-witness fractions and detection probabilities");
  cmd_rew->add_option("--dims", rew_dims, "bipartite dimensions");
  cmd_rew->add_option("--n-ops", rew_ops, "number of random operators");
  cmd_rew->add_option("--n-states", rew_states, "random states per witness");
  cmd_rew->add_option("--restarts", rew_restarts, "see-saw restarts per candidate");
  cmd_rew->add_option("--env-dim", rew_env, "environment dimension (0: system)");
  cmd_rew->add_option("--seed", rew_seed, "master seed");
  cmd_rew->add_option("--out", rew_out, "output JSON path");

  std::string conf_dims = "2x2", conf_state, conf_out, conf_strategy = "diagonal";
  std::uint64_t conf_seed = 1;
  double conf_lo = 0.01, conf_hi = 0.03, conf_sigma = kDefaultSigmaLevel;
  long conf_draws = 100000;
  int conf_env = 0;
  std::vector<int> conf_rounds{6, 7};
  std::vector<long> conf_shots{1000, 4000, 16000, 64000, 256000, 1024000, 4096000};
  SdpConfig conf_sdp;
  CLI::App* cmd_conf = app.add_subcommand(
      "confidence", "split-data confidence interval across rounds and repetitions");
  cmd_conf->add_option("--dims", conf_dims, "bipartite dimensions (random draw)");
  cmd_conf->add_option("--seed", conf_seed, "master seed");
  cmd_conf->add_option("--state", conf_state, "state file (skips the random draw)");
  cmd_conf->add_option("--neg-lo", conf_lo, "negativity filter lower edge");
  cmd_conf->add_option("--neg-hi", conf_hi, "negativity filter upper edge");
  cmd_conf->add_option("--max-draws", conf_draws, "draw budget for the filter");
  cmd_conf->add_option("--env-dim", conf_env, "environment dimension (0: system)");
  cmd_conf->add_option("--rounds", conf_rounds, "round counts, e.g. --rounds 6 7");
  cmd_conf->add_option("--shots-grid", conf_shots, "per-cell repetition grid");
  cmd_conf->add_option("--sigma", conf_sigma, "confidence level in sigmas");
  cmd_conf->add_option("--strategy", conf_strategy, "cell traversal strategy");
  cmd_conf->add_option("--out", conf_out, "output CSV path");
  add_sdp_flags(cmd_conf, conf_sdp);

  std::string an_state, an_out, an_strategy = "diagonal";
  std::uint64_t an_seed = 1;
  long an_shots = 0;
  int an_rounds = 3;
  double an_sigma = kDefaultSigmaLevel;
  SdpConfig an_sdp;
  CLI::App* cmd_an = app.add_subcommand("analyze", "full report for one state file");
  cmd_an->add_option("--state", an_state, "state JSON file")->required();
  cmd_an->add_option("--seed", an_seed, "master seed");
  cmd_an->add_option("--strategy", an_strategy, "cell traversal strategy");
  cmd_an->add_option("--shots", an_shots,
                     "per-cell shots for a split-data certificate (0: skip)");
  cmd_an->add_option("--rounds", an_rounds, "rounds for the certificate basis");
  cmd_an->add_option("--sigma", an_sigma, "confidence level in sigmas");
  cmd_an->add_option("--out", an_out, "output JSON path");
  add_sdp_flags(cmd_an, an_sdp);

  std::string gen_kind = "mixed", gen_dims = "2x2", gen_out;
  int gen_env = 0;
  double gen_p = 0.7;
  std::uint64_t gen_seed = 1;
  CLI::App* cmd_gen = app.add_subcommand("gen-state", "write a state file");
  cmd_gen->add_option("--kind", gen_kind, "mixed | maxent | bell | werner");
  cmd_gen->add_option("--dims", gen_dims, "bipartite dimensions");
  cmd_gen->add_option("--env-dim", gen_env, "environment dimension (0: system)");
  cmd_gen->add_option("--p", gen_p, "Werner mixing parameter");
  cmd_gen->add_option("--seed", gen_seed, "master seed");
  cmd_gen->add_option("--out", gen_out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_random->parsed()) return run_detect_campaign(detect_opt, false);
    if (cmd_maxent->parsed()) return run_detect_campaign(detect_opt, true);
    if (cmd_rew->parsed()) {
      return run_rew_stats(rew_dims, rew_ops, rew_states, rew_restarts, rew_env,
                           rew_seed, rew_out);
    }
    if (cmd_conf->parsed()) {
      return run_confidence(conf_dims, conf_seed, conf_state, conf_lo, conf_hi,
                            conf_draws, conf_env, conf_rounds, conf_shots, conf_sigma,
                            conf_strategy, conf_sdp, conf_out);
    }
    if (cmd_an->parsed()) {
      return run_analyze(an_state, an_seed, an_strategy, an_shots, an_rounds,
                         an_sigma, an_sdp, an_out);
    }
    if (cmd_gen->parsed()) {
      return run_gen_state(gen_kind, gen_dims, gen_env, gen_p, gen_seed, gen_out);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 2;
  }
  return 0;
}
