// cyclone-bands: staged pipeline from best-track archive to prediction bands.
// Every stage reads and writes files, so any stage can be rerun or replaced
// on its own:
//
//   ingest    HURDAT2 text -> track store (train/test split)
//   train     track store  -> model file (regressions + lysis)
//   simulate  model + seed storm -> ensemble (GeoJSON + CSV)
//   band      ensemble -> band (GeoJSON + exact parameters)
//   evaluate  model + test split -> coverage grid CSV
//   calibrate model + test split -> self-coverage CSV

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "cyclone/errors.hpp"
#include "cyclone/evaluation.hpp"
#include "cyclone/hurdat.hpp"
#include "cyclone/parallel.hpp"
#include "cyclone/serialization.hpp"

namespace {

using namespace cyclone;

// exit codes: 0 ok, 1 domain error (degenerate inputs), 2 I/O or usage
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

void validate_alpha(double alpha, bool force) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DomainError("alpha must be in (0, 1)");
  if (!force && (alpha < 0.01 || alpha > 0.10))
    throw DomainError(
        "alpha outside the usual [0.01, 0.10] confidence range; pass "
        "--force-alpha to override");
}

int cmd_ingest(const std::string& input, std::size_t train_count,
               std::uint64_t seed, const std::string& out) {
  const std::vector<Track> parsed = parse_hurdat2(read_text_file(input));
  const std::vector<Track> usable = usable_tracks(parsed);
  TrackStore store;
  store.source = std::filesystem::path(input).filename().string();
  store.split = split_train_test(usable, train_count, seed);
  save_store(out, store);
  std::printf("parsed %zu storms, %zu usable; split %zu train / %zu test "
              "(seed %llu)\n",
              parsed.size(), usable.size(), store.split.train.size(),
              store.split.test.size(),
              static_cast<unsigned long long>(seed));
  return 0;
}

int cmd_train(const std::string& store_path, std::size_t min_block_obs,
              double ridge, const std::string& out) {
  const TrackStore store = load_store(store_path);
  if (store.split.train.empty())
    throw DomainError("training split is empty");

  ModelBundle bundle;
  bundle.min_block_obs = min_block_obs;
  bundle.ridge = ridge;
  bundle.nonar = fit_block_models(store.split.train, RegressionMode::kNonAr,
                                  min_block_obs, ridge);
  bundle.ar = fit_block_models(store.split.train, RegressionMode::kAr,
                               min_block_obs, ridge);
  bundle.logistic = fit_logistic_blocks(store.split.train, min_block_obs);
  bundle.kernel = fit_lifespan_kde(store.split.train);
  save_model(out, bundle);
  std::printf("trained on %zu storms: %zu non-AR blocks, %zu AR blocks, "
              "%zu logistic blocks, %zu lifespans (bandwidth %.3f)\n",
              store.split.train.size(), bundle.nonar.per_block.size(),
              bundle.ar.per_block.size(), bundle.logistic.per_block.size(),
              bundle.kernel.lifespans.size(), bundle.kernel.bandwidth);
  if (bundle.logistic.escalations > 0)
    std::printf("note: %zu logistic fits needed a ridge escalation\n",
                bundle.logistic.escalations);
  return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& store_path,
                 const std::string& storm_id, const std::string& mode,
                 const std::string& lysis, int n_sims, int max_steps,
                 std::uint64_t seed, int threads, const std::string& out) {
  const ModelBundle models = load_model(model_path);
  const TrackStore store = load_store(store_path);
  const Track* seed_track = find_track(store, storm_id);
  if (!seed_track)
    throw DomainError("storm " + storm_id + " not found in the store");

  SimulationConfig cfg;
  cfg.mode = regression_mode_from(mode);
  cfg.lysis = lysis_mode_from(lysis);
  cfg.n_sims = n_sims;
  cfg.max_steps = max_steps;
  cfg.master_seed = seed;

  const BlockRegression& regression =
      cfg.mode == RegressionMode::kAr ? models.ar : models.nonar;
  const LysisModel lysis_model =
      cfg.lysis == LysisMode::kLogistic ? LysisModel{models.logistic}
                                        : LysisModel{models.kernel};
  const SimulationEnsemble ens =
      simulate_ensemble(*seed_track, regression, lysis_model, cfg, threads);
  save_ensemble(out, ens, seed_track->points.front().timestamp);
  std::printf("simulated %zu members from %s (%s, %s lysis); %zu hit the "
              "polar boundary\n",
              ens.tracks.size(), storm_id.c_str(), mode.c_str(), lysis.c_str(),
              ens.boundary_members.size());
  return 0;
}

int cmd_band(const std::string& ensemble_path, const std::string& method_name,
             double alpha, bool force_alpha, double resolution_km, int threads,
             const std::string& out) {
  validate_alpha(alpha, force_alpha);
  const BandMethod method = band_method_from(method_name);
  const SimulationEnsemble ens = load_ensemble(ensemble_path);
  const DepthRanking ranking =
      metric_depth(distance_matrix(ens.tracks, threads), threads);
  const PredictionBand band = build_band(method, ens, ranking, alpha);
  save_band(out, band, resolution_km, threads);

  // depth diagnostics next to the band artifacts
  std::string depths = "member,depth\n";
  char buf[64];
  for (std::size_t i = 0; i < ranking.depths.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", i, ranking.depths[i]);
    depths += buf;
  }
  std::filesystem::path depth_path(out);
  depth_path += ".depths.csv";
  write_text_file(depth_path, depths);

  std::printf("%s band at alpha %.3f: area %.0f km^2 (resolution %.1f km)\n",
              method_name.c_str(), alpha,
              band_area(band, resolution_km, threads), resolution_km);
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& store_path,
                 double alpha, bool force_alpha, int n_sims,
                 std::uint64_t seed, int threads, const std::string& out) {
  validate_alpha(alpha, force_alpha);
  const ModelBundle models = load_model(model_path);
  TrackStore store = load_store(store_path);
  std::sort(store.split.test.begin(), store.split.test.end(),
            [](const Track& a, const Track& b) { return a.storm_id < b.storm_id; });

  EvaluationOptions opt;
  opt.alpha = alpha;
  opt.n_sims = n_sims;
  opt.seed = seed;
  opt.threads = threads;
  const EvaluationGrid grid = table1_grid(store.split.test, models, opt);
  write_text_file(out, coverage_csv(grid.reports));
  std::printf("%s", grid_table(grid).c_str());
  std::size_t failures = 0;
  for (const GridCell& cell : grid.cells) failures += cell.n_failures;
  if (failures > 0)
    std::printf("excluded %zu degenerate storm/config/band combinations\n",
                failures);
  return 0;
}

int cmd_calibrate(const std::string& model_path, const std::string& store_path,
                  const std::string& mode, const std::string& lysis,
                  double alpha, bool force_alpha, int n_sims,
                  std::size_t replicates, std::uint64_t seed, int threads,
                  const std::string& out) {
  validate_alpha(alpha, force_alpha);
  const ModelBundle models = load_model(model_path);
  TrackStore store = load_store(store_path);
  std::sort(store.split.test.begin(), store.split.test.end(),
            [](const Track& a, const Track& b) { return a.storm_id < b.storm_id; });
  if (store.split.test.empty())
    throw DomainError("calibration needs a nonempty test split");

  CalibrationOptions opt;
  opt.sim_mode = regression_mode_from(mode);
  opt.lysis_mode = lysis_mode_from(lysis);
  opt.alpha = alpha;
  opt.n_sims = n_sims;
  opt.replicates = replicates;
  opt.master_seed = seed;
  opt.threads = threads;
  const auto results = calibration_experiment(models, store.split.test, opt);
  write_text_file(out, calibration_csv(results));
  for (const CalibrationResult& r : results)
    std::printf("%-11s uniform %.3f  pointwise %.3f  (%zu replicates, %zu "
                "failed)\n",
                to_string(r.band_type).c_str(), r.uniform_coverage_rate,
                r.pointwise_coverage_rate, r.replicates, r.failures);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tropical cyclone track ensembles and prediction bands"};
  app.require_subcommand(1);
  int threads = 0;  // 0 = CYCLONE_BANDS_THREADS env, then hardware
  app.add_option("--threads", threads,
                 "worker threads (0 = CYCLONE_BANDS_THREADS or all cores)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "parse HURDAT2 and split");
  std::string in_input, in_out;
  std::size_t in_train_count = 702;
  std::uint64_t in_seed = 0;
  ingest->add_option("--input", in_input, "HURDAT2 text file")->required();
  ingest->add_option("--train-count", in_train_count, "storms in the training split");
  ingest->add_option("--seed", in_seed, "split shuffle seed");
  ingest->add_option("--out", in_out, "track store JSON path")->required();

  // train
  auto* train = app.add_subcommand("train", "fit regression and lysis models");
  std::string tr_store, tr_out;
  std::size_t tr_min_block_obs = 20;
  double tr_ridge = 0.0;
  train->add_option("--store", tr_store, "track store JSON")->required();
  train->add_option("--min-block-obs", tr_min_block_obs,
                    "min rows for a block to get its own fit");
  train->add_option("--ridge", tr_ridge, "ridge penalty for the regressions");
  train->add_option("--out", tr_out, "model JSON path")->required();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "draw a stochastic ensemble");
  std::string si_model, si_store, si_storm, si_mode = "ar",
              si_lysis = "logistic", si_out;
  int si_n_sims = 350, si_max_steps = kDefaultMaxSteps;
  std::uint64_t si_seed = 0;
  simulate->add_option("--model", si_model, "model JSON")->required();
  simulate->add_option("--store", si_store, "track store JSON")->required();
  simulate->add_option("--storm-id", si_storm, "seed storm id")->required();
  simulate->add_option("--mode", si_mode, "ar | nonar")
      ->check(CLI::IsMember({"ar", "nonar"}));
  simulate->add_option("--lysis", si_lysis, "logistic | kernel")
      ->check(CLI::IsMember({"logistic", "kernel"}));
  simulate->add_option("--n-sims", si_n_sims, "ensemble members");
  simulate->add_option("--max-steps", si_max_steps, "simulation step cap");
  simulate->add_option("--seed", si_seed, "master RNG seed");
  simulate->add_option("--out", si_out, "output stem (.geojson + .csv)")
      ->required();

  // band
  auto* band = app.add_subcommand("band", "build a prediction band");
  std::string ba_ensemble, ba_method, ba_out;
  double ba_alpha = 0.10, ba_resolution = 25.0;
  bool ba_force_alpha = false;
  band->add_option("--ensemble", ba_ensemble, "ensemble GeoJSON")->required();
  band->add_option("--method", ba_method, "kde | spherical | hull | delta-ball")
      ->required()
      ->check(CLI::IsMember({"kde", "spherical", "hull", "delta-ball"}));
  band->add_option("--alpha", ba_alpha, "miss level, band targets 1 - alpha");
  band->add_option("--resolution-km", ba_resolution, "raster cell size");
  band->add_flag("--force-alpha", ba_force_alpha,
                 "allow alpha outside [0.01, 0.10]");
  band->add_option("--out", ba_out, "output stem (.geojson + .params.json)")
      ->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "coverage grid on the test split");
  std::string ev_model, ev_store, ev_out;
  double ev_alpha = 0.10;
  bool ev_force_alpha = false;
  int ev_n_sims = 350;
  std::uint64_t ev_seed = 0;
  evaluate->add_option("--model", ev_model, "model JSON")->required();
  evaluate->add_option("--store", ev_store, "track store JSON")->required();
  evaluate->add_option("--alpha", ev_alpha, "miss level");
  evaluate->add_flag("--force-alpha", ev_force_alpha,
                     "allow alpha outside [0.01, 0.10]");
  evaluate->add_option("--n-sims", ev_n_sims, "ensemble members per storm");
  evaluate->add_option("--seed", ev_seed, "evaluation RNG seed");
  evaluate->add_option("--out", ev_out, "coverage CSV path")->required();

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "self-coverage experiment");
  std::string ca_model, ca_store, ca_mode = "ar", ca_lysis = "logistic", ca_out;
  double ca_alpha = 0.10;
  bool ca_force_alpha = false;
  int ca_n_sims = 350;
  std::size_t ca_replicates = 200;
  std::uint64_t ca_seed = 0;
  calibrate->add_option("--model", ca_model, "model JSON")->required();
  calibrate->add_option("--store", ca_store, "track store JSON")->required();
  calibrate->add_option("--mode", ca_mode, "ar | nonar")
      ->check(CLI::IsMember({"ar", "nonar"}));
  calibrate->add_option("--lysis", ca_lysis, "logistic | kernel")
      ->check(CLI::IsMember({"logistic", "kernel"}));
  calibrate->add_option("--alpha", ca_alpha, "miss level");
  calibrate->add_flag("--force-alpha", ca_force_alpha,
                      "allow alpha outside [0.01, 0.10]");
  calibrate->add_option("--n-sims", ca_n_sims, "band-generating members");
  calibrate->add_option("--replicates", ca_replicates, "experiment repetitions");
  calibrate->add_option("--seed", ca_seed, "master RNG seed");
  calibrate->add_option("--out", ca_out, "calibration CSV path")->required();

  try {
    app.parse(argc, argv);
    const int n_threads = resolve_threads(threads);
    if (app.got_subcommand(ingest))
      return cmd_ingest(in_input, in_train_count, in_seed, in_out);
    if (app.got_subcommand(train))
      return cmd_train(tr_store, tr_min_block_obs, tr_ridge, tr_out);
    if (app.got_subcommand(simulate))
      return cmd_simulate(si_model, si_store, si_storm, si_mode, si_lysis,
                          si_n_sims, si_max_steps, si_seed, n_threads, si_out);
    if (app.got_subcommand(band))
      return cmd_band(ba_ensemble, ba_method, ba_alpha, ba_force_alpha,
                      ba_resolution, n_threads, ba_out);
    if (app.got_subcommand(evaluate))
      return cmd_evaluate(ev_model, ev_store, ev_alpha, ev_force_alpha,
                          ev_n_sims, ev_seed, n_threads, ev_out);
    if (app.got_subcommand(calibrate))
      return cmd_calibrate(ca_model, ca_store, ca_mode, ca_lysis, ca_alpha,
                           ca_force_alpha, ca_n_sims, ca_replicates, ca_seed,
                           n_threads, ca_out);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitDomain;
  } catch (const HurdatParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
