#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cyclone/band_geometry.hpp"
#include "cyclone/serialization.hpp"
#include "cyclone/simulator.hpp"
#include "cyclone/track.hpp"

// Scoring: how well do the bands cover the storm they were seeded from?
// Pointwise capture counts every true point, including the observed seed
// window (those sit next to all simulations, so this inflates capture by a
// small uniform amount for every method alike).

namespace cyclone {

struct CoverageReport {
  std::string storm_id;
  BandMethod band_type{BandMethod::kKde};
  RegressionMode sim_mode{RegressionMode::kNonAr};
  LysisMode lysis_mode{LysisMode::kLogistic};
  double pointwise_capture{0.0};  // fraction of true points inside the band
  bool uniform_capture{false};    // pointwise_capture == 1
  double area_km2{0.0};  // exact for hull; NaN when no raster was requested
};

CoverageReport score_band(const PredictionBand& band, const Track& truth);

// One cell of the evaluation grid: a simulation config crossed with a band
// type, aggregated over the test storms.
struct GridCell {
  RegressionMode sim_mode{RegressionMode::kNonAr};
  LysisMode lysis_mode{LysisMode::kLogistic};
  BandMethod band_type{BandMethod::kKde};
  double median_pointwise{0.0};
  double uniform_proportion{0.0};
  std::size_t n_storms{0};    // storms scored
  std::size_t n_failures{0};  // storms skipped (degenerate geometry etc.)
};

struct EvaluationGrid {
  std::vector<CoverageReport> reports;  // storm-major, config x band within
  std::vector<GridCell> cells;          // all 16 combinations, fixed order
};

struct EvaluationOptions {
  double alpha{0.10};
  int n_sims{350};
  int max_steps{kDefaultMaxSteps};
  std::uint64_t seed{0};
  int threads{1};
  double area_resolution_km{0.0};  // 0 = skip rasterized areas (hull stays exact)
};

// For every test storm and every simulation config (mode x lysis), simulate
// an ensemble seeded from the storm's first observations, build all four
// bands, and score them against the storm. Per-storm failures are counted
// and excluded; the grid never aborts. Deterministic for a fixed seed: each
// storm/config pair derives its own stream, so results do not depend on
// thread count.
EvaluationGrid table1_grid(const std::vector<Track>& test,
                           const ModelBundle& models,
                           const EvaluationOptions& opt);

std::string coverage_csv(const std::vector<CoverageReport>& reports);
std::string grid_table(const EvaluationGrid& grid);  // fixed-width text

// ---------------------------------------------------------------------------
// Self-coverage calibration: simulate truth from the same generative model
// the bands are built from, so the nominal 1-alpha level is actually the
// right target.

struct CalibrationResult {
  BandMethod band_type{BandMethod::kKde};
  double alpha{0.0};
  std::size_t replicates{0};             // replicates scored (failures excluded)
  double uniform_coverage_rate{0.0};     // fraction with the whole track inside
  double pointwise_coverage_rate{0.0};   // mean pointwise capture
  std::size_t failures{0};
};

struct CalibrationOptions {
  RegressionMode sim_mode{RegressionMode::kAr};
  LysisMode lysis_mode{LysisMode::kLogistic};
  double alpha{0.10};
  int n_sims{350};
  std::size_t replicates{200};
  int max_steps{kDefaultMaxSteps};
  std::uint64_t master_seed{0};
  int threads{1};
};

// Per replicate: pick a seed storm from the pool, simulate n_sims + 1
// tracks, hold the last out as truth, build the four bands from the rest,
// score. Returns one aggregated result per band type.
std::vector<CalibrationResult> calibration_experiment(
    const ModelBundle& models, const std::vector<Track>& seed_pool,
    const CalibrationOptions& opt);

std::string calibration_csv(const std::vector<CalibrationResult>& results);

}  // namespace cyclone
