#include "cyclone/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "cyclone/curve_depth.hpp"
#include "cyclone/errors.hpp"
#include "cyclone/parallel.hpp"
#include "cyclone/rng.hpp"

namespace cyclone {

namespace {

// Display order everywhere: uniform bands first, then the pointwise ones.
constexpr std::array<BandMethod, 4> kBandOrder{
    BandMethod::kDeltaBall, BandMethod::kHull, BandMethod::kKde,
    BandMethod::kSpherical};

// Simulation configs in table order: AR before non-AR, logistic before
// kernel within a mode.
struct SimConfigId {
  RegressionMode mode;
  LysisMode lysis;
};
constexpr std::array<SimConfigId, 4> kConfigOrder{
    SimConfigId{RegressionMode::kAr, LysisMode::kLogistic},
    SimConfigId{RegressionMode::kAr, LysisMode::kKernel},
    SimConfigId{RegressionMode::kNonAr, LysisMode::kLogistic},
    SimConfigId{RegressionMode::kNonAr, LysisMode::kKernel}};

const BlockRegression& regression_for(const ModelBundle& models,
                                      RegressionMode mode) {
  return mode == RegressionMode::kAr ? models.ar : models.nonar;
}

LysisModel lysis_for(const ModelBundle& models, LysisMode mode) {
  if (mode == LysisMode::kLogistic) return models.logistic;
  return models.kernel;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

CoverageReport score_band(const PredictionBand& band, const Track& truth) {
  if (truth.empty()) throw DomainError("score_band: empty truth track");
  std::size_t inside = 0;
  for (const TrackPoint& p : truth.points)
    if (band_contains(band, p.position())) ++inside;

  CoverageReport report;
  report.storm_id = truth.storm_id;
  report.band_type = static_cast<BandMethod>(band.index());
  report.pointwise_capture =
      static_cast<double>(inside) / static_cast<double>(truth.size());
  report.uniform_capture = inside == truth.size();
  report.area_km2 = std::holds_alternative<ConvexHullBand>(band)
                        ? std::get<ConvexHullBand>(band).area_km2()
                        : std::numeric_limits<double>::quiet_NaN();
  return report;
}

EvaluationGrid table1_grid(const std::vector<Track>& test,
                           const ModelBundle& models,
                           const EvaluationOptions& opt) {
  if (test.empty()) throw DomainError("table1_grid: empty test set");
  const std::size_t n_storms = test.size();
  const int threads = resolve_threads(opt.threads);

  // slot layout: storm-major, then config, then band
  std::vector<std::optional<CoverageReport>> slots(n_storms * 16);

  parallel_for(n_storms, threads, [&](std::size_t s) {
    const Track& truth = test[s];
    const std::uint64_t storm_seed = mix_seed(opt.seed, s);
    for (std::size_t c = 0; c < kConfigOrder.size(); ++c) {
      SimulationConfig cfg;
      cfg.mode = kConfigOrder[c].mode;
      cfg.lysis = kConfigOrder[c].lysis;
      cfg.n_sims = opt.n_sims;
      cfg.max_steps = opt.max_steps;
      cfg.master_seed = mix_seed(storm_seed, c);

      SimulationEnsemble ens;
      DepthRanking ranking;
      try {
        ens = simulate_ensemble(truth, regression_for(models, cfg.mode),
                                lysis_for(models, cfg.lysis), cfg, 1);
        ranking = metric_depth(distance_matrix(ens.tracks, 1));
      } catch (const DomainError&) {
        continue;  // all four bands of this config count as failed
      }

      for (std::size_t b = 0; b < kBandOrder.size(); ++b) {
        try {
          const PredictionBand band =
              build_band(kBandOrder[b], ens, ranking, opt.alpha);
          CoverageReport report = score_band(band, truth);
          report.sim_mode = cfg.mode;
          report.lysis_mode = cfg.lysis;
          if (opt.area_resolution_km > 0.0 &&
              !std::holds_alternative<ConvexHullBand>(band))
            report.area_km2 = band_area(band, opt.area_resolution_km, 1);
          slots[s * 16 + c * 4 + b] = std::move(report);
        } catch (const DomainError&) {
          // degenerate geometry for this storm; recorded via the failure count
        }
      }
    }
  });

  EvaluationGrid grid;
  for (const auto& slot : slots)
    if (slot) grid.reports.push_back(*slot);

  for (std::size_t c = 0; c < kConfigOrder.size(); ++c) {
    for (std::size_t b = 0; b < kBandOrder.size(); ++b) {
      GridCell cell;
      cell.sim_mode = kConfigOrder[c].mode;
      cell.lysis_mode = kConfigOrder[c].lysis;
      cell.band_type = kBandOrder[b];
      std::vector<double> pointwise;
      std::size_t uniform = 0;
      for (std::size_t s = 0; s < n_storms; ++s) {
        const auto& slot = slots[s * 16 + c * 4 + b];
        if (!slot) continue;
        pointwise.push_back(slot->pointwise_capture);
        if (slot->uniform_capture) ++uniform;
      }
      cell.n_storms = pointwise.size();
      cell.n_failures = n_storms - pointwise.size();
      cell.median_pointwise = median(std::move(pointwise));
      cell.uniform_proportion =
          cell.n_storms == 0 ? std::numeric_limits<double>::quiet_NaN()
                             : static_cast<double>(uniform) /
                                   static_cast<double>(cell.n_storms);
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

std::string coverage_csv(const std::vector<CoverageReport>& reports) {
  std::string out =
      "storm_id,sim_mode,lysis_mode,band,pointwise_capture,uniform_capture,"
      "area_km2\n";
  char buf[160];
  for (const CoverageReport& r : reports) {
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%.6f,%d,", r.storm_id.c_str(),
                  to_string(r.sim_mode).c_str(), to_string(r.lysis_mode).c_str(),
                  to_string(r.band_type).c_str(), r.pointwise_capture,
                  r.uniform_capture ? 1 : 0);
    out += buf;
    if (std::isfinite(r.area_km2)) {
      std::snprintf(buf, sizeof buf, "%.1f", r.area_km2);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string grid_table(const EvaluationGrid& grid) {
  // rows = band type, columns = simulation config, cells = median / uniform
  const auto cell_at = [&](std::size_t c, std::size_t b) -> const GridCell& {
    return grid.cells[c * 4 + b];
  };
  std::string out = "band        ";
  for (const SimConfigId& cfg : kConfigOrder) {
    char head[48];
    std::snprintf(head, sizeof head, "  %-14s",
                  (to_string(cfg.mode) + "+" + to_string(cfg.lysis)).c_str());
    out += head;
  }
  out += '\n';
  for (std::size_t b = 0; b < kBandOrder.size(); ++b) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-12s",
                  to_string(kBandOrder[b]).c_str());
    out += buf;
    for (std::size_t c = 0; c < kConfigOrder.size(); ++c) {
      const GridCell& cell = cell_at(c, b);
      std::snprintf(buf, sizeof buf, "  %4.2f / %4.2f  ",
                    cell.median_pointwise, cell.uniform_proportion);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::vector<CalibrationResult> calibration_experiment(
    const ModelBundle& models, const std::vector<Track>& seed_pool,
    const CalibrationOptions& opt) {
  if (seed_pool.empty())
    throw DomainError("calibration_experiment: empty seed pool");
  if (opt.replicates < 1)
    throw DomainError("calibration_experiment: need at least 1 replicate");
  const int threads = resolve_threads(opt.threads);

  struct ReplicateOutcome {
    std::array<std::optional<double>, 4> pointwise;  // by kBandOrder index
    std::array<bool, 4> uniform{};
  };
  std::vector<ReplicateOutcome> outcomes(opt.replicates);

  parallel_for(opt.replicates, threads, [&](std::size_t r) {
    const std::uint64_t seed_r = mix_seed(opt.master_seed, r);
    RandomStream pick(seed_r);
    const Track& storm = seed_pool[pick.uniform_index(seed_pool.size())];

    SimulationConfig cfg;
    cfg.mode = opt.sim_mode;
    cfg.lysis = opt.lysis_mode;
    cfg.n_sims = opt.n_sims + 1;  // the extra member becomes the truth
    cfg.max_steps = opt.max_steps;
    cfg.master_seed = seed_r;

    SimulationEnsemble ens;
    Track truth;
    DepthRanking ranking;
    try {
      ens = simulate_ensemble(storm, regression_for(models, cfg.mode),
                              lysis_for(models, cfg.lysis), cfg, 1);
      truth = std::move(ens.tracks.back());
      ens.tracks.pop_back();
      ens.config.n_sims -= 1;
      ranking = metric_depth(distance_matrix(ens.tracks, 1));
    } catch (const DomainError&) {
      return;  // whole replicate excluded for every band
    }

    for (std::size_t b = 0; b < kBandOrder.size(); ++b) {
      try {
        const PredictionBand band =
            build_band(kBandOrder[b], ens, ranking, opt.alpha);
        const CoverageReport report = score_band(band, truth);
        outcomes[r].pointwise[b] = report.pointwise_capture;
        outcomes[r].uniform[b] = report.uniform_capture;
      } catch (const DomainError&) {
      }
    }
  });

  std::vector<CalibrationResult> results;
  for (std::size_t b = 0; b < kBandOrder.size(); ++b) {
    CalibrationResult res;
    res.band_type = kBandOrder[b];
    res.alpha = opt.alpha;
    double pointwise_sum = 0.0;
    std::size_t scored = 0, uniform = 0;
    for (const ReplicateOutcome& o : outcomes) {
      if (!o.pointwise[b]) continue;
      ++scored;
      pointwise_sum += *o.pointwise[b];
      if (o.uniform[b]) ++uniform;
    }
    res.replicates = scored;
    res.failures = opt.replicates - scored;
    res.uniform_coverage_rate =
        scored == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(uniform) / static_cast<double>(scored);
    res.pointwise_coverage_rate =
        scored == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : pointwise_sum / static_cast<double>(scored);
    results.push_back(res);
  }
  return results;
}

std::string calibration_csv(const std::vector<CalibrationResult>& results) {
  std::string out =
      "band,alpha,replicates,uniform_coverage_rate,pointwise_coverage_rate,"
      "failures\n";
  char buf[160];
  for (const CalibrationResult& r : results) {
    std::snprintf(buf, sizeof buf, "%s,%.4f,%zu,%.6f,%.6f,%zu\n",
                  to_string(r.band_type).c_str(), r.alpha, r.replicates,
                  r.uniform_coverage_rate, r.pointwise_coverage_rate,
                  r.failures);
    out += buf;
  }
  return out;
}

}  // namespace cyclone
