#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cyclone/errors.hpp"
#include "cyclone/evaluation.hpp"
#include "cyclone/rng.hpp"

using namespace cyclone;

namespace {

Track make_track(const std::string& id,
                 const std::vector<std::pair<double, double>>& latlon) {
  Track t;
  t.storm_id = id;
  for (std::size_t i = 0; i < latlon.size(); ++i)
    t.points.push_back(TrackPoint{TimePoint{} + i * kSynopticStep,
                                  latlon[i].first, latlon[i].second});
  return t;
}

std::vector<Track> training_tracks() {
  RandomStream rng(91);
  std::vector<Track> tracks;
  for (int m = 0; m < 14; ++m) {
    std::vector<std::pair<double, double>> pts;
    double lat = 12.0 + rng.uniform(0, 6), lon = -50.0 + rng.uniform(-6, 6);
    const std::size_t len = 5 + rng.uniform_index(6);
    for (std::size_t t = 0; t < len; ++t) {
      pts.emplace_back(lat, lon);
      lat += 0.4 + rng.uniform(-0.2, 0.2);
      lon += -0.5 + rng.uniform(-0.3, 0.3);
    }
    tracks.push_back(make_track("AL" + std::to_string(10 + m) + "2001", pts));
  }
  return tracks;
}

ModelBundle trained_bundle() {
  const std::vector<Track> train = training_tracks();
  ModelBundle bundle;
  bundle.min_block_obs = 5;
  bundle.nonar = fit_block_models(train, RegressionMode::kNonAr, 5);
  bundle.ar = fit_block_models(train, RegressionMode::kAr, 5);
  bundle.logistic = fit_logistic_blocks(train, 5);
  bundle.kernel = fit_lifespan_kde(train);
  return bundle;
}

DeltaBallBand disk_at(double lat, double lon, double radius_km) {
  DeltaBallBand b;
  b.proj = PlanarProjection{lat, lon};
  b.centers = {GeoPoint{lat, lon}};
  b.delta = radius_km;
  b.alpha = 0.1;
  b.rebuild_cache();
  return b;
}

double deg_of_km(double km) {
  return km / kEarthRadiusKm * 180.0 / std::numbers::pi;
}

}  // namespace

TEST_CASE("score_band counts the captured truth points") {
  const PredictionBand disk = disk_at(0.0, 0.0, 100.0);

  SUBCASE("everything inside") {
    const Track truth = make_track(
        "AL012001", {{0.0, 0.0}, {0.0, deg_of_km(50.0)}, {deg_of_km(80.0), 0.0}});
    const CoverageReport r = score_band(disk, truth);
    CHECK(r.pointwise_capture == 1.0);
    CHECK(r.uniform_capture);
    CHECK(r.band_type == BandMethod::kDeltaBall);
    CHECK(std::isnan(r.area_km2));  // no raster requested
  }
  SUBCASE("nine of ten inside") {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 9; ++i) pts.emplace_back(0.0, deg_of_km(10.0 * i));
    pts.emplace_back(0.0, deg_of_km(200.0));  // the stray
    const CoverageReport r = score_band(disk, make_track("AL022001", pts));
    CHECK(r.pointwise_capture == doctest::Approx(0.9));
    CHECK_FALSE(r.uniform_capture);
  }
  SUBCASE("empty truth is refused") {
    CHECK_THROWS_AS((void)score_band(disk, Track{}), DomainError);
  }
}

TEST_CASE("an ensemble of truth copies captures the truth entirely") {
  const Track truth = make_track(
      "AL032001", {{10, -40}, {10.5, -41}, {11.2, -41.8}, {11.6, -42.9}});
  SimulationEnsemble ens;
  ens.seed_track_id = truth.storm_id;
  for (int i = 0; i < 5; ++i) ens.tracks.push_back(truth);
  DepthRanking ranking;
  ranking.depths.assign(5, 0.0);
  ranking.order = {0, 1, 2, 3, 4};

  const PredictionBand hull =
      build_band(BandMethod::kHull, ens, ranking, 0.10);
  CHECK(score_band(hull, truth).pointwise_capture == 1.0);
  const PredictionBand ball =
      build_band(BandMethod::kDeltaBall, ens, ranking, 0.10);
  CHECK(score_band(ball, truth).pointwise_capture == 1.0);
}

TEST_CASE("hull capture grows as alpha shrinks") {
  RandomStream rng(92);
  SimulationEnsemble ens;
  ens.seed_track_id = "AL042001";
  for (int m = 0; m < 20; ++m) {
    std::vector<std::pair<double, double>> pts;
    double lat = 15.0, lon = -50.0;
    for (int t = 0; t < 6; ++t) {
      pts.emplace_back(lat, lon);
      lat += 0.4 + rng.uniform(-0.3, 0.3);
      lon += -0.4 + rng.uniform(-0.3, 0.3);
    }
    ens.tracks.push_back(make_track("AL042001", pts));
  }
  const DepthRanking ranking = metric_depth(distance_matrix(ens.tracks));

  std::vector<std::pair<double, double>> tp;
  double lat = 15.2, lon = -50.1;
  for (int t = 0; t < 6; ++t) {
    tp.emplace_back(lat, lon);
    lat += 0.4 + rng.uniform(-0.4, 0.4);
    lon += -0.4 + rng.uniform(-0.4, 0.4);
  }
  const Track truth = make_track("AL042001", tp);

  const auto capture = [&](double alpha) {
    return score_band(build_band(BandMethod::kHull, ens, ranking, alpha),
                      truth)
        .pointwise_capture;
  };
  CHECK(capture(0.05) >= capture(0.45));
}

TEST_CASE("the evaluation grid is complete, ordered and deterministic") {
  const ModelBundle bundle = trained_bundle();
  std::vector<Track> test;
  test.push_back(make_track(
      "AL902001", {{14, -48}, {14.5, -48.6}, {15.1, -49.0}, {15.8, -49.5},
                   {16.2, -50.1}, {16.9, -50.8}}));
  test.push_back(make_track(
      "AL912001", {{13, -46}, {13.4, -46.4}, {13.9, -47.0}, {14.3, -47.7},
                   {14.9, -48.1}}));

  EvaluationOptions opt;
  opt.n_sims = 30;
  opt.max_steps = 15;
  opt.seed = 5;

  const EvaluationGrid grid = table1_grid(test, bundle, opt);
  REQUIRE(grid.cells.size() == 16);
  REQUIRE(grid.reports.size() == 2 * 16);

  // row-major over configs, bands within; storms outermost
  const BandMethod band_order[4] = {BandMethod::kDeltaBall, BandMethod::kHull,
                                    BandMethod::kKde, BandMethod::kSpherical};
  const std::pair<RegressionMode, LysisMode> config_order[4] = {
      {RegressionMode::kAr, LysisMode::kLogistic},
      {RegressionMode::kAr, LysisMode::kKernel},
      {RegressionMode::kNonAr, LysisMode::kLogistic},
      {RegressionMode::kNonAr, LysisMode::kKernel}};
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t b = 0; b < 4; ++b) {
        const CoverageReport& r = grid.reports[s * 16 + c * 4 + b];
        CHECK(r.storm_id == test[s].storm_id);
        CHECK(r.sim_mode == config_order[c].first);
        CHECK(r.lysis_mode == config_order[c].second);
        CHECK(r.band_type == band_order[b]);
        CHECK(r.pointwise_capture >= 0.0);
        CHECK(r.pointwise_capture <= 1.0);
      }
  for (const GridCell& cell : grid.cells) {
    CHECK(cell.n_storms + cell.n_failures == 2);
    CHECK(cell.uniform_proportion >= 0.0);
    CHECK(cell.uniform_proportion <= 1.0);
  }

  const EvaluationGrid again = table1_grid(test, bundle, opt);
  for (std::size_t i = 0; i < grid.reports.size(); ++i) {
    CHECK(again.reports[i].pointwise_capture ==
          grid.reports[i].pointwise_capture);
    CHECK(again.reports[i].uniform_capture == grid.reports[i].uniform_capture);
  }
  EvaluationOptions threaded = opt;
  threaded.threads = 4;
  const EvaluationGrid par = table1_grid(test, bundle, threaded);
  for (std::size_t i = 0; i < grid.reports.size(); ++i)
    CHECK(par.reports[i].pointwise_capture ==
          grid.reports[i].pointwise_capture);

  const std::string csv = coverage_csv(grid.reports);
  CHECK(csv.rfind("storm_id,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<std::ptrdiff_t>(grid.reports.size()) + 1);
  const std::string table = grid_table(grid);
  CHECK(table.find("delta-ball") != std::string::npos);
  CHECK(table.find("ar+logistic") != std::string::npos);
}

TEST_CASE("storms too short for a mode are counted as failures") {
  const ModelBundle bundle = trained_bundle();
  std::vector<Track> test;
  test.push_back(
      make_track("AL922001", {{14, -48}, {14.5, -48.6}}));  // 2 points

  EvaluationOptions opt;
  opt.n_sims = 25;
  opt.max_steps = 12;
  opt.seed = 6;
  const EvaluationGrid grid = table1_grid(test, bundle, opt);
  for (const GridCell& cell : grid.cells) {
    if (cell.sim_mode == RegressionMode::kAr) {
      // three observed points are needed to start an AR simulation
      CHECK(cell.n_storms == 0);
      CHECK(cell.n_failures == 1);
    } else {
      CHECK(cell.n_storms == 1);
      CHECK(cell.n_failures == 0);
    }
  }

  CHECK_THROWS_AS((void)table1_grid({}, bundle, opt), DomainError);
}

TEST_CASE("calibration rates are reproducible and sane") {
  const ModelBundle bundle = trained_bundle();
  const std::vector<Track> pool = training_tracks();

  CalibrationOptions opt;
  opt.sim_mode = RegressionMode::kNonAr;
  opt.lysis_mode = LysisMode::kLogistic;
  opt.alpha = 0.10;
  opt.n_sims = 25;
  opt.replicates = 12;
  opt.max_steps = 15;
  opt.master_seed = 31;

  const auto results = calibration_experiment(bundle, pool, opt);
  REQUIRE(results.size() == 4);
  CHECK(results[0].band_type == BandMethod::kDeltaBall);
  CHECK(results[1].band_type == BandMethod::kHull);
  CHECK(results[2].band_type == BandMethod::kKde);
  CHECK(results[3].band_type == BandMethod::kSpherical);
  for (const CalibrationResult& r : results) {
    CHECK(r.alpha == 0.10);
    CHECK(r.replicates + r.failures == 12);
    CHECK(r.uniform_coverage_rate >= 0.0);
    CHECK(r.uniform_coverage_rate <= 1.0);
    CHECK(r.pointwise_coverage_rate >= 0.0);
    CHECK(r.pointwise_coverage_rate <= 1.0);
  }

  const auto again = calibration_experiment(bundle, pool, opt);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(again[i].uniform_coverage_rate == results[i].uniform_coverage_rate);
    CHECK(again[i].pointwise_coverage_rate ==
          results[i].pointwise_coverage_rate);
  }
  CalibrationOptions threaded = opt;
  threaded.threads = 4;
  const auto par = calibration_experiment(bundle, pool, threaded);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(par[i].uniform_coverage_rate == results[i].uniform_coverage_rate);

  const std::string csv = calibration_csv(results);
  CHECK(csv.rfind("band,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  CHECK_THROWS_AS((void)calibration_experiment(bundle, {}, opt), DomainError);
  CalibrationOptions none = opt;
  none.replicates = 0;
  CHECK_THROWS_AS((void)calibration_experiment(bundle, pool, none),
                  DomainError);
}
