#pragma once

#include <Eigen/Dense>
#include <compare>
#include <map>
#include <optional>
#include <vector>

#include "cyclone/rng.hpp"
#include "cyclone/track.hpp"

namespace cyclone {

// 10-degree latitude-longitude square holding its own regression
// coefficients. The square for (lat_band, lon_band) is
// [10*lat_band, 10*lat_band+10) x [10*lon_band, 10*lon_band+10).
struct BlockIndex {
  int lat_band{0};
  int lon_band{0};
  auto operator<=>(const BlockIndex&) const = default;
};

inline BlockIndex block_index(const GeoPoint& p) {
  return BlockIndex{static_cast<int>(std::floor(p.lat / 10.0)),
                    static_cast<int>(std::floor(p.lon / 10.0))};
}

enum class RegressionMode { kNonAr, kAr };

// Per-step predictors: position, bearing and speed into the step; AR rows
// additionally carry the previous step's deltas.
struct StepFeatures {
  double lat{0.0};
  double lon{0.0};
  double bearing{0.0};  // degrees [0, 360)
  double speed{0.0};    // km/h
  std::optional<double> lag_dbearing;  // degrees (-180, 180], AR only
  std::optional<double> lag_dspeed;    // km/h, AR only
};

struct DesignRow {
  BlockIndex block;
  StepFeatures features;
  double target_dbearing{0.0};  // wrapped change into the next step
  double target_dspeed{0.0};
};

// Feature vector with leading intercept 1, in the fixed order
// [1, lat, lon, bearing, speed (, lag_dbearing, lag_dspeed)].
Eigen::VectorXd feature_vector(const StepFeatures& f, RegressionMode mode);
std::size_t feature_count(RegressionMode mode);  // including intercept

// One design row per predictable step. Bearings/speeds come from
// consecutive points; targets are the wrapped delta-bearing and the
// delta-speed into the following step. Tracks too short yield no rows.
std::vector<DesignRow> build_design_rows(const Track& track,
                                         RegressionMode mode);

struct LinearModel {
  Eigen::VectorXd coefficients;       // intercept first
  std::vector<double> residual_pool;  // observed y - X beta, one per row
  std::size_t n_obs{0};
  bool ridge_fallback{false};  // rank-deficient fit retried with ridge 1e-6

  double predict(const Eigen::VectorXd& x) const {
    return coefficients.dot(x);
  }
};

// Least squares with an optional ridge penalty on everything but the
// intercept. A rank-deficient system at ridge 0 is refit with ridge 1e-6
// and flagged.
LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    double ridge);

struct BlockModels {
  LinearModel bearing;
  LinearModel speed;
};

struct BlockRegression {
  RegressionMode mode{RegressionMode::kNonAr};
  std::map<BlockIndex, BlockModels> per_block;
  BlockModels global;  // fit on all rows; fallback for sparse blocks
};

// Pool design rows from all training tracks by block; blocks with at least
// min_block_obs rows get their own models, everything else resolves to the
// global fit.
BlockRegression fit_block_models(const std::vector<Track>& train,
                                 RegressionMode mode,
                                 std::size_t min_block_obs,
                                 double ridge = 0.0);

struct DeltaPrediction {
  double dbearing{0.0};  // degrees (-180, 180]
  double dspeed{0.0};    // km/h
};

// Linear prediction from the block containing `at` (global fallback) plus
// one residual drawn uniformly from that model's pool. Draw order is fixed:
// bearing residual first, then speed.
DeltaPrediction predict_deltas(const BlockRegression& model,
                               const StepFeatures& f, const GeoPoint& at,
                               RandomStream& rng);

}  // namespace cyclone
