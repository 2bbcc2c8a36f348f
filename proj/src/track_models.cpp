#include "cyclone/track_models.hpp"

#include "cyclone/errors.hpp"

namespace cyclone {

std::size_t feature_count(RegressionMode mode) {
  return mode == RegressionMode::kAr ? 7 : 5;
}

Eigen::VectorXd feature_vector(const StepFeatures& f, RegressionMode mode) {
  Eigen::VectorXd x(feature_count(mode));
  x(0) = 1.0;
  x(1) = f.lat;
  x(2) = f.lon;
  x(3) = f.bearing;
  x(4) = f.speed;
  if (mode == RegressionMode::kAr) {
    x(5) = f.lag_dbearing.value();
    x(6) = f.lag_dspeed.value();
  }
  return x;
}

std::vector<DesignRow> build_design_rows(const Track& track,
                                         RegressionMode mode) {
  std::vector<DesignRow> rows;
  const auto& pts = track.points;
  const std::size_t n = pts.size();
  const std::size_t min_len = mode == RegressionMode::kAr ? 4 : 3;
  if (n < min_len) return rows;

  // bearing[i], speed[i]: motion from point i-1 into point i.
  std::vector<double> bearing(n, 0.0), speed(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const GeoPoint a = pts[i - 1].position();
    const GeoPoint b = pts[i].position();
    if (a.lat == b.lat && a.lon == b.lon) {
      // Stationary step: keep the previous heading so deltas stay defined.
      bearing[i] = bearing[i - 1];
      speed[i] = 0.0;
    } else {
      bearing[i] = initial_bearing(a, b);
      speed[i] = step_speed(a, b);
    }
  }

  const std::size_t first = mode == RegressionMode::kAr ? 2 : 1;
  for (std::size_t i = first; i + 1 < n; ++i) {
    DesignRow row;
    row.block = block_index(pts[i].position());
    row.features.lat = pts[i].lat;
    row.features.lon = pts[i].lon;
    row.features.bearing = bearing[i];
    row.features.speed = speed[i];
    if (mode == RegressionMode::kAr) {
      row.features.lag_dbearing = wrap_delta_bearing(bearing[i - 1], bearing[i]);
      row.features.lag_dspeed = speed[i] - speed[i - 1];
    }
    row.target_dbearing = wrap_delta_bearing(bearing[i], bearing[i + 1]);
    row.target_dspeed = speed[i + 1] - speed[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

LinearModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    double ridge) {
  if (X.rows() < 1 || X.rows() != y.size())
    throw std::invalid_argument("fit_ols: empty or mismatched system");

  LinearModel model;
  model.n_obs = static_cast<std::size_t>(X.rows());

  const auto solve_ridge = [&](double lambda) {
    Eigen::MatrixXd A = X.transpose() * X;
    for (Eigen::Index j = 1; j < A.cols(); ++j) A(j, j) += lambda;
    return Eigen::VectorXd(A.ldlt().solve(X.transpose() * y));
  };

  if (ridge > 0.0) {
    model.coefficients = solve_ridge(ridge);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) {
      model.coefficients = solve_ridge(1e-6);
      model.ridge_fallback = true;
    } else {
      model.coefficients = qr.solve(y);
    }
  }
  if (!model.coefficients.allFinite()) {
    model.coefficients = solve_ridge(ridge > 0.0 ? ridge * 10.0 : 1e-6);
    model.ridge_fallback = true;
  }

  const Eigen::VectorXd resid = y - X * model.coefficients;
  model.residual_pool.assign(resid.begin(), resid.end());
  return model;
}

namespace {

BlockModels fit_pair(const std::vector<const DesignRow*>& rows,
                     RegressionMode mode, double ridge) {
  const std::size_t p = feature_count(mode);
  Eigen::MatrixXd X(rows.size(), p);
  Eigen::VectorXd yb(rows.size()), ys(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X.row(i) = feature_vector(rows[i]->features, mode);
    yb(i) = rows[i]->target_dbearing;
    ys(i) = rows[i]->target_dspeed;
  }
  return BlockModels{fit_ols(X, yb, ridge), fit_ols(X, ys, ridge)};
}

}  // namespace

BlockRegression fit_block_models(const std::vector<Track>& train,
                                 RegressionMode mode,
                                 std::size_t min_block_obs, double ridge) {
  std::vector<DesignRow> all_rows;
  for (const Track& t : train) {
    auto rows = build_design_rows(t, mode);
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
  }
  if (all_rows.empty())
    throw DomainError("fit_block_models: no usable design rows in training set");

  std::map<BlockIndex, std::vector<const DesignRow*>> by_block;
  std::vector<const DesignRow*> global_rows;
  global_rows.reserve(all_rows.size());
  for (const DesignRow& r : all_rows) {
    by_block[r.block].push_back(&r);
    global_rows.push_back(&r);
  }

  BlockRegression model;
  model.mode = mode;
  model.global = fit_pair(global_rows, mode, ridge);
  for (const auto& [block, rows] : by_block) {
    if (rows.size() >= min_block_obs)
      model.per_block.emplace(block, fit_pair(rows, mode, ridge));
  }
  return model;
}

DeltaPrediction predict_deltas(const BlockRegression& model,
                               const StepFeatures& f, const GeoPoint& at,
                               RandomStream& rng) {
  const auto it = model.per_block.find(block_index(at));
  const BlockModels& m =
      it != model.per_block.end() ? it->second : model.global;

  const Eigen::VectorXd x = feature_vector(f, model.mode);
  const double db = m.bearing.predict(x) +
                    m.bearing.residual_pool[rng.uniform_index(
                        m.bearing.residual_pool.size())];
  const double ds = m.speed.predict(x) +
                    m.speed.residual_pool[rng.uniform_index(
                        m.speed.residual_pool.size())];
  return DeltaPrediction{wrap_delta_bearing(0.0, db), ds};
}

}  // namespace cyclone
