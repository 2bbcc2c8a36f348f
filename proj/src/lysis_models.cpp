#include "cyclone/lysis_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cyclone/errors.hpp"

namespace cyclone {

namespace {

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// One IRLS pass at a fixed ridge; returns true on convergence.
bool irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double ridge,
          Eigen::VectorXd& beta) {
  constexpr int kMaxIter = 50;
  constexpr double kTol = 1e-8;
  constexpr double kMuClip = 1e-10;

  const Eigen::Index p = X.cols();
  beta = Eigen::VectorXd::Zero(p);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd mu(eta.size()), w(eta.size()), z(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      mu(i) = std::clamp(logistic(eta(i)), kMuClip, 1.0 - kMuClip);
      w(i) = mu(i) * (1.0 - mu(i));
      z(i) = eta(i) + (y(i) - mu(i)) / w(i);
    }
    Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X;
    for (Eigen::Index j = 1; j < p; ++j) A(j, j) += ridge;
    const Eigen::VectorXd next =
        A.ldlt().solve(X.transpose() * (w.asDiagonal() * z));
    const double change = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    if (change < kTol) return true;
  }
  return false;
}

}  // namespace

Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, double ridge,
                             std::size_t* escalations) {
  if (X.rows() < 1 || X.rows() != y.size())
    throw std::invalid_argument("fit_logistic: empty or mismatched system");

  Eigen::VectorXd beta;
  double lambda = ridge;
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (irls(X, y, lambda, beta) && beta.allFinite()) return beta;
    lambda = lambda > 0.0 ? lambda * 10.0 : 1e-4;
    if (escalations) ++*escalations;
  }
  return beta;  // best effort after escalation; finite by the last ridge
}

namespace {

struct LysisRow {
  BlockIndex block;
  Eigen::VectorXd x;  // (1, lat, lon, bearing, speed)
  double label;
};

std::vector<LysisRow> lysis_rows(const std::vector<Track>& train) {
  std::vector<LysisRow> rows;
  for (const Track& t : train) {
    const auto& pts = t.points;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const GeoPoint a = pts[i - 1].position();
      const GeoPoint b = pts[i].position();
      LysisRow row;
      row.block = block_index(b);
      row.x = Eigen::VectorXd(5);
      row.x << 1.0, b.lat, b.lon,
          (a.lat == b.lat && a.lon == b.lon) ? 0.0 : initial_bearing(a, b),
          step_speed(a, b);
      row.label = (i + 1 == pts.size()) ? 1.0 : 0.0;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

Eigen::VectorXd fit_rows(const std::vector<const LysisRow*>& rows,
                         double ridge, std::size_t* escalations) {
  Eigen::MatrixXd X(rows.size(), 5);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X.row(i) = rows[i]->x;
    y(i) = rows[i]->label;
  }
  return fit_logistic(X, y, ridge, escalations);
}

}  // namespace

LogisticLysisModel fit_logistic_blocks(const std::vector<Track>& train,
                                       std::size_t min_block_obs,
                                       double ridge) {
  std::map<BlockIndex, std::vector<const LysisRow*>> by_block;
  const std::vector<LysisRow> rows = lysis_rows(train);
  if (rows.empty())
    throw DomainError("fit_logistic_blocks: no usable rows in training set");

  std::vector<const LysisRow*> all;
  all.reserve(rows.size());
  for (const LysisRow& r : rows) {
    by_block[r.block].push_back(&r);
    all.push_back(&r);
  }

  LogisticLysisModel model;
  model.ridge = ridge;
  model.global = fit_rows(all, ridge, &model.escalations);
  for (const auto& [block, block_rows] : by_block) {
    if (block_rows.size() < min_block_obs) continue;
    const auto positives =
        std::count_if(block_rows.begin(), block_rows.end(),
                      [](const LysisRow* r) { return r->label == 1.0; });
    if (positives == 0 ||
        positives == static_cast<std::ptrdiff_t>(block_rows.size()))
      continue;  // single-class block falls through to the global model
    model.per_block.emplace(block,
                            fit_rows(block_rows, ridge, &model.escalations));
  }
  return model;
}

double predict_death_prob(const LogisticLysisModel& model,
                          const StepFeatures& f, const GeoPoint& at) {
  const auto it = model.per_block.find(block_index(at));
  const Eigen::VectorXd& beta =
      it != model.per_block.end() ? it->second : model.global;
  Eigen::VectorXd x(5);
  x << 1.0, f.lat, f.lon, f.bearing, f.speed;
  return logistic(beta.dot(x));
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
  // Linear interpolation between order statistics (the common "type 7").
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

KernelLifespanModel fit_lifespan_kde(const std::vector<Track>& train) {
  if (train.size() < 2)
    throw DomainError("fit_lifespan_kde: need at least two training storms");

  KernelLifespanModel model;
  std::vector<double> values;
  for (const Track& t : train) {
    model.lifespans.push_back(static_cast<int>(t.size()));
    values.push_back(static_cast<double>(t.size()));
  }

  const double n = static_cast<double>(values.size());
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  std::sort(values.begin(), values.end());
  const double iqr =
      quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);

  const double spread = std::min(sd, iqr / 1.34);
  model.bandwidth =
      std::max(0.9 * spread * std::pow(n, -0.2), 0.5);
  return model;
}

int sample_lifespan(const KernelLifespanModel& model, RandomStream& rng,
                    int max_steps) {
  const std::size_t idx = rng.uniform_index(model.lifespans.size());
  const double v =
      static_cast<double>(model.lifespans[idx]) + model.bandwidth * rng.normal();
  const int steps = static_cast<int>(std::llround(v));
  return std::clamp(steps, static_cast<int>(kMinUsableTrackLength), max_steps);
}

}  // namespace cyclone
