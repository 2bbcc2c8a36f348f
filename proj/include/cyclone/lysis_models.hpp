#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "cyclone/rng.hpp"
#include "cyclone/track.hpp"
#include "cyclone/track_models.hpp"

namespace cyclone {

// Block-specific logistic regression for storm death. Coefficients are in
// the fixed order (intercept, lat, lon, bearing, speed).
struct LogisticLysisModel {
  std::map<BlockIndex, Eigen::VectorXd> per_block;
  Eigen::VectorXd global;
  double ridge{1e-4};
  std::size_t escalations{0};  // fits that needed the ridge*10 retry
};

// Kernel-density lifespan sampler over observed storm lengths, counted in
// points (6-hour steps) from genesis to lysis.
struct KernelLifespanModel {
  std::vector<int> lifespans;
  double bandwidth{0.5};  // in step units
};

inline constexpr int kDefaultMaxSteps = 120;  // 30 days
inline constexpr double kDefaultLogisticRidge = 1e-4;

// Penalized logistic fit via IRLS (max 50 iterations, converged when no
// coefficient moves more than 1e-8). The intercept is not penalized.
// Non-convergence retries with ridge*10, counted in *escalations.
Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& X,
                             const Eigen::VectorXd& y, double ridge,
                             std::size_t* escalations = nullptr);

// Label every observed step 0 except each storm's final point (1); fit
// per-block models where a block has at least min_block_obs rows and both
// classes, global fallback otherwise.
LogisticLysisModel fit_logistic_blocks(const std::vector<Track>& train,
                                       std::size_t min_block_obs,
                                       double ridge = kDefaultLogisticRidge);

double predict_death_prob(const LogisticLysisModel& model,
                          const StepFeatures& f, const GeoPoint& at);

// Bandwidth by Silverman's rule 0.9*min(sd, IQR/1.34)*n^(-1/5), floored at
// half a step so a degenerate spread still smooths.
KernelLifespanModel fit_lifespan_kde(const std::vector<Track>& train);

// Smoothed bootstrap: one stored lifespan + Gaussian jitter * bandwidth,
// rounded and clamped to [kMinUsableTrackLength, max_steps]. Equivalent to
// sampling from the Gaussian-kernel KDE.
int sample_lifespan(const KernelLifespanModel& model, RandomStream& rng,
                    int max_steps = kDefaultMaxSteps);

}  // namespace cyclone
