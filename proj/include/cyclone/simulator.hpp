#pragma once

#include <variant>
#include <vector>

#include "cyclone/lysis_models.hpp"
#include "cyclone/track.hpp"
#include "cyclone/track_models.hpp"

namespace cyclone {

enum class LysisMode { kLogistic, kKernel };

using LysisModel = std::variant<LogisticLysisModel, KernelLifespanModel>;

struct SimulationConfig {
  RegressionMode mode{RegressionMode::kAr};
  LysisMode lysis{LysisMode::kLogistic};
  int n_sims{350};
  int max_steps{kDefaultMaxSteps};
  std::uint64_t master_seed{0};
};

struct SimulationEnsemble {
  std::string seed_track_id;
  SimulationConfig config;
  std::vector<Track> tracks;                  // ordered by member index
  std::vector<std::uint64_t> per_track_seeds;
  std::vector<std::uint32_t> boundary_members;  // members stopped at lat 89
};

// The observed prefix every simulation starts from: two points (6 hours)
// for the non-AR model, three points (12 hours) for the AR model.
std::vector<TrackPoint> initial_points(const Track& track,
                                       RegressionMode mode);

// Propagate one stochastic path: draw (dbearing, dspeed), advance six hours
// along the great circle, repeat until lysis fires or max_steps. In kernel
// mode the lifespan is drawn up front; in logistic mode a Bernoulli death
// draw is evaluated at each newly generated point.
Track simulate_track(const std::vector<TrackPoint>& init,
                     const BlockRegression& models, const LysisModel& lysis,
                     const SimulationConfig& cfg, RandomStream& rng,
                     bool* boundary_lysis = nullptr);

// n_sims independent members; member i runs on its own stream seeded with
// mix_seed(master_seed, i), so the result is identical however the members
// are scheduled.
SimulationEnsemble simulate_ensemble(const Track& seed_track,
                                     const BlockRegression& models,
                                     const LysisModel& lysis,
                                     const SimulationConfig& cfg,
                                     int threads = 1);

}  // namespace cyclone
