#include "cyclone/simulator.hpp"

#include <cmath>

#include "cyclone/errors.hpp"
#include "cyclone/parallel.hpp"

namespace cyclone {

namespace {

constexpr double kPolarCutoffDeg = 89.0;
constexpr double kSpeedFloorKmh = 1.0;

struct MotionState {
  double bearing{0.0};
  double speed{0.0};
  double lag_dbearing{0.0};
  double lag_dspeed{0.0};
};

// Bearing/speed of the step into pts[i]; stationary steps keep the previous
// heading at speed zero.
void step_kinematics(const std::vector<TrackPoint>& pts, std::size_t i,
                     double prev_bearing, double& bearing, double& speed) {
  const GeoPoint a = pts[i - 1].position();
  const GeoPoint b = pts[i].position();
  if (a.lat == b.lat && a.lon == b.lon) {
    bearing = prev_bearing;
    speed = 0.0;
  } else {
    bearing = initial_bearing(a, b);
    speed = step_speed(a, b);
  }
}

MotionState observe_state(const std::vector<TrackPoint>& pts,
                          RegressionMode mode) {
  MotionState s;
  const std::size_t n = pts.size();
  if (mode == RegressionMode::kAr) {
    double b1 = 0.0, v1 = 0.0;
    step_kinematics(pts, n - 2, 0.0, b1, v1);
    step_kinematics(pts, n - 1, b1, s.bearing, s.speed);
    s.lag_dbearing = wrap_delta_bearing(b1, s.bearing);
    s.lag_dspeed = s.speed - v1;
  } else {
    step_kinematics(pts, n - 1, 0.0, s.bearing, s.speed);
  }
  return s;
}

}  // namespace

std::vector<TrackPoint> initial_points(const Track& track,
                                       RegressionMode mode) {
  const std::size_t need = mode == RegressionMode::kAr ? 3 : 2;
  if (track.size() < need)
    throw DomainError("initial_points: track " + track.storm_id + " has " +
                      std::to_string(track.size()) + " points, need " +
                      std::to_string(need));
  return std::vector<TrackPoint>(track.points.begin(),
                                 track.points.begin() + need);
}

Track simulate_track(const std::vector<TrackPoint>& init,
                     const BlockRegression& models, const LysisModel& lysis,
                     const SimulationConfig& cfg, RandomStream& rng,
                     bool* boundary_lysis) {
  const std::size_t need = models.mode == RegressionMode::kAr ? 3 : 2;
  if (init.size() < need)
    throw DomainError("simulate_track: initial points inconsistent with mode");
  if (boundary_lysis) *boundary_lysis = false;

  Track track;
  track.points = init;
  MotionState state = observe_state(track.points, models.mode);

  // Kernel lysis fixes the total length before propagation; the lifespan is
  // the random object.
  int lifespan = cfg.max_steps;
  const bool kernel_mode =
      std::holds_alternative<KernelLifespanModel>(lysis);
  if (kernel_mode)
    lifespan = sample_lifespan(std::get<KernelLifespanModel>(lysis), rng,
                               cfg.max_steps);

  const std::size_t cap =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.max_steps),
                            kernel_mode ? static_cast<std::size_t>(lifespan)
                                        : static_cast<std::size_t>(cfg.max_steps));

  while (track.points.size() < cap) {
    const TrackPoint& last = track.points.back();

    StepFeatures f;
    f.lat = last.lat;
    f.lon = last.lon;
    f.bearing = state.bearing;
    f.speed = state.speed;
    if (models.mode == RegressionMode::kAr) {
      f.lag_dbearing = state.lag_dbearing;
      f.lag_dspeed = state.lag_dspeed;
    }

    const DeltaPrediction d = predict_deltas(models, f, last.position(), rng);
    const double new_bearing = wrap_bearing(state.bearing + d.dbearing);
    const double new_speed =
        std::max(state.speed + d.dspeed, kSpeedFloorKmh);

    const GeoPoint next_pos =
        destination(last.position(), new_bearing, kSynopticHours * new_speed);
    if (std::abs(next_pos.lat) > kPolarCutoffDeg) {
      if (boundary_lysis) *boundary_lysis = true;
      break;
    }

    TrackPoint next;
    next.timestamp = last.timestamp + kSynopticStep;
    next.lat = next_pos.lat;
    next.lon = next_pos.lon;
    track.points.push_back(next);

    state.lag_dbearing = wrap_delta_bearing(state.bearing, new_bearing);
    state.lag_dspeed = new_speed - state.speed;
    state.bearing = new_bearing;
    state.speed = new_speed;

    if (!kernel_mode) {
      // Death evaluated at the newly generated point.
      StepFeatures nf;
      nf.lat = next.lat;
      nf.lon = next.lon;
      nf.bearing = new_bearing;
      nf.speed = new_speed;
      const double p = predict_death_prob(std::get<LogisticLysisModel>(lysis),
                                          nf, next_pos);
      if (rng.bernoulli(p)) break;
    }
  }
  return track;
}

SimulationEnsemble simulate_ensemble(const Track& seed_track,
                                     const BlockRegression& models,
                                     const LysisModel& lysis,
                                     const SimulationConfig& cfg,
                                     int threads) {
  if (cfg.n_sims < 1)
    throw DomainError("simulate_ensemble: n_sims must be at least 1");
  const std::vector<TrackPoint> init = initial_points(seed_track, models.mode);

  SimulationEnsemble ens;
  ens.seed_track_id = seed_track.storm_id;
  ens.config = cfg;
  ens.tracks.resize(cfg.n_sims);
  ens.per_track_seeds.resize(cfg.n_sims);
  std::vector<std::uint8_t> boundary(cfg.n_sims, 0);

  parallel_for(static_cast<std::size_t>(cfg.n_sims), threads,
               [&](std::size_t i) {
                 const std::uint64_t seed = mix_seed(cfg.master_seed, i);
                 RandomStream rng(seed);
                 bool hit = false;
                 Track t = simulate_track(init, models, lysis, cfg, rng, &hit);
                 t.storm_id = seed_track.storm_id;
                 t.name = "SIM" + std::to_string(i);
                 ens.tracks[i] = std::move(t);
                 ens.per_track_seeds[i] = seed;
                 boundary[i] = hit ? 1 : 0;
               });

  for (std::size_t i = 0; i < boundary.size(); ++i)
    if (boundary[i]) ens.boundary_members.push_back(static_cast<std::uint32_t>(i));
  return ens;
}

}  // namespace cyclone
