#include "cyclone/band_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cyclone/errors.hpp"
#include "cyclone/parallel.hpp"

namespace cyclone {

namespace {

constexpr double kMinPointsForKde = 10;

std::array<double, 3> unit_of(const GeoPoint& p) {
  const double phi = deg2rad(p.lat);
  const double lam = deg2rad(p.lon);
  return {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam),
          std::sin(phi)};
}

std::vector<GeoPoint> subset_points(const SimulationEnsemble& ensemble,
                                    const DepthRanking& ranking,
                                    double alpha) {
  std::vector<GeoPoint> pts;
  for (std::size_t idx : deepest_subset(ranking, alpha))
    for (const TrackPoint& p : ensemble.tracks[idx].points)
      pts.push_back(p.position());
  return pts;
}

double sample_sd(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / std::max(n - 1.0, 1.0));
}

}  // namespace

PlanarProjection make_projection(const std::vector<Track>& tracks) {
  double lat_sum = 0.0, lon_sum = 0.0;
  std::size_t n = 0;
  for (const Track& t : tracks)
    for (const TrackPoint& p : t.points) {
      lat_sum += p.lat;
      lon_sum += p.lon;
      ++n;
    }
  if (n == 0) throw DomainError("make_projection: no points");
  return PlanarProjection{lat_sum / static_cast<double>(n),
                          lon_sum / static_cast<double>(n)};
}

// --------------------------------------------------------------------------
// KDE level-set band

double KdeLevelSetBand::density(double x, double y) const {
  // Product-Gaussian mixture, truncated at six bandwidths per dimension
  // (relative tail below 1.6e-8).
  const double cx = 6.0 * bandwidth_x;
  const double cy = 6.0 * bandwidth_y;
  double sum = 0.0;
  for (std::size_t i = 0; i < sample_x.size(); ++i) {
    const double dx = x - sample_x[i];
    if (dx > cx || dx < -cx) continue;
    const double dy = y - sample_y[i];
    if (dy > cy || dy < -cy) continue;
    const double tx = dx / bandwidth_x;
    const double ty = dy / bandwidth_y;
    sum += std::exp(-0.5 * (tx * tx + ty * ty));
  }
  const double norm = 2.0 * std::numbers::pi * bandwidth_x * bandwidth_y *
                      static_cast<double>(sample_x.size());
  return sum / norm;
}

bool KdeLevelSetBand::contains(const GeoPoint& q) const {
  const auto [x, y] = proj.to_km(q);
  return density(x, y) >= threshold;
}

KdeLevelSetBand band_kde(const SimulationEnsemble& ensemble, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("band_kde: alpha must be in (0, 1)");

  KdeLevelSetBand band;
  band.alpha = alpha;
  band.proj = make_projection(ensemble.tracks);
  for (const Track& t : ensemble.tracks)
    for (const TrackPoint& p : t.points) {
      const auto [x, y] = band.proj.to_km(p.position());
      band.sample_x.push_back(x);
      band.sample_y.push_back(y);
    }
  const std::size_t n = band.sample_x.size();
  if (n < kMinPointsForKde)
    throw DomainError("band_kde: need at least 10 simulated points");

  // Bivariate Silverman: h_j = sd_j * n^(-1/6).
  const double factor = std::pow(static_cast<double>(n), -1.0 / 6.0);
  band.bandwidth_x = std::max(sample_sd(band.sample_x) * factor, 1e-9);
  band.bandwidth_y = std::max(sample_sd(band.sample_y) * factor, 1e-9);

  std::vector<double> dens(n);
  for (std::size_t i = 0; i < n; ++i)
    dens[i] = band.density(band.sample_x[i], band.sample_y[i]);
  std::vector<double> sorted = dens;
  std::sort(sorted.begin(), sorted.end());
  band.threshold = sorted[coverage_count(alpha, n) - 1];
  return band;
}

// --------------------------------------------------------------------------
// Spherical tube band

namespace {

// Distance surplus of q against the interpolated disk at parameter s.
double tube_gap(double ax, double ay, double bx, double by, double ra,
                double rb, double qx, double qy, double s) {
  const double x = ax + s * (bx - ax);
  const double y = ay + s * (by - ay);
  return std::hypot(qx - x, qy - y) - (ra + s * (rb - ra));
}

// The gap is convex in s (convex distance minus linear radius); ternary
// search over [0, 1] finds its minimum.
bool capsule_contains(double ax, double ay, double bx, double by, double ra,
                      double rb, double qx, double qy) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (tube_gap(ax, ay, bx, by, ra, rb, qx, qy, m1) <
        tube_gap(ax, ay, bx, by, ra, rb, qx, qy, m2))
      hi = m2;
    else
      lo = m1;
  }
  return tube_gap(ax, ay, bx, by, ra, rb, qx, qy, 0.5 * (lo + hi)) <= 1e-6;
}

}  // namespace

bool SphericalTubeBand::contains(const GeoPoint& q) const {
  const auto [qx, qy] = proj.to_km(q);
  std::vector<std::array<double, 2>> c(center_path.size());
  for (std::size_t t = 0; t < center_path.size(); ++t)
    c[t] = proj.to_km(center_path.points[t].position());

  if (center_path.size() == 1)
    return std::hypot(qx - c[0][0], qy - c[0][1]) <= radii[0] + 1e-6;

  for (std::size_t t = 0; t + 1 < center_path.size(); ++t) {
    // quick reject on the segment's inflated bounding box
    const double rmax = std::max(radii[t], radii[t + 1]) + 1e-6;
    if (qx < std::min(c[t][0], c[t + 1][0]) - rmax ||
        qx > std::max(c[t][0], c[t + 1][0]) + rmax ||
        qy < std::min(c[t][1], c[t + 1][1]) - rmax ||
        qy > std::max(c[t][1], c[t + 1][1]) + rmax)
      continue;
    if (capsule_contains(c[t][0], c[t][1], c[t + 1][0], c[t + 1][1], radii[t],
                         radii[t + 1], qx, qy))
      return true;
  }
  return false;
}

SphericalTubeBand band_spherical(const SimulationEnsemble& ensemble,
                                 const DepthRanking& ranking, double alpha) {
  if (ensemble.tracks.size() < 3)
    throw DomainError("band_spherical: need at least 3 ensemble members");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("band_spherical: alpha must be in (0, 1)");

  SphericalTubeBand band;
  band.alpha = alpha;
  band.proj = make_projection(ensemble.tracks);
  const std::size_t center_idx = ranking.order.front();
  band.center_path = ensemble.tracks[center_idx];

  const std::size_t len = band.center_path.size();
  band.radii.assign(len, 0.0);
  band.carried.assign(len, 0);
  for (std::size_t t = 0; t < len; ++t) {
    const GeoPoint c = band.center_path.points[t].position();
    std::vector<double> dists;
    for (std::size_t m = 0; m < ensemble.tracks.size(); ++m) {
      if (m == center_idx) continue;
      const Track& other = ensemble.tracks[m];
      if (other.size() <= t) continue;  // curve already dead at t
      dists.push_back(gc_distance(c, other.points[t].position()));
    }
    if (dists.empty()) {
      band.radii[t] = t > 0 ? band.radii[t - 1] : 0.0;
      band.carried[t] = 1;
      continue;
    }
    const std::size_t k = coverage_count(1.0 - alpha, dists.size());
    std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
    band.radii[t] = dists[k - 1];
  }
  return band;
}

// --------------------------------------------------------------------------
// Convex hull band

std::vector<std::array<double, 2>> convex_hull(
    std::vector<std::array<double, 2>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;

  const auto cross = [](const std::array<double, 2>& o,
                        const std::array<double, 2>& a,
                        const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };

  std::vector<std::array<double, 2>> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {  // lower
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = n - 1; i-- > 0;) {  // upper
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);  // last point repeats the first
  return hull;
}

bool ConvexHullBand::contains(const GeoPoint& q) const {
  const auto [x, y] = proj.to_km(q);
  double scale = 1.0;
  for (const auto& v : vertices)
    scale = std::max({scale, std::abs(v[0]), std::abs(v[1])});
  const double eps = 1e-9 * scale * scale;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % vertices.size()];
    const double cross =
        (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]);
    if (cross < -eps) return false;
  }
  return true;
}

double ConvexHullBand::area_km2() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& a = vertices[i];
    const auto& b = vertices[(i + 1) % vertices.size()];
    twice += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * std::abs(twice);
}

ConvexHullBand band_convex_hull(const SimulationEnsemble& ensemble,
                                const DepthRanking& ranking, double alpha) {
  ConvexHullBand band;
  band.alpha = alpha;
  band.proj = make_projection(ensemble.tracks);
  std::vector<std::array<double, 2>> pts;
  for (const GeoPoint& p : subset_points(ensemble, ranking, alpha))
    pts.push_back(band.proj.to_km(p));
  band.vertices = convex_hull(std::move(pts));
  if (band.vertices.size() < 3)
    throw DomainError("band_convex_hull: deepest-subset points are collinear");
  return band;
}

// --------------------------------------------------------------------------
// Delta-ball band

void DeltaBallBand::rebuild_cache() {
  center_units.resize(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i)
    center_units[i] = unit_of(centers[i]);
}

bool DeltaBallBand::contains(const GeoPoint& q) const {
  // Membership by true great-circle distance; a 1e-7 rad slack (~0.6 m)
  // absorbs unit-vector rounding so centers themselves always pass.
  const auto u = unit_of(q);
  const double cos_thresh =
      std::cos(std::min(delta / kEarthRadiusKm + 1e-7, std::numbers::pi));
  for (const auto& c : center_units) {
    const double dot = u[0] * c[0] + u[1] * c[1] + u[2] * c[2];
    if (dot >= cos_thresh) return true;
  }
  return false;
}

DeltaBallBand band_delta_ball(const SimulationEnsemble& ensemble,
                              const DepthRanking& ranking, double alpha) {
  DeltaBallBand band;
  band.alpha = alpha;
  band.proj = make_projection(ensemble.tracks);
  band.centers = subset_points(ensemble, ranking, alpha);
  if (band.centers.size() < 2)
    throw DomainError("band_delta_ball: need at least 2 centers");
  band.rebuild_cache();

  // delta = half the largest nearest-neighbor distance: the smallest common
  // radius at which every ball intersects at least one other.
  double worst_dot = 1.0;  // largest NN angle == smallest NN max-dot
  const auto& units = band.center_units;
  for (std::size_t i = 0; i < units.size(); ++i) {
    double best = -1.0;
    for (std::size_t j = 0; j < units.size(); ++j) {
      if (j == i) continue;
      const double dot = units[i][0] * units[j][0] +
                         units[i][1] * units[j][1] +
                         units[i][2] * units[j][2];
      if (dot > best) best = dot;
    }
    worst_dot = std::min(worst_dot, best);
  }
  band.delta = 0.5 * kEarthRadiusKm *
               std::acos(std::clamp(worst_dot, -1.0, 1.0));
  return band;
}

// --------------------------------------------------------------------------
// Shared dispatch

PredictionBand build_band(BandMethod method, const SimulationEnsemble& ensemble,
                          const DepthRanking& ranking, double alpha) {
  switch (method) {
    case BandMethod::kKde:
      return band_kde(ensemble, alpha);
    case BandMethod::kSpherical:
      return band_spherical(ensemble, ranking, alpha);
    case BandMethod::kHull:
      return band_convex_hull(ensemble, ranking, alpha);
    case BandMethod::kDeltaBall:
      return band_delta_ball(ensemble, ranking, alpha);
  }
  throw std::logic_error("build_band: unknown method");
}

bool band_contains(const PredictionBand& band, const GeoPoint& q) {
  return std::visit([&](const auto& b) { return b.contains(q); }, band);
}

namespace {

struct Bbox {
  double xmin{0.0}, xmax{0.0}, ymin{0.0}, ymax{0.0};
};

Bbox points_bbox(const std::vector<double>& xs, const std::vector<double>& ys) {
  Bbox b;
  b.xmin = *std::min_element(xs.begin(), xs.end());
  b.xmax = *std::max_element(xs.begin(), xs.end());
  b.ymin = *std::min_element(ys.begin(), ys.end());
  b.ymax = *std::max_element(ys.begin(), ys.end());
  return b;
}

// Pad for bands defined by great-circle distance: the equirectangular
// x-extent of a gc disk grows by cos(lat0)/cos(lat), so double the pad in x.
Bbox padded(const Bbox& b, double pad_x, double pad_y) {
  return Bbox{b.xmin - pad_x, b.xmax + pad_x, b.ymin - pad_y, b.ymax + pad_y};
}

template <typename Contains>
RasterGrid fill_grid(const PlanarProjection& proj, const Bbox& box,
                     double resolution_km, int threads, Contains&& contains) {
  RasterGrid grid;
  grid.resolution_km = resolution_km;
  grid.xmin = box.xmin;
  grid.ymin = box.ymin;
  grid.nx = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil((box.xmax - box.xmin) / resolution_km)));
  grid.ny = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil((box.ymax - box.ymin) / resolution_km)));
  grid.cells.assign(grid.nx * grid.ny, 0);

  parallel_for(grid.ny, threads, [&](std::size_t j) {
    const double y = box.ymin + (static_cast<double>(j) + 0.5) * resolution_km;
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const double x =
          box.xmin + (static_cast<double>(i) + 0.5) * resolution_km;
      if (contains(proj.from_km(x, y))) grid.cells[j * grid.nx + i] = 1;
    }
  });
  return grid;
}

}  // namespace

std::size_t RasterGrid::count() const {
  return static_cast<std::size_t>(
      std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

RasterGrid band_raster(const PredictionBand& band, double resolution_km,
                       int threads) {
  if (resolution_km <= 0.0)
    throw std::invalid_argument("band_raster: resolution must be positive");

  if (const auto* kde = std::get_if<KdeLevelSetBand>(&band)) {
    Bbox box = padded(points_bbox(kde->sample_x, kde->sample_y),
                      kde->bandwidth_x, kde->bandwidth_y);
    return fill_grid(kde->proj, box, resolution_km, threads,
                     [&](const GeoPoint& q) { return kde->contains(q); });
  }
  if (const auto* tube = std::get_if<SphericalTubeBand>(&band)) {
    std::vector<double> xs, ys;
    for (const TrackPoint& p : tube->center_path.points) {
      const auto [x, y] = tube->proj.to_km(p.position());
      xs.push_back(x);
      ys.push_back(y);
    }
    const double rmax =
        tube->radii.empty()
            ? 0.0
            : *std::max_element(tube->radii.begin(), tube->radii.end());
    Bbox box = padded(points_bbox(xs, ys), 2.0 * rmax + resolution_km,
                      rmax + resolution_km);
    return fill_grid(tube->proj, box, resolution_km, threads,
                     [&](const GeoPoint& q) { return tube->contains(q); });
  }
  if (const auto* ball = std::get_if<DeltaBallBand>(&band)) {
    std::vector<double> xs, ys;
    for (const GeoPoint& p : ball->centers) {
      const auto [x, y] = ball->proj.to_km(p);
      xs.push_back(x);
      ys.push_back(y);
    }
    Bbox box = padded(points_bbox(xs, ys), 2.0 * ball->delta + resolution_km,
                      ball->delta + resolution_km);
    return fill_grid(ball->proj, box, resolution_km, threads,
                     [&](const GeoPoint& q) { return ball->contains(q); });
  }
  throw std::invalid_argument("band_raster: hull band has exact geometry");
}

double band_area(const PredictionBand& band, double resolution_km,
                 int threads) {
  if (std::holds_alternative<ConvexHullBand>(band))
    return std::get<ConvexHullBand>(band).area_km2();
  const RasterGrid grid = band_raster(band, resolution_km, threads);
  return static_cast<double>(grid.count()) * resolution_km * resolution_km;
}

}  // namespace cyclone
