#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <variant>
#include <vector>

#include "cyclone/curve_depth.hpp"
#include "cyclone/simulator.hpp"
#include "cyclone/track.hpp"

namespace cyclone {

// Local equirectangular projection centered on the ensemble centroid:
//   x = R cos(lat0) dlon pi/180,  y = R dlat pi/180   (km)
// Basin-scale bands tolerate the distortion; hulls and areas become
// well-defined planar objects. Great-circle distances are still used where
// a band is defined by true distances (delta, spherical radii).
struct PlanarProjection {
  double lat0{0.0};
  double lon0{0.0};

  std::array<double, 2> to_km(const GeoPoint& p) const {
    const double kx = kEarthRadiusKm * std::cos(deg2rad(lat0)) *
                      std::numbers::pi / 180.0;
    const double ky = kEarthRadiusKm * std::numbers::pi / 180.0;
    return {kx * normalize_lon(p.lon - lon0), ky * (p.lat - lat0)};
  }
  GeoPoint from_km(double x, double y) const {
    const double kx = kEarthRadiusKm * std::cos(deg2rad(lat0)) *
                      std::numbers::pi / 180.0;
    const double ky = kEarthRadiusKm * std::numbers::pi / 180.0;
    return GeoPoint{lat0 + y / ky, normalize_lon(lon0 + x / kx)};
  }
};

PlanarProjection make_projection(const std::vector<Track>& tracks);

// ---------------------------------------------------------------------------
// The four prediction band types. Each supports point membership and area.

// Pointwise: highest-density region of a product-Gaussian KDE over every
// simulated point; the band is {density >= threshold} with the threshold at
// the alpha-quantile of the densities of the sample points themselves.
struct KdeLevelSetBand {
  PlanarProjection proj;
  std::vector<double> sample_x, sample_y;  // projected sample points (km)
  double bandwidth_x{0.0}, bandwidth_y{0.0};
  double threshold{0.0};
  double alpha{0.0};

  double density(double x, double y) const;
  bool contains(const GeoPoint& q) const;
};

// Pointwise: per-step disks around the deepest curve sized to hold
// 100(1-alpha)% of the other alive curves' step-t points, swept into a tube
// by linearly interpolating centers and radii between consecutive steps.
struct SphericalTubeBand {
  PlanarProjection proj;
  Track center_path;
  std::vector<double> radii;            // km, one per center step
  std::vector<std::uint8_t> carried;    // 1 where no curve was alive at t
  double alpha{0.0};

  bool contains(const GeoPoint& q) const;
};

// Uniform: convex hull of every point of the deepest 100(1-alpha)% of
// curves, in projected km.
struct ConvexHullBand {
  PlanarProjection proj;
  std::vector<std::array<double, 2>> vertices;  // CCW, strictly convex
  double alpha{0.0};

  bool contains(const GeoPoint& q) const;
  double area_km2() const;  // exact shoelace
};

// Uniform: equal-radius balls on every point of the deepest curves, with
// the smallest common radius that leaves no ball isolated
// (delta = half the largest nearest-neighbor distance).
struct DeltaBallBand {
  PlanarProjection proj;
  std::vector<GeoPoint> centers;
  double delta{0.0};  // km
  double alpha{0.0};

  bool contains(const GeoPoint& q) const;

  // cached unit vectors, rebuilt on construction/load
  std::vector<std::array<double, 3>> center_units;
  void rebuild_cache();
};

using PredictionBand = std::variant<KdeLevelSetBand, SphericalTubeBand,
                                    ConvexHullBand, DeltaBallBand>;

enum class BandMethod { kKde, kSpherical, kHull, kDeltaBall };

KdeLevelSetBand band_kde(const SimulationEnsemble& ensemble, double alpha);
SphericalTubeBand band_spherical(const SimulationEnsemble& ensemble,
                                 const DepthRanking& ranking, double alpha);
ConvexHullBand band_convex_hull(const SimulationEnsemble& ensemble,
                                const DepthRanking& ranking, double alpha);
DeltaBallBand band_delta_ball(const SimulationEnsemble& ensemble,
                              const DepthRanking& ranking, double alpha);

PredictionBand build_band(BandMethod method, const SimulationEnsemble& ensemble,
                          const DepthRanking& ranking, double alpha);

bool band_contains(const PredictionBand& band, const GeoPoint& q);

// Membership sampled at cell centers of a square grid over the band's
// bounding box, padded by one radius / bandwidth / delta. Shared by area
// computation and the contour export.
struct RasterGrid {
  double xmin{0.0}, ymin{0.0};  // km, lower-left corner of cell (0, 0)
  double resolution_km{0.0};
  std::size_t nx{0}, ny{0};
  std::vector<std::uint8_t> cells;  // row-major, cells[j * nx + i]

  std::size_t count() const;
};

// Not defined for the convex hull band (its geometry is exact).
RasterGrid band_raster(const PredictionBand& band, double resolution_km,
                       int threads = 1);

// Convex hull: exact shoelace. Everything else: raster cell count times
// cell area.
double band_area(const PredictionBand& band, double resolution_km,
                 int threads = 1);

// Monotone-chain hull of planar points, CCW with collinear vertices pruned.
// Exposed for tests; returns fewer than 3 vertices on degenerate input.
std::vector<std::array<double, 2>> convex_hull(
    std::vector<std::array<double, 2>> points);

}  // namespace cyclone
