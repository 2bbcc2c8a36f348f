#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cyclone {

// IUGG mean earth radius. All distances in this project are kilometers,
// speeds km/h, bearings degrees clockwise from true north.
inline constexpr double kEarthRadiusKm = 6371.0088;
inline constexpr double kSynopticHours = 6.0;

struct GeoPoint {
  double lat{0.0};  // decimal degrees, north positive, [-90, 90]
  double lon{0.0};  // decimal degrees, east positive, [-180, 180]
};

struct Kinematics {
  double bearing{0.0};  // degrees in [0, 360)
  double speed{0.0};    // km/h, >= 0
};

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

// Wrap a longitude into [-180, 180].
inline double normalize_lon(double lon) {
  lon = std::fmod(lon, 360.0);
  if (lon > 180.0) lon -= 360.0;
  if (lon < -180.0) lon += 360.0;
  return lon;
}

// Wrap a bearing into [0, 360).
inline double wrap_bearing(double deg) {
  deg = std::fmod(deg, 360.0);
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg = 0.0;
  return deg;
}

// Signed minimal angular difference next - prev, in (-180, 180].
inline double wrap_delta_bearing(double prev, double next) {
  double d = std::fmod(next - prev, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

// Great-circle distance via the haversine formula, in km.
inline double gc_distance(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dphi = deg2rad(b.lat - a.lat);
  const double dlam = deg2rad(b.lon - a.lon);
  const double sp = std::sin(dphi / 2.0);
  const double sl = std::sin(dlam / 2.0);
  double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  if (h > 1.0) h = 1.0;
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

// Initial great-circle bearing at a toward b, degrees in [0, 360).
// Undefined when the points coincide.
inline double initial_bearing(const GeoPoint& a, const GeoPoint& b) {
  if (a.lat == b.lat && a.lon == b.lon)
    throw std::invalid_argument("initial_bearing: coincident points");
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dlam = deg2rad(b.lon - a.lon);
  const double y = std::sin(dlam) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) -
                   std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
  return wrap_bearing(rad2deg(std::atan2(y, x)));
}

// Point reached traveling distance_km along the great circle leaving a
// with the given initial bearing. Longitude comes back in [-180, 180].
inline GeoPoint destination(const GeoPoint& a, double bearing_deg,
                            double distance_km) {
  if (distance_km == 0.0) return a;
  const double delta = distance_km / kEarthRadiusKm;  // angular distance
  const double theta = deg2rad(bearing_deg);
  const double phi1 = deg2rad(a.lat);
  const double lam1 = deg2rad(a.lon);
  const double sin_phi2 = std::sin(phi1) * std::cos(delta) +
                          std::cos(phi1) * std::sin(delta) * std::cos(theta);
  const double phi2 = std::asin(std::clamp(sin_phi2, -1.0, 1.0));
  const double lam2 =
      lam1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                        std::cos(delta) - std::sin(phi1) * sin_phi2);
  return GeoPoint{rad2deg(phi2), normalize_lon(rad2deg(lam2))};
}

// Translation speed between two consecutive synoptic observations, km/h.
inline double step_speed(const GeoPoint& a, const GeoPoint& b) {
  return gc_distance(a, b) / kSynopticHours;
}

}  // namespace cyclone
