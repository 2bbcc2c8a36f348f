#include "cyclone/curve_depth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cyclone/errors.hpp"
#include "cyclone/parallel.hpp"

namespace cyclone {

namespace {

using Unit = std::array<double, 3>;

// Unit sphere vectors make min-distance scans cheap: the nearest point by
// angle is the one with the largest dot product, so only one acos per
// source point is needed.
std::vector<Unit> unit_vectors(const Track& t) {
  std::vector<Unit> u(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double phi = deg2rad(t.points[i].lat);
    const double lam = deg2rad(t.points[i].lon);
    u[i] = {std::cos(phi) * std::cos(lam), std::cos(phi) * std::sin(lam),
            std::sin(phi)};
  }
  return u;
}

double mean_min_distance(const std::vector<Unit>& a,
                         const std::vector<Unit>& b) {
  double sum = 0.0;
  for (const Unit& p : a) {
    double best = -1.0;
    for (const Unit& q : b) {
      const double dot = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
      if (dot > best) best = dot;
    }
    sum += kEarthRadiusKm * std::acos(std::clamp(best, -1.0, 1.0));
  }
  return sum / static_cast<double>(a.size());
}

double curve_distance_units(const std::vector<Unit>& a,
                            const std::vector<Unit>& b) {
  return 0.5 * (mean_min_distance(a, b) + mean_min_distance(b, a));
}

}  // namespace

double curve_distance(const Track& a, const Track& b) {
  if (a.empty() || b.empty())
    throw DomainError("curve_distance: empty track");
  return curve_distance_units(unit_vectors(a), unit_vectors(b));
}

DistanceMatrix distance_matrix(const std::vector<Track>& tracks,
                               int threads) {
  const std::size_t n = tracks.size();
  if (n < 1) throw DomainError("distance_matrix: no tracks");

  std::vector<std::vector<Unit>> units(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (tracks[i].empty()) throw DomainError("distance_matrix: empty track");
    units[i] = unit_vectors(tracks[i]);
  }

  DistanceMatrix D;
  D.n = n;
  D.values.assign(n * n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j)
      D.at(i, j) = curve_distance_units(units[i], units[j]);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) D.at(j, i) = D.at(i, j);
  return D;
}

DepthRanking metric_depth(const DistanceMatrix& D, int threads) {
  const std::size_t n = D.n;
  if (n < 3)
    throw DomainError("metric_depth: need at least 3 curves, have " +
                      std::to_string(n));

  DepthRanking ranking;
  ranking.depths.assign(n, 0.0);
  const double pairs =
      static_cast<double>(n - 1) * static_cast<double>(n - 2) / 2.0;

  parallel_for(n, threads, [&](std::size_t i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dij = D.at(i, j);
      for (std::size_t k = j + 1; k < n; ++k) {
        if (k == i) continue;
        const double djk = D.at(j, k);
        if (djk > dij && djk > D.at(i, k)) ++count;
      }
    }
    ranking.depths[i] = static_cast<double>(count) / pairs;
  });

  ranking.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) ranking.order[i] = i;
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (ranking.depths[a] != ranking.depths[b])
                       return ranking.depths[a] > ranking.depths[b];
                     return a < b;
                   });
  return ranking;
}

std::size_t coverage_count(double frac, std::size_t n) {
  const double target = frac * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::ceil(target - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

std::vector<std::size_t> deepest_subset(const DepthRanking& ranking,
                                        double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("deepest_subset: alpha must be in (0, 1)");
  const std::size_t k = coverage_count(1.0 - alpha, ranking.order.size());
  return std::vector<std::size_t>(ranking.order.begin(),
                                  ranking.order.begin() + k);
}

}  // namespace cyclone
