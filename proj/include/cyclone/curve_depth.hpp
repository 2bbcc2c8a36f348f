#pragma once

#include <cstddef>
#include <vector>

#include "cyclone/track.hpp"

namespace cyclone {

struct DistanceMatrix {
  std::size_t n{0};
  std::vector<double> values;  // row-major, symmetric, zero diagonal

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

struct DepthRanking {
  std::vector<double> depths;      // in [0, 1]
  std::vector<std::size_t> order;  // descending depth, ties by lower index
};

// Symmetrized average-minimum curve distance in km:
//   0.5 * [ mean_p min_q d(p,q) + mean_q min_p d(p,q) ]
// with great-circle point distances. Handles unequal track lengths and is
// robust to single outlier points.
double curve_distance(const Track& a, const Track& b);

// All pairwise curve distances, computed once and mirrored. Entries match
// individual curve_distance calls exactly.
DistanceMatrix distance_matrix(const std::vector<Track>& tracks,
                               int threads = 1);

// Metric depth: depth(i) is the fraction of unordered pairs {j,k} (both
// distinct from i) whose mutual distance strictly exceeds both distances to
// i, i.e. the empirical probability that curve i lies between a random
// pair. Ties contribute nothing.
DepthRanking metric_depth(const DistanceMatrix& D, int threads = 1);

// Indices of the ceil((1-alpha)*n) deepest curves, tie-broken by index.
std::vector<std::size_t> deepest_subset(const DepthRanking& ranking,
                                        double alpha);

// ceil(frac*n) with a guard against floating noise in frac*n, clamped to
// [1, n]. Shared by the depth subset and the per-step band quantiles.
std::size_t coverage_count(double frac, std::size_t n);

}  // namespace cyclone
