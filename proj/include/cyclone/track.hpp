#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "cyclone/geodesy.hpp"

namespace cyclone {

using TimePoint = std::chrono::sys_seconds;
inline constexpr std::chrono::seconds kSynopticStep{6 * 3600};

// Minimum usable track length: one AR design row needs three prior points
// plus a target.
inline constexpr std::size_t kMinUsableTrackLength = 4;

struct TrackPoint {
  TimePoint timestamp{};
  double lat{0.0};
  double lon{0.0};

  GeoPoint position() const { return GeoPoint{lat, lon}; }
};

struct Track {
  std::string storm_id;  // basin-coded id, e.g. "AL122005"
  std::string name;
  std::vector<TrackPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct DataSplit {
  std::vector<Track> train;
  std::vector<Track> test;
  std::uint64_t seed{0};
};

}  // namespace cyclone
