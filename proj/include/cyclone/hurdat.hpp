#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cyclone/track.hpp"

namespace cyclone {

// Raised on malformed HURDAT2 input; carries the offending line number.
class HurdatParseError : public std::runtime_error {
 public:
  HurdatParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Parse the raw contents of a HURDAT2 best-track file. Each storm stanza is
// a header line `<ID>, <NAME>, <ROWCOUNT>,` followed by ROWCOUNT data lines.
// Only date, time, latitude and longitude are consumed; wind, pressure and
// the remaining columns are ignored. Longitudes are normalized to
// [-180, 180] here so one convention holds everywhere downstream.
std::vector<Track> parse_hurdat2(const std::string& text);

// Keep only rows at the synoptic hours 00/06/12/18 UTC (minute 0); HURDAT2
// intersperses landfall and peak-intensity records at other times.
Track filter_synoptic(const Track& track);

// Truncate at the first gap so the remaining points are exactly six hours
// apart. Storms with missing synoptic steps keep their prefix.
Track truncate_at_gap(const Track& track);

// filter_synoptic + truncate_at_gap, dropping tracks shorter than
// kMinUsableTrackLength. This is the set that training/testing operate on.
std::vector<Track> usable_tracks(const std::vector<Track>& parsed);

// Uniformly random split under `seed`: first train_count of the shuffled
// order go to train, the rest to test. Deterministic for a given
// (input order, seed) on every platform.
DataSplit split_train_test(const std::vector<Track>& tracks,
                           std::size_t train_count, std::uint64_t seed);

// Serialize Tracks back to HURDAT2-style rows (consumed fields only).
// Round-trips through parse_hurdat2.
std::string to_hurdat2(const std::vector<Track>& tracks);

}  // namespace cyclone
