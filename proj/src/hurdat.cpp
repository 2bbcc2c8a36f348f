#include "cyclone/hurdat.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "cyclone/rng.hpp"

namespace cyclone {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c);
  });
}

int to_int(const std::string& s) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

// `28.0N` -> +28.0, `10.5S` -> -10.5; same for E/W longitudes.
double parse_hemisphere_coord(const std::string& token, char pos, char neg,
                              std::size_t line_no) {
  if (token.size() < 2)
    throw HurdatParseError("unparseable coordinate token '" + token + "'",
                           line_no);
  const char hemi = token.back();
  double sign;
  if (hemi == pos)
    sign = 1.0;
  else if (hemi == neg)
    sign = -1.0;
  else
    throw HurdatParseError("unparseable coordinate token '" + token + "'",
                           line_no);
  const std::string body = token.substr(0, token.size() - 1);
  try {
    std::size_t used = 0;
    const double v = std::stod(body, &used);
    if (used != body.size()) throw std::invalid_argument(body);
    return sign * v;
  } catch (const std::exception&) {
    throw HurdatParseError("unparseable coordinate token '" + token + "'",
                           line_no);
  }
}

TimePoint parse_timestamp(const std::string& date, const std::string& time,
                          std::size_t line_no) {
  if (!all_digits(date) || date.size() != 8 || !all_digits(time) ||
      time.size() != 4)
    throw HurdatParseError(
        "bad date/time fields '" + date + "', '" + time + "'", line_no);
  const int y = to_int(date.substr(0, 4));
  const unsigned m = static_cast<unsigned>(to_int(date.substr(4, 2)));
  const unsigned d = static_cast<unsigned>(to_int(date.substr(6, 2)));
  const int hh = to_int(time.substr(0, 2));
  const int mm = to_int(time.substr(2, 2));
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok() || hh > 23 || mm > 59)
    throw HurdatParseError("invalid calendar date '" + date + " " + time + "'",
                           line_no);
  return std::chrono::sys_days{ymd} + std::chrono::hours{hh} +
         std::chrono::minutes{mm};
}

bool looks_like_header(const std::vector<std::string>& fields) {
  // Header ids are like AL122005: two letters then digits. Data lines start
  // with an 8-digit date instead.
  if (fields.size() < 3) return false;
  const std::string& id = fields[0];
  return id.size() >= 4 && std::isalpha(static_cast<unsigned char>(id[0])) &&
         std::isalpha(static_cast<unsigned char>(id[1]));
}

}  // namespace

std::vector<Track> parse_hurdat2(const std::string& text) {
  std::vector<Track> tracks;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;

    const auto header = split_csv(line);
    if (!looks_like_header(header))
      throw HurdatParseError("expected storm header, got '" + trim(line) + "'",
                             line_no);
    Track track;
    track.storm_id = header[0];
    track.name = header[1];
    int row_count = 0;
    try {
      row_count = to_int(header[2]);
    } catch (const std::exception&) {
      throw HurdatParseError("bad row count in header for " + track.storm_id,
                             line_no);
    }

    track.points.reserve(static_cast<std::size_t>(row_count));
    for (int r = 0; r < row_count; ++r) {
      if (!std::getline(in, line))
        throw HurdatParseError("header for " + track.storm_id + " promises " +
                                   std::to_string(row_count) +
                                   " rows but file ends after " +
                                   std::to_string(r),
                               line_no);
      ++line_no;
      const auto fields = split_csv(line);
      if (looks_like_header(fields) || fields.size() < 6)
        throw HurdatParseError("header for " + track.storm_id + " promises " +
                                   std::to_string(row_count) +
                                   " rows but row " + std::to_string(r + 1) +
                                   " is not a data line",
                               line_no);
      TrackPoint p;
      p.timestamp = parse_timestamp(fields[0], fields[1], line_no);
      p.lat = parse_hemisphere_coord(fields[4], 'N', 'S', line_no);
      p.lon = normalize_lon(parse_hemisphere_coord(fields[5], 'E', 'W', line_no));
      track.points.push_back(p);
    }
    tracks.push_back(std::move(track));
  }
  return tracks;
}

Track filter_synoptic(const Track& track) {
  Track out;
  out.storm_id = track.storm_id;
  out.name = track.name;
  for (const TrackPoint& p : track.points) {
    const auto tod = p.timestamp - std::chrono::floor<std::chrono::days>(p.timestamp);
    const auto mins = std::chrono::duration_cast<std::chrono::minutes>(tod).count();
    if (mins % 60 == 0 && (mins / 60) % 6 == 0) out.points.push_back(p);
  }
  return out;
}

Track truncate_at_gap(const Track& track) {
  Track out;
  out.storm_id = track.storm_id;
  out.name = track.name;
  if (track.empty()) return out;
  out.points.push_back(track.points.front());
  for (std::size_t i = 1; i < track.points.size(); ++i) {
    if (track.points[i].timestamp - track.points[i - 1].timestamp !=
        kSynopticStep)
      break;
    out.points.push_back(track.points[i]);
  }
  return out;
}

std::vector<Track> usable_tracks(const std::vector<Track>& parsed) {
  std::vector<Track> out;
  for (const Track& t : parsed) {
    Track u = truncate_at_gap(filter_synoptic(t));
    if (u.size() >= kMinUsableTrackLength) out.push_back(std::move(u));
  }
  return out;
}

DataSplit split_train_test(const std::vector<Track>& tracks,
                           std::size_t train_count, std::uint64_t seed) {
  if (train_count > tracks.size())
    throw std::invalid_argument(
        "split_train_test: train_count " + std::to_string(train_count) +
        " exceeds available tracks " + std::to_string(tracks.size()));

  // Fisher-Yates with our own bounded draw; std::shuffle's mapping from
  // engine output to indices is implementation-defined.
  std::vector<std::size_t> order(tracks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  RandomStream rng(splitmix64(seed));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_index(i)]);

  DataSplit split;
  split.seed = seed;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i < train_count)
      split.train.push_back(tracks[order[i]]);
    else
      split.test.push_back(tracks[order[i]]);
  }
  return split;
}

std::string to_hurdat2(const std::vector<Track>& tracks) {
  std::string out;
  char buf[96];
  for (const Track& t : tracks) {
    std::snprintf(buf, sizeof(buf), "%s,%21s,%7zu,\n", t.storm_id.c_str(),
                  t.name.c_str(), t.points.size());
    out += buf;
    for (const TrackPoint& p : t.points) {
      const auto days = std::chrono::floor<std::chrono::days>(p.timestamp);
      const std::chrono::year_month_day ymd{days};
      const auto tod =
          std::chrono::duration_cast<std::chrono::minutes>(p.timestamp - days);
      std::snprintf(
          buf, sizeof(buf),
          "%04d%02u%02u, %02d%02d,  ,   , %.1f%c, %.1f%c, -99, -999,\n",
          static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day()), static_cast<int>(tod.count() / 60),
          static_cast<int>(tod.count() % 60), std::abs(p.lat),
          p.lat < 0.0 ? 'S' : 'N', std::abs(p.lon), p.lon < 0.0 ? 'W' : 'E');
      out += buf;
    }
  }
  return out;
}

}  // namespace cyclone
