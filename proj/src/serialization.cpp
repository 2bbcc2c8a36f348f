#include "cyclone/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cyclone/errors.hpp"

namespace cyclone {

using nlohmann::json;

std::string iso8601(TimePoint t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()),
                static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

TimePoint parse_iso8601(const std::string& s) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%dZ", &y, &mo, &d, &h, &mi,
                  &sec) != 6)
    throw DomainError("bad timestamp: " + s);
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw DomainError("bad calendar date: " + s);
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

std::string to_string(RegressionMode mode) {
  return mode == RegressionMode::kAr ? "ar" : "nonar";
}
std::string to_string(LysisMode mode) {
  return mode == LysisMode::kLogistic ? "logistic" : "kernel";
}
std::string to_string(BandMethod method) {
  switch (method) {
    case BandMethod::kKde: return "kde";
    case BandMethod::kSpherical: return "spherical";
    case BandMethod::kHull: return "hull";
    case BandMethod::kDeltaBall: return "delta-ball";
  }
  return "?";
}

RegressionMode regression_mode_from(const std::string& s) {
  if (s == "ar") return RegressionMode::kAr;
  if (s == "nonar") return RegressionMode::kNonAr;
  throw DomainError("unknown simulation mode: " + s);
}
LysisMode lysis_mode_from(const std::string& s) {
  if (s == "logistic") return LysisMode::kLogistic;
  if (s == "kernel") return LysisMode::kKernel;
  throw DomainError("unknown lysis mode: " + s);
}
BandMethod band_method_from(const std::string& s) {
  if (s == "kde") return BandMethod::kKde;
  if (s == "spherical") return BandMethod::kSpherical;
  if (s == "hull") return BandMethod::kHull;
  if (s == "delta-ball") return BandMethod::kDeltaBall;
  throw DomainError("unknown band method: " + s);
}

// ---------------------------------------------------------------------------
// file plumbing

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_json(const std::filesystem::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

json load_json(const std::filesystem::path& path) {
  return json::parse(read_text_file(path));
}

void check_schema_version(const json& doc, const std::string& artifact_name) {
  const int got = doc.value("schema_version", -1);
  if (got != kSchemaVersion)
    throw DomainError(artifact_name + ": schema_version " +
                      std::to_string(got) + ", this build expects " +
                      std::to_string(kSchemaVersion));
}

// ---------------------------------------------------------------------------
// track store

namespace {

json track_to_json(const Track& t) {
  json pts = json::array();
  for (const TrackPoint& p : t.points)
    pts.push_back(json{{"time", iso8601(p.timestamp)},
                       {"lat", p.lat},
                       {"lon", p.lon}});
  return json{{"storm_id", t.storm_id}, {"name", t.name}, {"points", pts}};
}

Track track_from_json(const json& j) {
  Track t;
  t.storm_id = j.at("storm_id").get<std::string>();
  t.name = j.at("name").get<std::string>();
  for (const json& p : j.at("points"))
    t.points.push_back(TrackPoint{
        parse_iso8601(p.at("time").get<std::string>()),
        p.at("lat").get<double>(), p.at("lon").get<double>()});
  return t;
}

json tracks_to_json(const std::vector<Track>& tracks) {
  json arr = json::array();
  for (const Track& t : tracks) arr.push_back(track_to_json(t));
  return arr;
}

std::vector<Track> tracks_from_json(const json& arr) {
  std::vector<Track> out;
  for (const json& j : arr) out.push_back(track_from_json(j));
  return out;
}

}  // namespace

json store_to_json(const TrackStore& store) {
  return json{{"schema_version", kSchemaVersion},
              {"source", store.source},
              {"seed", store.split.seed},
              {"train", tracks_to_json(store.split.train)},
              {"test", tracks_to_json(store.split.test)}};
}

TrackStore store_from_json(const json& doc) {
  check_schema_version(doc, "track store");
  TrackStore store;
  store.source = doc.value("source", std::string{});
  store.split.seed = doc.at("seed").get<std::uint64_t>();
  store.split.train = tracks_from_json(doc.at("train"));
  store.split.test = tracks_from_json(doc.at("test"));
  return store;
}

void save_store(const std::filesystem::path& path, const TrackStore& store) {
  save_json(path, store_to_json(store));
}

TrackStore load_store(const std::filesystem::path& path) {
  return store_from_json(load_json(path));
}

const Track* find_track(const TrackStore& store, const std::string& storm_id) {
  for (const Track& t : store.split.test)
    if (t.storm_id == storm_id) return &t;
  for (const Track& t : store.split.train)
    if (t.storm_id == storm_id) return &t;
  return nullptr;
}

// ---------------------------------------------------------------------------
// model bundle

namespace {

json linear_to_json(const LinearModel& m) {
  return json{{"coef", std::vector<double>(m.coefficients.begin(),
                                           m.coefficients.end())},
              {"residuals", m.residual_pool}};
}

LinearModel linear_from_json(const json& j) {
  LinearModel m;
  const auto coef = j.at("coef").get<std::vector<double>>();
  m.coefficients = Eigen::Map<const Eigen::VectorXd>(
      coef.data(), static_cast<Eigen::Index>(coef.size()));
  m.residual_pool = j.at("residuals").get<std::vector<double>>();
  m.n_obs = m.residual_pool.size();
  return m;
}

json regression_to_json(const BlockRegression& reg) {
  json blocks = json::array();
  for (const auto& [idx, models] : reg.per_block)
    blocks.push_back(json{{"lat_band", idx.lat_band},
                          {"lon_band", idx.lon_band},
                          {"bearing", linear_to_json(models.bearing)},
                          {"speed", linear_to_json(models.speed)}});
  return json{{"mode", to_string(reg.mode)},
              {"blocks", blocks},
              {"global", json{{"bearing", linear_to_json(reg.global.bearing)},
                              {"speed", linear_to_json(reg.global.speed)}}}};
}

BlockRegression regression_from_json(const json& j) {
  BlockRegression reg;
  reg.mode = regression_mode_from(j.at("mode").get<std::string>());
  for (const json& b : j.at("blocks")) {
    BlockIndex idx{b.at("lat_band").get<int>(), b.at("lon_band").get<int>()};
    reg.per_block[idx] = BlockModels{linear_from_json(b.at("bearing")),
                                     linear_from_json(b.at("speed"))};
  }
  reg.global = BlockModels{linear_from_json(j.at("global").at("bearing")),
                           linear_from_json(j.at("global").at("speed"))};
  return reg;
}

std::vector<double> vec_of(const Eigen::VectorXd& v) {
  return {v.begin(), v.end()};
}

Eigen::VectorXd eigen_of(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

}  // namespace

json model_to_json(const ModelBundle& bundle) {
  json logistic_blocks = json::array();
  for (const auto& [idx, coef] : bundle.logistic.per_block)
    logistic_blocks.push_back(json{{"lat_band", idx.lat_band},
                                   {"lon_band", idx.lon_band},
                                   {"coef", vec_of(coef)}});
  return json{
      {"schema_version", kSchemaVersion},
      {"train_config", json{{"min_block_obs", bundle.min_block_obs},
                            {"ridge", bundle.ridge}}},
      {"nonar", regression_to_json(bundle.nonar)},
      {"ar", regression_to_json(bundle.ar)},
      {"lysis",
       json{{"logistic", json{{"blocks", logistic_blocks},
                              {"global",
                               json{{"coef", vec_of(bundle.logistic.global)}}},
                              {"ridge", bundle.logistic.ridge}}},
            {"kernel", json{{"lifespans", bundle.kernel.lifespans},
                            {"bandwidth", bundle.kernel.bandwidth}}}}}};
}

ModelBundle model_from_json(const json& doc) {
  check_schema_version(doc, "model file");
  ModelBundle bundle;
  bundle.min_block_obs =
      doc.at("train_config").at("min_block_obs").get<std::size_t>();
  bundle.ridge = doc.at("train_config").at("ridge").get<double>();
  bundle.nonar = regression_from_json(doc.at("nonar"));
  bundle.ar = regression_from_json(doc.at("ar"));
  const json& logi = doc.at("lysis").at("logistic");
  for (const json& b : logi.at("blocks")) {
    BlockIndex idx{b.at("lat_band").get<int>(), b.at("lon_band").get<int>()};
    bundle.logistic.per_block[idx] =
        eigen_of(b.at("coef").get<std::vector<double>>());
  }
  bundle.logistic.global =
      eigen_of(logi.at("global").at("coef").get<std::vector<double>>());
  bundle.logistic.ridge = logi.at("ridge").get<double>();
  const json& kern = doc.at("lysis").at("kernel");
  bundle.kernel.lifespans = kern.at("lifespans").get<std::vector<int>>();
  bundle.kernel.bandwidth = kern.at("bandwidth").get<double>();
  return bundle;
}

void save_model(const std::filesystem::path& path, const ModelBundle& bundle) {
  save_json(path, model_to_json(bundle));
}

ModelBundle load_model(const std::filesystem::path& path) {
  return model_from_json(load_json(path));
}

// ---------------------------------------------------------------------------
// ensemble

json ensemble_to_geojson(const SimulationEnsemble& ensemble,
                         TimePoint start_time) {
  json features = json::array();
  for (std::size_t i = 0; i < ensemble.tracks.size(); ++i) {
    json coords = json::array();
    for (const TrackPoint& p : ensemble.tracks[i].points)
      coords.push_back(json::array({p.lon, p.lat}));
    features.push_back(
        json{{"type", "Feature"},
             {"geometry", json{{"type", "LineString"},
                               {"coordinates", coords}}},
             {"properties", json{{"member", i},
                                 {"seed", ensemble.per_track_seeds[i]}}}});
  }
  return json{
      {"type", "FeatureCollection"},
      {"properties",
       json{{"schema_version", kSchemaVersion},
            {"seed_track_id", ensemble.seed_track_id},
            {"start_time", iso8601(start_time)},
            {"boundary_members", ensemble.boundary_members},
            {"config", json{{"mode", to_string(ensemble.config.mode)},
                            {"lysis", to_string(ensemble.config.lysis)},
                            {"n_sims", ensemble.config.n_sims},
                            {"max_steps", ensemble.config.max_steps},
                            {"seed", ensemble.config.master_seed}}}}},
      {"features", features}};
}

SimulationEnsemble ensemble_from_geojson(const json& doc) {
  const json& props = doc.at("properties");
  check_schema_version(props, "ensemble file");
  SimulationEnsemble ens;
  ens.seed_track_id = props.at("seed_track_id").get<std::string>();
  ens.boundary_members =
      props.at("boundary_members").get<std::vector<std::uint32_t>>();
  const json& cfg = props.at("config");
  ens.config.mode = regression_mode_from(cfg.at("mode").get<std::string>());
  ens.config.lysis = lysis_mode_from(cfg.at("lysis").get<std::string>());
  ens.config.n_sims = cfg.at("n_sims").get<int>();
  ens.config.max_steps = cfg.at("max_steps").get<int>();
  ens.config.master_seed = cfg.at("seed").get<std::uint64_t>();
  const TimePoint start =
      parse_iso8601(props.at("start_time").get<std::string>());

  for (const json& f : doc.at("features")) {
    const std::size_t member = f.at("properties").at("member").get<std::size_t>();
    if (member != ens.tracks.size())
      throw DomainError("ensemble file: members out of order");
    ens.per_track_seeds.push_back(
        f.at("properties").at("seed").get<std::uint64_t>());
    Track t;
    t.storm_id = ens.seed_track_id;
    t.name = "SIM" + std::to_string(member);
    int step = 0;
    for (const json& c : f.at("geometry").at("coordinates")) {
      t.points.push_back(TrackPoint{start + step * kSynopticStep,
                                    c.at(1).get<double>(),
                                    c.at(0).get<double>()});
      ++step;
    }
    ens.tracks.push_back(std::move(t));
  }
  return ens;
}

std::string ensemble_to_csv(const SimulationEnsemble& ensemble) {
  std::string out = "member,step,lat,lon\n";
  char buf[80];
  for (std::size_t i = 0; i < ensemble.tracks.size(); ++i) {
    const Track& t = ensemble.tracks[i];
    for (std::size_t s = 0; s < t.points.size(); ++s) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f,%.6f\n", i, s,
                    t.points[s].lat, t.points[s].lon);
      out += buf;
    }
  }
  return out;
}

void save_ensemble(const std::filesystem::path& stem,
                   const SimulationEnsemble& ensemble, TimePoint start_time) {
  std::filesystem::path geo = stem;
  geo += ".geojson";
  std::filesystem::path csv = stem;
  csv += ".csv";
  save_json(geo, ensemble_to_geojson(ensemble, start_time));
  write_text_file(csv, ensemble_to_csv(ensemble));
}

SimulationEnsemble load_ensemble(const std::filesystem::path& geojson_path) {
  return ensemble_from_geojson(load_json(geojson_path));
}

// ---------------------------------------------------------------------------
// band

namespace {

json projection_to_json(const PlanarProjection& p) {
  return json{{"lat0", p.lat0}, {"lon0", p.lon0}};
}

PlanarProjection projection_from_json(const json& j) {
  return PlanarProjection{j.at("lat0").get<double>(),
                          j.at("lon0").get<double>()};
}

json lonlat_array(const std::vector<GeoPoint>& pts) {
  json arr = json::array();
  for (const GeoPoint& p : pts) arr.push_back(json::array({p.lon, p.lat}));
  return arr;
}

std::vector<GeoPoint> lonlat_from(const json& arr) {
  std::vector<GeoPoint> pts;
  for (const json& c : arr)
    pts.push_back(GeoPoint{c.at(1).get<double>(), c.at(0).get<double>()});
  return pts;
}

}  // namespace

json band_params_to_json(const PredictionBand& band) {
  json doc{{"schema_version", kSchemaVersion}};
  if (const auto* kde = std::get_if<KdeLevelSetBand>(&band)) {
    doc["method"] = to_string(BandMethod::kKde);
    doc["alpha"] = kde->alpha;
    doc["projection"] = projection_to_json(kde->proj);
    doc["kde"] = json{{"bandwidth_x", kde->bandwidth_x},
                      {"bandwidth_y", kde->bandwidth_y},
                      {"threshold", kde->threshold},
                      {"sample_x", kde->sample_x},
                      {"sample_y", kde->sample_y}};
  } else if (const auto* tube = std::get_if<SphericalTubeBand>(&band)) {
    doc["method"] = to_string(BandMethod::kSpherical);
    doc["alpha"] = tube->alpha;
    doc["projection"] = projection_to_json(tube->proj);
    std::vector<GeoPoint> center;
    for (const TrackPoint& p : tube->center_path.points)
      center.push_back(p.position());
    doc["spherical"] =
        json{{"center", lonlat_array(center)},
             {"center_id", tube->center_path.storm_id},
             {"center_name", tube->center_path.name},
             {"start_time",
              tube->center_path.empty()
                  ? std::string{}
                  : iso8601(tube->center_path.points.front().timestamp)},
             {"radii", tube->radii},
             {"carried", std::vector<int>(tube->carried.begin(),
                                          tube->carried.end())}};
  } else if (const auto* hull = std::get_if<ConvexHullBand>(&band)) {
    doc["method"] = to_string(BandMethod::kHull);
    doc["alpha"] = hull->alpha;
    doc["projection"] = projection_to_json(hull->proj);
    json verts = json::array();
    for (const auto& v : hull->vertices)
      verts.push_back(json::array({v[0], v[1]}));
    doc["hull"] = json{{"vertices_km", verts}};
  } else {
    const auto& ball = std::get<DeltaBallBand>(band);
    doc["method"] = to_string(BandMethod::kDeltaBall);
    doc["alpha"] = ball.alpha;
    doc["projection"] = projection_to_json(ball.proj);
    doc["delta_ball"] = json{{"centers", lonlat_array(ball.centers)},
                             {"delta_km", ball.delta}};
  }
  return doc;
}

PredictionBand band_from_json(const json& doc) {
  check_schema_version(doc, "band parameter file");
  const BandMethod method = band_method_from(doc.at("method").get<std::string>());
  const double alpha = doc.at("alpha").get<double>();
  const PlanarProjection proj = projection_from_json(doc.at("projection"));

  switch (method) {
    case BandMethod::kKde: {
      KdeLevelSetBand band;
      band.alpha = alpha;
      band.proj = proj;
      const json& k = doc.at("kde");
      band.bandwidth_x = k.at("bandwidth_x").get<double>();
      band.bandwidth_y = k.at("bandwidth_y").get<double>();
      band.threshold = k.at("threshold").get<double>();
      band.sample_x = k.at("sample_x").get<std::vector<double>>();
      band.sample_y = k.at("sample_y").get<std::vector<double>>();
      return band;
    }
    case BandMethod::kSpherical: {
      SphericalTubeBand band;
      band.alpha = alpha;
      band.proj = proj;
      const json& s = doc.at("spherical");
      band.center_path.storm_id = s.at("center_id").get<std::string>();
      band.center_path.name = s.at("center_name").get<std::string>();
      const auto center = lonlat_from(s.at("center"));
      const TimePoint start =
          center.empty() ? TimePoint{}
                         : parse_iso8601(s.at("start_time").get<std::string>());
      for (std::size_t t = 0; t < center.size(); ++t)
        band.center_path.points.push_back(
            TrackPoint{start + static_cast<int>(t) * kSynopticStep,
                       center[t].lat, center[t].lon});
      band.radii = s.at("radii").get<std::vector<double>>();
      const auto carried = s.at("carried").get<std::vector<int>>();
      band.carried.assign(carried.begin(), carried.end());
      return band;
    }
    case BandMethod::kHull: {
      ConvexHullBand band;
      band.alpha = alpha;
      band.proj = proj;
      for (const json& v : doc.at("hull").at("vertices_km"))
        band.vertices.push_back(
            std::array<double, 2>{v.at(0).get<double>(), v.at(1).get<double>()});
      return band;
    }
    case BandMethod::kDeltaBall: {
      DeltaBallBand band;
      band.alpha = alpha;
      band.proj = proj;
      const json& d = doc.at("delta_ball");
      band.centers = lonlat_from(d.at("centers"));
      band.delta = d.at("delta_km").get<double>();
      band.rebuild_cache();
      return band;
    }
  }
  throw DomainError("band parameter file: unknown method");
}

namespace {

// Merge raster cells into rectangles: runs per row, then vertically stacked
// identical runs. Crude but valid GeoJSON; the params file carries the exact
// geometry.
json raster_to_multipolygon(const RasterGrid& grid,
                            const PlanarProjection& proj) {
  struct Run {
    std::size_t i0, i1;  // [i0, i1) cells
    std::size_t j0, j1;  // [j0, j1) rows
  };
  std::vector<Run> rects;
  std::vector<std::size_t> open;  // indices into rects still growable

  for (std::size_t j = 0; j < grid.ny; ++j) {
    std::vector<Run> row_runs;
    for (std::size_t i = 0; i < grid.nx;) {
      if (!grid.cells[j * grid.nx + i]) {
        ++i;
        continue;
      }
      std::size_t i1 = i;
      while (i1 < grid.nx && grid.cells[j * grid.nx + i1]) ++i1;
      row_runs.push_back(Run{i, i1, j, j + 1});
      i = i1;
    }
    std::vector<std::size_t> next_open;
    for (Run& r : row_runs) {
      bool merged = false;
      for (std::size_t idx : open) {
        if (rects[idx].i0 == r.i0 && rects[idx].i1 == r.i1 &&
            rects[idx].j1 == j) {
          rects[idx].j1 = j + 1;
          next_open.push_back(idx);
          merged = true;
          break;
        }
      }
      if (!merged) {
        rects.push_back(r);
        next_open.push_back(rects.size() - 1);
      }
    }
    open = std::move(next_open);
  }

  json polys = json::array();
  for (const Run& r : rects) {
    const double x0 = grid.xmin + static_cast<double>(r.i0) * grid.resolution_km;
    const double x1 = grid.xmin + static_cast<double>(r.i1) * grid.resolution_km;
    const double y0 = grid.ymin + static_cast<double>(r.j0) * grid.resolution_km;
    const double y1 = grid.ymin + static_cast<double>(r.j1) * grid.resolution_km;
    json ring = json::array();
    for (const auto& [x, y] : {std::pair{x0, y0}, {x1, y0}, {x1, y1},
                               {x0, y1}, {x0, y0}}) {
      const GeoPoint p = proj.from_km(x, y);
      ring.push_back(json::array({p.lon, p.lat}));
    }
    polys.push_back(json::array({ring}));
  }
  return json{{"type", "MultiPolygon"}, {"coordinates", polys}};
}

}  // namespace

json band_to_geojson(const PredictionBand& band, double resolution_km,
                     int threads) {
  json geometry;
  double area = 0.0;
  if (const auto* hull = std::get_if<ConvexHullBand>(&band)) {
    json ring = json::array();
    for (const auto& v : hull->vertices) {
      const GeoPoint p = hull->proj.from_km(v[0], v[1]);
      ring.push_back(json::array({p.lon, p.lat}));
    }
    ring.push_back(ring.front());  // GeoJSON rings close explicitly
    geometry = json{{"type", "Polygon"}, {"coordinates", json::array({ring})}};
    area = hull->area_km2();
  } else {
    const RasterGrid grid = band_raster(band, resolution_km, threads);
    const PlanarProjection proj = std::visit(
        [](const auto& b) { return b.proj; }, band);
    geometry = raster_to_multipolygon(grid, proj);
    area = static_cast<double>(grid.count()) * resolution_km * resolution_km;
  }

  const auto method = static_cast<BandMethod>(band.index());
  const double alpha = std::visit([](const auto& b) { return b.alpha; }, band);
  return json{
      {"type", "FeatureCollection"},
      {"properties", json{{"schema_version", kSchemaVersion},
                          {"method", to_string(method)},
                          {"alpha", alpha},
                          {"resolution_km", resolution_km},
                          {"area_km2", area}}},
      {"features",
       json::array({json{{"type", "Feature"},
                         {"geometry", geometry},
                         {"properties", json{{"method", to_string(method)},
                                             {"alpha", alpha}}}}})}};
}

void save_band(const std::filesystem::path& stem, const PredictionBand& band,
               double resolution_km, int threads) {
  std::filesystem::path geo = stem;
  geo += ".geojson";
  std::filesystem::path params = stem;
  params += ".params.json";
  save_json(geo, band_to_geojson(band, resolution_km, threads));
  save_json(params, band_params_to_json(band));
}

PredictionBand load_band_params(const std::filesystem::path& params_path) {
  return band_from_json(load_json(params_path));
}

}  // namespace cyclone
