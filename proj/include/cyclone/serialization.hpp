#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cyclone/band_geometry.hpp"
#include "cyclone/lysis_models.hpp"
#include "cyclone/simulator.hpp"
#include "cyclone/track.hpp"
#include "cyclone/track_models.hpp"

// Every pipeline stage reads and writes files; this module owns those
// formats. JSON documents carry schema_version and are emitted with sorted
// keys and shortest round-trip doubles, so re-running a stage with the same
// inputs reproduces the artifact byte for byte.

namespace cyclone {

inline constexpr int kSchemaVersion = 1;

std::string iso8601(TimePoint t);
TimePoint parse_iso8601(const std::string& s);

std::string to_string(RegressionMode mode);   // "ar" / "nonar"
std::string to_string(LysisMode mode);        // "logistic" / "kernel"
std::string to_string(BandMethod method);     // "kde" / ... / "delta-ball"
RegressionMode regression_mode_from(const std::string& s);
LysisMode lysis_mode_from(const std::string& s);
BandMethod band_method_from(const std::string& s);

// ---------------------------------------------------------------------------
// Track store: the ingest artifact holding the train/test split.

struct TrackStore {
  DataSplit split;
  std::string source;  // input filename, informational
};

nlohmann::json store_to_json(const TrackStore& store);
TrackStore store_from_json(const nlohmann::json& doc);
void save_store(const std::filesystem::path& path, const TrackStore& store);
TrackStore load_store(const std::filesystem::path& path);

// Looks in test first, then train (evaluation storms come from test).
const Track* find_track(const TrackStore& store, const std::string& storm_id);

// ---------------------------------------------------------------------------
// Model bundle: both regression modes plus both lysis models in one file.

struct ModelBundle {
  BlockRegression nonar;
  BlockRegression ar;
  LogisticLysisModel logistic;
  KernelLifespanModel kernel;
  std::size_t min_block_obs{0};
  double ridge{0.0};
};

nlohmann::json model_to_json(const ModelBundle& bundle);
ModelBundle model_from_json(const nlohmann::json& doc);
void save_model(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Ensemble: GeoJSON FeatureCollection of LineStrings (authoritative, holds
// config + seeds + start time) and a compact CSV (member, step, lat, lon).
// Timestamps are implicit: every member starts at the seed storm's first
// observation and advances six hours per step.

nlohmann::json ensemble_to_geojson(const SimulationEnsemble& ensemble,
                                   TimePoint start_time);
SimulationEnsemble ensemble_from_geojson(const nlohmann::json& doc);
std::string ensemble_to_csv(const SimulationEnsemble& ensemble);

// Writes <stem>.geojson and <stem>.csv.
void save_ensemble(const std::filesystem::path& stem,
                   const SimulationEnsemble& ensemble, TimePoint start_time);
SimulationEnsemble load_ensemble(const std::filesystem::path& geojson_path);

// ---------------------------------------------------------------------------
// Band: GeoJSON for viewing (hull -> Polygon, everything else -> rasterized
// MultiPolygon at the given resolution) plus a parameter document from which
// membership is reproducible exactly, without the rasterization.

nlohmann::json band_params_to_json(const PredictionBand& band);
PredictionBand band_from_json(const nlohmann::json& doc);
nlohmann::json band_to_geojson(const PredictionBand& band, double resolution_km,
                               int threads);

// Writes <stem>.geojson and <stem>.params.json.
void save_band(const std::filesystem::path& stem, const PredictionBand& band,
               double resolution_km, int threads);
PredictionBand load_band_params(const std::filesystem::path& params_path);

// ---------------------------------------------------------------------------
// Shared file plumbing.

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json load_json(const std::filesystem::path& path);

// Throws DomainError naming both versions when they differ.
void check_schema_version(const nlohmann::json& doc,
                          const std::string& artifact_name);

}  // namespace cyclone
