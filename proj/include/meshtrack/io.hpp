#pragma once

// File formats: structured text documents for layouts / paths / configs, the
// WVLO binary CSI trace with a line-delimited textual twin, trajectory and
// metrics documents. Every output embeds a run manifest with a stable config
// digest so identical inputs produce byte-identical files.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "meshtrack/channel_sim.hpp"
#include "meshtrack/eval.hpp"
#include "meshtrack/geometry.hpp"
#include "meshtrack/pipeline.hpp"
#include "meshtrack/trajectory.hpp"

namespace meshtrack {

inline constexpr const char* kToolVersion = "0.1.0";

uint64_t fnv1a64(const std::string& data);
std::string to_hex(uint64_t v);

struct RunManifest {
    std::string tool = std::string("meshtrack/") + kToolVersion;
    uint64_t seed = 0;
    std::string config_digest;  // hex fnv1a64 of the canonical config text
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    std::string to_line() const;
    static RunManifest from_line(const std::string& line);
};

// ---- structured text documents ----

AntennaLayout read_layout(const std::string& path);
void write_layout(const std::string& path, const AntennaLayout& layout);

struct PathSpec {
    PathKind kind = PathKind::Straight;
    BBox bbox;
    double speed = 1.0;
    double margin_s = 0.0;  // stationary lead-in/out
};

PathSpec read_path_spec(const std::string& path);

/// Applies overrides from a scene document onto an existing scene.
void apply_scene_overrides(Scene& scene, const std::string& path);

/// Tracker configuration document; missing keys keep the built-in defaults.
TrackerConfig read_tracker_config(const std::string& path, const TrackerConfig& defaults);
std::string tracker_config_canonical(const TrackerConfig& cfg);

// ---- CSI traces ----

/// Extension .wvlo selects the binary format, anything else the textual one.
void write_trace(const std::string& path, const CsiTrace& trace, const RunManifest& manifest);
CsiTrace read_trace(const std::string& path, RunManifest* manifest = nullptr);

// ---- trajectories ----

struct TrajectoryDoc {
    RunManifest manifest;
    std::vector<RecoveredTrajectory::Vertex> vertices;
    std::vector<double> speeds;   // per vertex, 0 for the first
    std::vector<int> trends1, trends2;
    std::map<std::string, std::string> meta;  // free-form keys (kind, scenario...)
};

void write_trajectory(const std::string& path, const TrajectoryDoc& doc);
TrajectoryDoc read_trajectory(const std::string& path);

TrajectoryDoc trajectory_doc_from_result(const TrackResult& result, const RunManifest& manifest);
TrajectoryDoc trajectory_doc_from_path(const GroundTruthPath& path, const RunManifest& manifest);

// ---- metrics ----

struct MetricsDoc {
    RunManifest manifest;
    double dtw_m = 0.0;
    int samples = 50;
    int window = 50;
    std::map<std::string, std::string> keys;
};

void write_metrics(const std::string& path, const MetricsDoc& doc);
MetricsDoc read_metrics(const std::string& path);

void write_report(const std::string& path, const ErrorReport& report,
                  const RunManifest& manifest);

}  // namespace meshtrack
