#pragma once

// Synthetic packet-rate CSI traces: LoS + human reflection + static
// scatterers, complex Gaussian measurement noise. The simulator is the
// ground-truth oracle for everything downstream, so it stays deliberately
// simple and fully deterministic under a seed.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "meshtrack/geometry.hpp"

namespace meshtrack {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct Scatterer {
    Point2 position;
    double amplitude = 0.0;
    double phase = 0.0;
};

struct HumanAmplitudeModel {
    enum class Kind { Constant, InverseSquare };
    Kind kind = Kind::InverseSquare;
    double value = 1.0;  // alpha_h for Constant, coefficient A for InverseSquare

    double at(double path_length_m) const;
};

struct Scene {
    AntennaLayout layout;
    double los_amplitude = 1.0;
    HumanAmplitudeModel human;
    std::vector<Scatterer> scatterers;
    double noise_sigma = 0.0;
    double carrier_center_hz = 5.825e9;
    std::vector<double> subcarriers_hz;  // strictly increasing
    double constant_phase = 0.7;

    /// 30 subcarriers evenly spaced over 40 MHz around the carrier.
    static std::vector<double> default_subcarriers(double carrier_hz);
    /// Scene with default subcarrier grid and five seeded scatterers at 10%
    /// of the LoS amplitude, scattered around the monitor area.
    static Scene default_scene(const AntennaLayout& layout, uint64_t seed = 1);

    void validate() const;
};

struct GroundTruthPath {
    struct Waypoint {
        double t = 0.0;
        Point2 p;
    };
    std::vector<Waypoint> waypoints;  // strictly increasing t

    /// Linear interpolation; clamps before the first / after the last
    /// waypoint (stationary margins).
    Point2 position_at(double t) const;
    double duration() const;
    double total_length() const;
    /// Shifts all timestamps by dt (used for stationary lead-in margins).
    GroundTruthPath shifted(double dt) const;
};

enum class PathKind { Straight, L, U, S, M, Z, Arc };

PathKind path_kind_from_string(const std::string& s);
std::string to_string(PathKind k);

struct BBox {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

/// Named walk shape inside bbox at constant speed. Throws ConfigError for a
/// degenerate box or nonpositive speed.
GroundTruthPath make_path(PathKind kind, const BBox& bbox, double speed_mps);

struct CsiTrace {
    struct Header {
        uint32_t rate_hz = 1000;
        uint8_t antennas = 6;
        std::vector<double> subcarriers_hz;
        double start_time_s = 0.0;
    };
    Header header;
    // frames[packet * antennas + antenna][subcarrier]
    std::vector<std::vector<std::complex<float>>> frames;

    size_t packets() const;
    double duration_s() const;
    const std::vector<std::complex<float>>& frame(size_t packet, int antenna) const;
};

/// Sum-of-paths CFR per packet/antenna/subcarrier. Noise draws are seeded and
/// ordered packet-major so traces are byte-identical across runs.
CsiTrace synthesize(const Scene& scene, const GroundTruthPath& path, double rate_hz,
                    double duration_s, uint64_t noise_seed = 0);

/// |H|^2, time x antenna x subcarrier.
struct PowerMatrix {
    size_t packets = 0;
    int antennas = 0;
    int subcarriers = 0;
    std::vector<double> values;  // [packet][antenna][subcarrier] flattened

    double& at(size_t packet, int antenna, int sub);
    double at(size_t packet, int antenna, int sub) const;
};

PowerMatrix cfr_power(const CsiTrace& trace);

}  // namespace meshtrack
