#pragma once

// Two-step walking-direction estimation. Per reference antenna, massed pairs
// of time-shifted SSD vectors ("virtual voters") accumulate sign distances;
// the summed statistic decides whether the target left the reference ellipse
// and the majority element sign decides to which side.

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "meshtrack/dsp.hpp"
#include "meshtrack/geometry.hpp"

namespace meshtrack {

struct VoterConfig {
    double period_ms = 128.0;      // T
    double window_ms = 32.0;       // T_w
    int window_count = 4;          // N
    int packet_delay = 5;          // delta, packets
    double kappa_threshold = 4.5;  // on the summed voter statistic

    void validate() const;
};

/// Memoizing per-packet SSD series for one antenna. The underlying power view
/// must outlive the cache.
class SsdCache {
public:
    SsdCache(AntennaPowerView view, std::vector<SubcarrierPair> pairs, size_t window_len,
             int max_lag, int antenna);

    const SsdVector& at(size_t packet) const;
    /// Last packet index with a fully supported SSD window.
    size_t max_start() const;
    int antenna() const { return antenna_; }
    size_t window_len() const { return window_len_; }

private:
    AntennaPowerView view_;
    std::vector<SubcarrierPair> pairs_;
    size_t window_len_;
    int max_lag_;
    int antenna_;
    mutable std::vector<std::unique_ptr<SsdVector>> memo_;
};

struct Voter {
    const SsdVector* first = nullptr;
    const SsdVector* second = nullptr;
};

/// SSD-vector pairs (S(i), S(i+delta)) from N evenly spaced windows of
/// window_ms span starting at window_start. Voters whose SSD support would
/// run past the series are dropped; throws InsufficientPackets when none can
/// be built.
std::vector<Voter> build_voters(const SsdCache& cache, const VoterConfig& cfg,
                                size_t window_start, double rate_hz);

struct DepartureResult {
    bool departed = false;
    double statistic = 0.0;  // accumulated kappa over all voters
};

DepartureResult ellipse_departure_test(const std::vector<Voter>& voters, const VoterConfig& cfg);

// Positive SSD majority (hi-frequency waveform leading) marks a lengthening
// reflection path, i.e. movement outward of the reference ellipse. Fixed by
// calibration against the simulator's radial walks.
inline constexpr int kOutwardSign = +1;

EllipseTrend trend_of(const std::vector<Voter>& voters, bool departed);

struct DirectionState {
    EllipseTrend trend[2] = {EllipseTrend::On, EllipseTrend::On};
    double statistic[2] = {0.0, 0.0};
    size_t voter_count[2] = {0, 0};
    int majority_sign[2] = {0, 0};

    bool stationary() const {
        return trend[0] == EllipseTrend::On && trend[1] == EllipseTrend::On;
    }
};

/// Runs departure + trend for both reference antennas over the window
/// starting at window_start.
DirectionState estimate_direction(const SsdCache& ref1, const SsdCache& ref2,
                                  const VoterConfig& cfg, size_t window_start, double rate_hz);

}  // namespace meshtrack
