#pragma once

// Stateful tracker: per estimation window it smooths powers, estimates the
// direction from the two reference antennas, picks the landmark, searches the
// arrival time on the matching auxiliary antennas, and finally refines all
// intervals globally before assembling the trajectory.

#include <memory>
#include <string>
#include <vector>

#include "meshtrack/channel_sim.hpp"
#include "meshtrack/direction.hpp"
#include "meshtrack/dsp.hpp"
#include "meshtrack/geometry.hpp"
#include "meshtrack/speed.hpp"
#include "meshtrack/trajectory.hpp"

namespace meshtrack {

struct TrackerConfig {
    VoterConfig voter;
    SgfConfig sgf;
    int pair_separation = 15;   // subcarrier index gap for SSD pairs
    // Lag search bounded to stay inside one power-fringe period at walking
    // speeds; wider searches admit aliased correlation peaks of the opposite
    // sign.
    int max_lag = 8;            // packets
    int arrival_step = 1;       // delta_t, packets
    double omega = 1.0;         // refinement weight
    Point2 initial;             // start position, required
    bool geometry_correction = true;
    // Power windows whose variance stays below flat_margin times the noise
    // variance surviving the smoother count as flat.
    double flat_margin = 3.0;

    void validate() const;
};

struct WindowDiagnostic {
    size_t window = 0;
    std::string status;         // "moving", "stationary", or an error note
    DirectionState direction;
    bool low_confidence = false;
};

struct TrackResult {
    RecoveredTrajectory trajectory;
    std::vector<WindowDiagnostic> diagnostics;
    EmdMatrix emd;              // rows for the moving windows, in order
};

struct TrackerState {
    Point2 position;
    size_t window_index = 0;
    std::vector<VelocityStep> steps;
    EmdMatrix emd;
    std::vector<size_t> emd_step_index;  // step backing each EMD row
    std::vector<WindowDiagnostic> diagnostics;
};

/// Owns the smoothed power series and SSD caches for one trace.
class Tracker {
public:
    Tracker(const CsiTrace& trace, const AntennaLayout& layout, const TrackerConfig& cfg);

    TrackerState initial_state() const;
    size_t window_count() const { return window_count_; }
    size_t period_packets() const { return period_packets_; }
    double rate_hz() const { return rate_hz_; }

    /// Advances one estimation window; appends the step and diagnostics.
    void step(TrackerState& state) const;

private:
    AntennaLayout layout_;
    TrackerConfig cfg_;
    double rate_hz_;
    size_t period_packets_;
    size_t window_count_;
    size_t window_packets_;
    std::vector<double> freqs_;
    PowerMatrix smoothed_;
    std::vector<double> noise_floors_;               // [antenna][subcarrier]
    std::vector<std::unique_ptr<SsdCache>> caches_;  // one per antenna

    AntennaPowerView antenna_view(int antenna) const;
    int global_antenna(int receiver, int idx) const { return receiver * 3 + idx; }
};

/// Full pipeline over the trace: ⌊duration/T⌋ windows, global refinement,
/// trajectory assembly.
TrackResult run(const CsiTrace& trace, const AntennaLayout& layout, const TrackerConfig& cfg);

}  // namespace meshtrack
