#pragma once

// Arrival-time search: slide along the auxiliary antennas' SSD streams until
// their joint distribution matches the reference antennas' SSDs at the window
// start, then turn the landmark distance over the matched interval into a
// walking speed.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "meshtrack/direction.hpp"
#include "meshtrack/dsp.hpp"
#include "meshtrack/geometry.hpp"

namespace meshtrack {

inline constexpr double kMaxWalkingSpeed = 3.0;  // m/s, cap on plausible walking

/// 1-D Wasserstein-1 between two equal-size multisets: mean absolute
/// difference of the sorted sequences. Throws LengthMismatch.
double emd(const std::vector<double>& u, const std::vector<double>& v);
double emd(const SsdVector& u, const SsdVector& v);

struct ArrivalSearch {
    std::vector<int> candidate_offsets;  // packets after the window start
    std::vector<double> emd_curve;
    std::vector<double> cost_curve;      // emd + arrival evidence; equals emd_curve without probes
    size_t chosen = 0;                   // index of the first cost minimum
    bool low_confidence = false;         // cost dynamic range < 10% of mean
    // Interval implied by the velocity solve, in packets; may exceed the
    // search horizon when the crossing lies beyond it. 0 when unavailable.
    int combined_offset = 0;
    double solved_speed = 0.0;           // |v| from the two-family solve, m/s

    int chosen_offset() const { return candidate_offsets[chosen]; }
};

/// Interferometric gap probe for one receiver family. The subcarrier power
/// fringes advance by 2*pi*f/c per meter of reflected-path change and the
/// static channel only shifts each fringe by a per-subcarrier constant, so
/// the mean-removed subcarrier ensemble is rank-2 in (cos, sin) of the fringe
/// phase. Its principal pair demodulates the phase and thus the path-length
/// change of the auxiliary antenna; the arrival is where that change matches
/// the mesh gap between the current position and the auxiliary ellipse.
struct PhaseGapProbe {
    AntennaPowerView view;                      // smoothed aux antenna powers
    const std::vector<double>* freqs = nullptr; // subcarrier frequencies, Hz
    double rate_hz = 1000.0;
    double gap_m = 0.0;                         // signed aux-ellipse gap
    int trend_sign = +1;                        // sign of d(d_h)/dt; 0 pins the rate to zero
    Point2 gradient;                            // grad of the aux path length at the position
};

/// Unwrapped reflected-path-length change (meters, >= 0 and starting at 0) at
/// each of `count` packets from t0, demodulated from the subcarrier ensemble.
/// All zeros when the span carries no usable fringe. Exposed for tests;
/// search_arrival uses it internally.
std::vector<double> measure_path_change(const PhaseGapProbe& probe, size_t t0, size_t count);

/// Inputs for one receiver family: the reference SSD frozen at the window
/// start and the auxiliary antenna's SSD stream to scan. `lag_scale` maps the
/// reference lags onto the auxiliary antenna's geometry: SSD offsets grow
/// with the reflected-path excess over the line-of-sight path, and the
/// auxiliary antenna's LoS differs from the reference's, so the expected lag
/// at the crossing is the reference lag times
/// (ref_len - d0_aux) / (ref_len - d0_ref).
struct ArrivalFamilyInput {
    const SsdVector* reference = nullptr;
    const SsdCache* aux_stream = nullptr;
    double lag_scale = 1.0;
    std::optional<PhaseGapProbe> probe;  // enables the interferometric term
};

/// EMD curve over candidate arrival times t_k + j*step, j >= 1, up to
/// period_packets or the end of supported SSD starts, whichever is first.
/// Both families' vectors are concatenated on each side.
///
/// Without probes the chosen arrival is the plain EMD argmin. With probes,
/// each family's measured path-change rate enters the two-constraint velocity
/// solve grad_r . v = rate_r; the arrival is when that velocity covers the
/// landmark distance, and the cost curve adds the distance to that estimate
/// so the global refinement sees the same evidence. Throws EmptyCandidates
/// when no candidate is supported.
ArrivalSearch search_arrival(const ArrivalFamilyInput& fam1, const ArrivalFamilyInput& fam2,
                             size_t t_k, size_t period_packets, size_t step_packets,
                             double landmark_distance_m = 0.0);

/// Euclidean distance over the interval. Throws NonpositiveInterval.
double speed_from(Point2 current, Point2 landmark, double t_k_s, double t_k1_s);

/// One estimation window's outcome; positions and speeds are finalized by the
/// trajectory stage after global refinement.
struct VelocityStep {
    double window_start_s = 0.0;
    EllipseTrend trend1 = EllipseTrend::On;
    EllipseTrend trend2 = EllipseTrend::On;
    double interval_s = 0.0;  // refined arrival interval; 0 when stationary
    double speed_mps = 0.0;
    std::optional<ArrivalSearch> search;
    bool valid = true;
    std::string status = "ok";

    bool stationary() const {
        return trend1 == EllipseTrend::On && trend2 == EllipseTrend::On;
    }
};

}  // namespace meshtrack
