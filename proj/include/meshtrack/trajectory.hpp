#pragma once

// Global refinement of the per-window arrival intervals (dynamic program over
// the joined EMD curves, penalizing interval jumps between adjacent windows)
// and assembly of the final trajectory polyline.

#include <vector>

#include "meshtrack/geometry.hpp"
#include "meshtrack/speed.hpp"

namespace meshtrack {

/// Sentinel for candidates a row could not evaluate (trace ran out).
inline constexpr double kMissingEmd = 1e300;

struct EmdMatrix {
    std::vector<int> candidate_offsets;     // shared grid, packets
    std::vector<std::vector<double>> rows;  // one per moving window, >= 0
    std::vector<bool> low_confidence;

    size_t window_count() const { return rows.size(); }
    size_t candidate_count() const { return candidate_offsets.size(); }
};

/// Minimizes sum_i [ EMD_i(dt_i)/row_mean_i + omega * |dt_{i+1} - dt_i| / T ]
/// over the candidate grid by dynamic programming. Rows are normalized by
/// their finite-entry mean so omega stays comparable across windows. Ties
/// prefer the smaller interval change, then the smaller index; omega = 0
/// degenerates to per-row first minima. Returns chosen candidate indices.
/// Throws EmptyMatrix.
std::vector<size_t> refine_arrivals(const EmdMatrix& m, double omega, double period_packets);

struct RecoveredTrajectory {
    struct Vertex {
        double t = 0.0;
        Point2 p;
    };
    std::vector<Vertex> vertices;       // window boundaries, steps + 1 points
    std::vector<VelocityStep> steps;    // refined steps with final speeds
};

/// Connects per-window displacements: from each position the chosen landmark
/// fixes the direction and the refined interval the speed; the position then
/// advances by speed * T along that direction so a window's displacement
/// covers the full period it stands for. Stationary or failed windows hold
/// position. Meshes are rebuilt at every new position; when one degenerates,
/// strict mode (the default) rethrows DegenerateMesh with the step index
/// attached, otherwise the step is marked failed and the position held.
RecoveredTrajectory recover(const std::vector<VelocityStep>& steps, Point2 initial,
                            const AntennaLayout& layout, double period_s, bool strict = true);

}  // namespace meshtrack
