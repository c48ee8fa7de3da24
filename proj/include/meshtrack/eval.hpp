#pragma once

// Trajectory accuracy metrics: arc-length resampling, band-constrained DTW
// averaged per matched sample, and aggregate statistics over trace batches.

#include <map>
#include <string>
#include <vector>

#include "meshtrack/geometry.hpp"

namespace meshtrack {

/// Arc-length-uniform linear resampling to exactly `samples` points. A
/// zero-length (or single-point) trajectory repeats its position.
std::vector<Point2> resample(const std::vector<Point2>& traj, int samples);

/// DTW with Euclidean ground distance and band constraint |i-j| <= window;
/// optimal path cost divided by the alignment path length. Throws
/// LengthMismatch on different sizes.
double dtw_error(const std::vector<Point2>& a, const std::vector<Point2>& b, int window);

struct ErrorReport {
    struct GroupStats {
        size_t count = 0;
        double median = 0.0;
        double p90 = 0.0;
    };
    double median = 0.0;
    double p90 = 0.0;
    std::vector<double> cdf;  // value at percentile p for p = 0..100
    std::map<std::string, GroupStats> groups;
};

/// Percentiles by linear interpolation between closest ranks; CDF sampled on
/// a 1% grid. `group_keys` (optional, parallel to errors) adds per-group
/// median/p90. Throws EmptyInput.
ErrorReport summarize(const std::vector<double>& errors,
                      const std::vector<std::string>& group_keys = {});

/// Closest-ranks linear interpolation percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

}  // namespace meshtrack
