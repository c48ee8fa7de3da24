#include "meshtrack/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshtrack/errors.hpp"

namespace meshtrack {

namespace {

std::vector<double> normalized_row(const std::vector<double>& row) {
    double sum = 0.0;
    size_t finite = 0;
    for (double v : row) {
        if (v < kMissingEmd) {
            sum += v;
            ++finite;
        }
    }
    std::vector<double> out(row.size(), kMissingEmd);
    if (finite == 0) {
        // Nothing measurable: make the row flat so the coupling term decides.
        std::fill(out.begin(), out.end(), 1.0);
        return out;
    }
    const double mean = sum / static_cast<double>(finite);
    for (size_t i = 0; i < row.size(); ++i) {
        if (row[i] < kMissingEmd) out[i] = (mean > 0.0) ? row[i] / mean : row[i];
    }
    return out;
}

}  // namespace

std::vector<size_t> refine_arrivals(const EmdMatrix& m, double omega, double period_packets) {
    const size_t K = m.window_count();
    const size_t C = m.candidate_count();
    if (K == 0 || C == 0) throw EmptyMatrix("EMD matrix has no entries");
    if (omega < 0.0) throw ConfigError("omega must be nonnegative");
    if (!(period_packets > 0.0)) throw ConfigError("period must be positive");

    std::vector<std::vector<double>> cost(K);
    for (size_t k = 0; k < K; ++k) {
        if (m.rows[k].size() != C) throw EmptyMatrix("EMD rows disagree on the candidate grid");
        cost[k] = normalized_row(m.rows[k]);
        // Low-confidence windows carry no arrival evidence of their own; a
        // flat row lets the coupling term interpolate them from neighbors.
        if (k < m.low_confidence.size() && m.low_confidence[k]) {
            for (double& v : cost[k]) {
                if (v < kMissingEmd) v = 1.0;
            }
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(C);
    std::vector<std::vector<size_t>> parent(K, std::vector<size_t>(C, 0));
    for (size_t c = 0; c < C; ++c) dp[c] = (cost[0][c] < kMissingEmd) ? cost[0][c] : inf;

    std::vector<double> next(C);
    for (size_t k = 1; k < K; ++k) {
        for (size_t c = 0; c < C; ++c) {
            if (cost[k][c] >= kMissingEmd) {
                next[c] = inf;
                continue;
            }
            double best = inf;
            double best_jump = inf;
            size_t best_p = 0;
            for (size_t p = 0; p < C; ++p) {
                if (dp[p] == inf) continue;
                const double jump =
                    std::abs(static_cast<double>(m.candidate_offsets[c] - m.candidate_offsets[p]));
                const double v = dp[p] + omega * jump / period_packets;
                if (v < best || (v == best && (jump < best_jump || (jump == best_jump && p < best_p)))) {
                    best = v;
                    best_jump = jump;
                    best_p = p;
                }
            }
            next[c] = (best == inf) ? inf : best + cost[k][c];
            parent[k][c] = best_p;
        }
        dp.swap(next);
    }

    size_t last = 0;
    for (size_t c = 1; c < C; ++c) {
        if (dp[c] < dp[last]) last = c;
    }
    if (dp[last] == inf) throw EmptyMatrix("no feasible arrival sequence");

    std::vector<size_t> chosen(K);
    chosen[K - 1] = last;
    for (size_t k = K; k-- > 1;) chosen[k - 1] = parent[k][chosen[k]];
    return chosen;
}

RecoveredTrajectory recover(const std::vector<VelocityStep>& steps, Point2 initial,
                            const AntennaLayout& layout, double period_s, bool strict) {
    RecoveredTrajectory out;
    out.steps = steps;
    out.vertices.push_back({0.0, initial});

    Point2 pos = initial;
    double t = 0.0;
    for (size_t k = 0; k < out.steps.size(); ++k) {
        VelocityStep& step = out.steps[k];
        t += period_s;
        if (step.stationary() || !step.valid) {
            step.speed_mps = 0.0;
            out.vertices.push_back({t, pos});
            continue;
        }
        Point2 landmark;
        try {
            const MeshCell cell = build_mesh_cell(layout, pos, static_cast<int>(step.trend1),
                                                  static_cast<int>(step.trend2));
            landmark = cell.landmark;
        } catch (const DegenerateMesh& e) {
            if (strict) {
                throw DegenerateMesh(std::string(e.what()) + " (step " + std::to_string(k) + ")",
                                     static_cast<int>(k));
            }
            step.valid = false;
            step.speed_mps = 0.0;
            step.status = std::string("degenerate mesh at recovery: ") + e.what();
            out.vertices.push_back({t, pos});
            continue;
        }
        step.interval_s = std::max(step.interval_s, distance(pos, landmark) / kMaxWalkingSpeed);
        step.speed_mps = speed_from(pos, landmark, 0.0, step.interval_s);
        const Point2 dir = landmark - pos;
        const double scale = period_s / step.interval_s;
        pos = pos + scale * dir;
        out.vertices.push_back({t, pos});
    }
    return out;
}

}  // namespace meshtrack
