#pragma once

// Independent oracles used to freeze expected values: deliberately slow,
// brute-force implementations kept separate from the library code paths they
// check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "meshtrack/geometry.hpp"

namespace meshtrack::oracle {

/// Distance sum re-evaluated in extended precision.
inline long double path_length_hp(Point2 p, Point2 tx, Point2 rx) {
    const long double dx1 = static_cast<long double>(p.x) - tx.x;
    const long double dy1 = static_cast<long double>(p.y) - tx.y;
    const long double dx2 = static_cast<long double>(p.x) - rx.x;
    const long double dy2 = static_cast<long double>(p.y) - rx.y;
    return sqrtl(dx1 * dx1 + dy1 * dy1) + sqrtl(dx2 * dx2 + dy2 * dy2);
}

/// Dense-sampling ellipse intersection: samples e1's boundary, keeps the
/// smallest |e2 residual| in the half-plane, refines by bisection on the
/// bracketing interval. Nearest root to `hint` when several brackets exist.
inline Point2 intersect_dense(const Ellipse& e1, const Ellipse& e2, const HalfPlane& side,
                              Point2 hint, int samples = 1000000) {
    const double step = 2.0 * M_PI / samples;
    std::vector<std::pair<double, double>> brackets;  // (phi_lo, phi_hi)
    double prev_phi = 0.0;
    double prev_res = e2.residual(e1.at(0.0));
    bool prev_in = side.contains(e1.at(0.0));
    for (int i = 1; i <= samples; ++i) {
        const double phi = i * step;
        const Point2 p = e1.at(phi);
        const double res = e2.residual(p);
        const bool in = side.contains(p);
        if ((in || prev_in) && (res < 0.0) != (prev_res < 0.0)) {
            brackets.emplace_back(prev_phi, phi);
        }
        prev_phi = phi;
        prev_res = res;
        prev_in = in;
    }
    Point2 best{};
    double best_d = std::numeric_limits<double>::infinity();
    for (auto [lo, hi] : brackets) {
        double f_lo = e2.residual(e1.at(lo));
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f = e2.residual(e1.at(mid));
            if ((f < 0.0) == (f_lo < 0.0)) {
                lo = mid;
                f_lo = f;
            } else {
                hi = mid;
            }
        }
        const Point2 p = e1.at(0.5 * (lo + hi));
        if (!side.contains(p)) continue;
        const double d = distance(p, hint);
        if (d < best_d) {
            best_d = d;
            best = p;
        }
    }
    if (!std::isfinite(best_d)) throw std::runtime_error("oracle found no intersection");
    return best;
}

/// Exhaustive minimum-cost transport between equal-size multisets with unit
/// weights and |.| ground distance: minimum over all assignments.
inline double emd_exhaustive(std::vector<double> u, std::vector<double> v) {
    std::vector<size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::sort(idx.begin(), idx.end());
    do {
        double cost = 0.0;
        for (size_t i = 0; i < u.size(); ++i) cost += std::abs(u[i] - v[idx[i]]);
        best = std::min(best, cost);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best / static_cast<double>(u.size());
}

/// Exhaustive minimum of the refinement objective over all C^K sequences.
inline double dp_exhaustive(const std::vector<std::vector<double>>& rows,
                            const std::vector<int>& offsets, double omega, double period) {
    const size_t K = rows.size();
    const size_t C = offsets.size();
    double best = std::numeric_limits<double>::infinity();
    std::vector<size_t> pick(K, 0);
    while (true) {
        double cost = rows[0][pick[0]];
        for (size_t k = 1; k < K; ++k) {
            cost += rows[k][pick[k]] +
                    omega * std::abs(offsets[pick[k]] - offsets[pick[k - 1]]) / period;
        }
        best = std::min(best, cost);
        size_t k = 0;
        while (k < K && ++pick[k] == C) {
            pick[k] = 0;
            ++k;
        }
        if (k == K) break;
    }
    return best;
}

/// Brute-force band-constrained DTW total cost over all monotone alignments.
inline double dtw_exhaustive(const std::vector<Point2>& a, const std::vector<Point2>& b,
                             int window) {
    const size_t n = a.size();
    std::vector<std::vector<double>> memo(n, std::vector<double>(n, -1.0));
    const double inf = std::numeric_limits<double>::infinity();
    auto ground = [&](size_t i, size_t j) { return distance(a[i], b[j]); };
    // Plain recursion with memo; independent of the library's iterative DP.
    std::function<double(size_t, size_t)> go = [&](size_t i, size_t j) -> double {
        if (std::abs(static_cast<long>(i) - static_cast<long>(j)) > window) return inf;
        if (i == 0 && j == 0) return ground(0, 0);
        if (memo[i][j] >= 0.0) return memo[i][j];
        double prev = inf;
        if (i > 0 && j > 0) prev = std::min(prev, go(i - 1, j - 1));
        if (i > 0) prev = std::min(prev, go(i - 1, j));
        if (j > 0) prev = std::min(prev, go(i, j - 1));
        return memo[i][j] = ground(i, j) + prev;
    };
    return go(n - 1, n - 1);
}

}  // namespace meshtrack::oracle
