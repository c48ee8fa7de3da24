#pragma once

// Shared fixtures for the test suites: canonical layouts, scenes, and small
// builders used across modules.

#include <vector>

#include "meshtrack/channel_sim.hpp"
#include "meshtrack/geometry.hpp"

namespace meshtrack::testing {

inline AntennaLayout layout_with_ref_distance(double ref_dist, double spacing = 0.2) {
    AntennaLayout l;
    l.tx = {0.0, 0.0};
    l.rx[0] = {{{-ref_dist - spacing, 0.0}, {-ref_dist, 0.0}, {-ref_dist + spacing, 0.0}}};
    l.rx[1] = {{{ref_dist - spacing, 0.0}, {ref_dist, 0.0}, {ref_dist + spacing, 0.0}}};
    l.monitor_side = +1;
    l.spacing = spacing;
    return l;
}

inline AntennaLayout office_layout() { return layout_with_ref_distance(1.0); }
inline AntennaLayout classroom_layout() { return layout_with_ref_distance(2.1); }

inline GroundTruthPath segment_path(Point2 a, Point2 b, double speed) {
    GroundTruthPath p;
    p.waypoints.push_back({0.0, a});
    p.waypoints.push_back({distance(a, b) / speed, b});
    return p;
}

/// Waypoints on the reference ellipse of `receiver`, starting at `from`, long
/// enough to cover `duration` at `speed`. Sign +1 walks in the direction that
/// lengthens the other receiver's path. Waypoints are spaced one packet apart
/// so interpolation never leaves the arc.
inline GroundTruthPath arc_path_on_reference_ellipse(const AntennaLayout& layout, int receiver,
                                                     Point2 from, double speed, double duration,
                                                     int direction_sign, double rate_hz = 1000.0) {
    const Point2 focus = layout.reference(receiver);
    const Ellipse ell = Ellipse::make(layout.tx, focus, path_length(from, layout.tx, focus));

    // Eccentric angle of the start point.
    const Point2 center = 0.5 * (layout.tx + focus);
    const double c = 0.5 * distance(layout.tx, focus);
    const double a = 0.5 * ell.length;
    const double b = std::sqrt(a * a - c * c);
    Point2 u{1.0, 0.0};
    if (c > 0.0) u = (1.0 / (2.0 * c)) * (focus - layout.tx);
    const Point2 v{-u.y, u.x};
    const Point2 rel = from - center;
    double phi = std::atan2(dot(rel, v) / b, dot(rel, u) / a);

    const int other = 1 - receiver;
    const double dt = 1.0 / rate_hz;
    GroundTruthPath path;
    Point2 cur = ell.at(phi);
    path.waypoints.push_back({0.0, cur});
    // Pick the phi direction that moves the other family the requested way.
    const double probe_step = 1e-4;
    const double f0 = path_length(ell.at(phi), layout.tx, layout.reference(other));
    const double f1 = path_length(ell.at(phi + probe_step), layout.tx, layout.reference(other));
    double dir = (f1 > f0) == (direction_sign > 0) ? 1.0 : -1.0;

    const size_t n = static_cast<size_t>(duration * rate_hz) + 2;
    for (size_t i = 1; i < n; ++i) {
        // Advance by arc length speed*dt using the local parametric rate.
        const double dp_dphi =
            std::hypot(-a * std::sin(phi) * u.x + b * std::cos(phi) * v.x,
                       -a * std::sin(phi) * u.y + b * std::cos(phi) * v.y);
        phi += dir * speed * dt / dp_dphi;
        cur = ell.at(phi);
        path.waypoints.push_back({static_cast<double>(i) * dt, cur});
    }
    return path;
}

inline Scene quiet_scene(const AntennaLayout& layout, uint64_t seed = 7) {
    Scene s = Scene::default_scene(layout, seed);
    s.noise_sigma = 0.0;
    return s;
}

}  // namespace meshtrack::testing
