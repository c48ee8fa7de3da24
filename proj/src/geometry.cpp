#include "meshtrack/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshtrack/errors.hpp"

namespace meshtrack {

Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
double norm(Point2 p) { return std::hypot(p.x, p.y); }
double distance(Point2 a, Point2 b) { return norm(a - b); }

double path_length(Point2 p, Point2 tx, Point2 rx) {
    return distance(p, tx) + distance(p, rx);
}

Ellipse Ellipse::make(Point2 focus_tx, Point2 focus_rx, double length) {
    const double focal = distance(focus_tx, focus_rx);
    if (!(length > focal + kGeomEps)) {
        throw ConfigError("ellipse length must exceed focal distance");
    }
    return Ellipse{focus_tx, focus_rx, length};
}

double Ellipse::residual(Point2 p) const {
    return path_length(p, focus_tx, focus_rx) - length;
}

Point2 Ellipse::at(double phi) const {
    const Point2 center = 0.5 * (focus_tx + focus_rx);
    const double c = 0.5 * distance(focus_tx, focus_rx);
    const double a = 0.5 * length;
    const double b = std::sqrt(std::max(a * a - c * c, 0.0));
    Point2 u{1.0, 0.0};
    if (c > 0.0) u = (1.0 / (2.0 * c)) * (focus_rx - focus_tx);
    const Point2 v{-u.y, u.x};
    return center + (a * std::cos(phi)) * u + (b * std::sin(phi)) * v;
}

namespace {

// Bisection on the sign of e2's residual along e1's boundary.
Point2 refine_root(const Ellipse& e1, const Ellipse& e2, double lo, double hi,
                   double f_lo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Point2 p = e1.at(mid);
        const double f = e2.residual(p);
        if (std::abs(f) < 1e-12 || (hi - lo) < 1e-15) return p;
        if ((f < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
    }
    return e1.at(0.5 * (lo + hi));
}

}  // namespace

Point2 intersect_ellipses(const Ellipse& e1, const Ellipse& e2, const HalfPlane& side,
                          std::optional<Point2> near_hint) {
    constexpr int kSamples = 2048;
    constexpr double kTwoPi = 2.0 * M_PI;

    std::vector<double> phis(kSamples + 1);
    std::vector<double> res(kSamples + 1);
    std::vector<bool> inside(kSamples + 1);
    double max_abs = 0.0;
    for (int i = 0; i <= kSamples; ++i) {
        const double phi = kTwoPi * static_cast<double>(i) / kSamples;
        const Point2 p = e1.at(phi);
        phis[i] = phi;
        res[i] = e2.residual(p);
        inside[i] = side.contains(p);
        max_abs = std::max(max_abs, std::abs(res[i]));
    }
    if (max_abs < 1e-7) {
        throw NoIntersection("ellipses coincide within tolerance");
    }

    std::vector<Point2> roots;
    for (int i = 0; i < kSamples; ++i) {
        if (!inside[i] && !inside[i + 1]) continue;
        const double f0 = res[i];
        const double f1 = res[i + 1];
        if (f0 == 0.0) {
            roots.push_back(e1.at(phis[i]));
            continue;
        }
        if ((f0 < 0.0) != (f1 < 0.0)) {
            roots.push_back(refine_root(e1, e2, phis[i], phis[i + 1], f0));
        }
    }

    std::vector<Point2> valid;
    for (const Point2& r : roots) {
        if (side.contains(r) && std::abs(e2.residual(r)) < 1e-7) valid.push_back(r);
    }
    if (valid.empty()) {
        throw NoIntersection("no ellipse intersection in requested half-plane");
    }
    if (!near_hint) return valid.front();
    return *std::min_element(valid.begin(), valid.end(), [&](Point2 a, Point2 b) {
        return distance(a, *near_hint) < distance(b, *near_hint);
    });
}

Point2 AntennaLayout::line_direction() const {
    // Span the line with the two antennas farthest apart; tx alone carries no
    // direction.
    Point2 best_a = tx;
    Point2 best_b = rx[0][0];
    double best = 0.0;
    std::vector<Point2> all{tx};
    for (const auto& r : rx)
        for (const Point2& p : r) all.push_back(p);
    for (size_t i = 0; i < all.size(); ++i) {
        for (size_t j = i + 1; j < all.size(); ++j) {
            const double d = distance(all[i], all[j]);
            if (d > best) {
                best = d;
                best_a = all[i];
                best_b = all[j];
            }
        }
    }
    if (best <= 0.0) throw ConfigError("antenna layout is a single point");
    return (1.0 / best) * (best_b - best_a);
}

double AntennaLayout::line_distance(Point2 p) const {
    const Point2 d = line_direction();
    const Point2 rel = p - tx;
    return std::abs(rel.x * d.y - rel.y * d.x);
}

HalfPlane AntennaLayout::monitor_half_plane() const {
    const Point2 d = line_direction();
    Point2 n{-d.y, d.x};
    if (monitor_side < 0) n = -1.0 * n;
    return HalfPlane{tx, n};
}

void AntennaLayout::validate() const {
    if (monitor_side != 1 && monitor_side != -1) {
        throw ConfigError("monitor_side must be +1 or -1");
    }
    if (!(spacing > 0.0)) throw ConfigError("antenna spacing must be positive");
    for (int r = 0; r < 2; ++r) {
        for (int i = 0; i < 3; ++i) {
            if (line_distance(rx[r][i]) > kCollinearityTol) {
                throw ConfigError("antennas are not collinear: rx" + std::to_string(r + 1) +
                                  " antenna " + std::to_string(i));
            }
        }
        const double s1 = distance(rx[r][0], rx[r][1]);
        const double s2 = distance(rx[r][1], rx[r][2]);
        if (std::abs(s1 - spacing) > kCollinearityTol || std::abs(s2 - spacing) > kCollinearityTol) {
            throw ConfigError("receiver " + std::to_string(r + 1) +
                              " antenna spacing deviates from configured spacing");
        }
    }
}

namespace {

struct EllipseFamilies {
    std::array<std::array<Ellipse, 3>, 2> family;  // [receiver][s+1]
    std::array<double, 2> reference_lengths;
    std::array<std::array<int, 3>, 2> antenna_for;
    HalfPlane half;
};

EllipseFamilies prepare_families(const AntennaLayout& layout, Point2 current) {
    EllipseFamilies out;
    out.half = layout.monitor_half_plane();
    if (!out.half.contains(current)) {
        throw DegenerateMesh("current position outside monitor half-plane");
    }
    if (layout.line_distance(current) < kMinLineClearance) {
        throw DegenerateMesh("current position too close to antenna line");
    }
    for (int r = 0; r < 2; ++r) {
        const double ref_len = path_length(current, layout.tx, layout.reference(r));
        out.reference_lengths[r] = ref_len;

        // Aux whose ellipse of length ref_len encloses the current position is
        // the outward one; with both aux sums on the same side of ref_len the
        // smaller sum still lies further outward. Ties keep label order.
        const double len_a = path_length(current, layout.tx, layout.antenna(r, 0));
        const double len_b = path_length(current, layout.tx, layout.antenna(r, 2));
        const int outward_idx = (len_b < len_a) ? 2 : 0;
        const int inward_idx = (outward_idx == 0) ? 2 : 0;

        out.antenna_for[r] = {inward_idx, AntennaLayout::kReference, outward_idx};
        for (int s = -1; s <= 1; ++s) {
            const Point2 focus = layout.antenna(r, out.antenna_for[r][s + 1]);
            try {
                out.family[r][s + 1] = Ellipse::make(layout.tx, focus, ref_len);
            } catch (const ConfigError&) {
                throw DegenerateMesh("reference length does not span auxiliary focus");
            }
        }
    }
    return out;
}

}  // namespace

MeshModel build_mesh(const AntennaLayout& layout, Point2 current) {
    const EllipseFamilies fam = prepare_families(layout, current);

    MeshModel mesh;
    mesh.current = current;
    mesh.reference_lengths = fam.reference_lengths;
    mesh.antenna_for = fam.antenna_for;

    for (int s1 = -1; s1 <= 1; ++s1) {
        for (int s2 = -1; s2 <= 1; ++s2) {
            if (s1 == 0 && s2 == 0) {
                mesh.landmarks[1][1] = current;
                continue;
            }
            try {
                mesh.landmarks[s1 + 1][s2 + 1] =
                    intersect_ellipses(fam.family[0][s1 + 1], fam.family[1][s2 + 1], fam.half,
                                       current);
            } catch (const NoIntersection& e) {
                throw DegenerateMesh("mesh landmark (" + std::to_string(s1) + "," +
                                     std::to_string(s2) + ") failed: " + e.what());
            }
        }
    }
    return mesh;
}

MeshCell build_mesh_cell(const AntennaLayout& layout, Point2 current, int s1, int s2) {
    if (s1 == 0 && s2 == 0) throw ConfigError("mesh cell (0,0) is the current position");
    const EllipseFamilies fam = prepare_families(layout, current);

    MeshCell cell;
    cell.reference_lengths = fam.reference_lengths;
    const int sel[2] = {s1, s2};
    for (int r = 0; r < 2; ++r) {
        cell.aux_antenna[r] = fam.antenna_for[r][sel[r] + 1];
        cell.aux_gap[r] =
            fam.reference_lengths[r] -
            path_length(current, layout.tx, layout.antenna(r, cell.aux_antenna[r]));
    }
    try {
        cell.landmark = intersect_ellipses(fam.family[0][s1 + 1], fam.family[1][s2 + 1],
                                           fam.half, current);
    } catch (const NoIntersection& e) {
        throw DegenerateMesh("mesh landmark (" + std::to_string(s1) + "," + std::to_string(s2) +
                             ") failed: " + e.what());
    }
    return cell;
}

std::optional<Point2> landmark_for(const MeshModel& mesh, EllipseTrend t1, EllipseTrend t2) {
    if (t1 == EllipseTrend::On && t2 == EllipseTrend::On) return std::nullopt;
    return mesh.landmark(static_cast<int>(t1), static_cast<int>(t2));
}

DirectionErrorBound direction_error_bound(const MeshModel&) {
    const double half_sector = 22.5;
    const double ratio = 1.0 / std::cos(half_sector * M_PI / 180.0) - 1.0;
    return {half_sector, ratio};
}

}  // namespace meshtrack
