#pragma once

// Ellipse mesh geometry: constant-path-length ellipses around a transmitter /
// receiver pair, numeric co-focal intersection, and the 3x3 landmark mesh
// spanned by the two receiver families.

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace meshtrack {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

Point2 operator+(Point2 a, Point2 b);
Point2 operator-(Point2 a, Point2 b);
Point2 operator*(double s, Point2 p);
double dot(Point2 a, Point2 b);
double norm(Point2 p);
double distance(Point2 a, Point2 b);

inline constexpr double kGeomEps = 1e-9;           // meters
inline constexpr double kCollinearityTol = 1e-6;   // meters
inline constexpr double kMinLineClearance = 0.1;   // meters

/// Sum of distances from p to the two foci.
double path_length(Point2 p, Point2 tx, Point2 rx);

/// Locus of points with |P-focus_tx| + |P-focus_rx| == length.
struct Ellipse {
    Point2 focus_tx;
    Point2 focus_rx;
    double length = 0.0;

    /// Throws ConfigError unless length exceeds the focal distance by kGeomEps.
    static Ellipse make(Point2 focus_tx, Point2 focus_rx, double length);

    /// Signed residual of p against the ellipse equation (0 on the boundary).
    double residual(Point2 p) const;
    /// Point at eccentric angle phi (measured in the ellipse frame).
    Point2 at(double phi) const;
};

/// Open half-plane {p : dot(p - anchor, normal) > 0}.
struct HalfPlane {
    Point2 anchor;
    Point2 normal;  // unit
    bool contains(Point2 p) const { return dot(p - anchor, normal) > 0.0; }
};

/// Numeric intersection of two ellipses sharing focus_tx, restricted to a
/// half-plane. Samples e1 by eccentric angle, brackets sign changes of e2's
/// residual and refines by bisection. When several roots survive the
/// half-plane filter the one nearest `near_hint` wins.
/// Throws NoIntersection when the ellipses are coincident, tangent below
/// tolerance, or disjoint in the half-plane.
Point2 intersect_ellipses(const Ellipse& e1, const Ellipse& e2, const HalfPlane& side,
                          std::optional<Point2> near_hint = std::nullopt);

/// One transmitter antenna plus two receivers of three collinear antennas
/// each, ordered [aux_a, reference, aux_b].
struct AntennaLayout {
    Point2 tx;
    std::array<std::array<Point2, 3>, 2> rx;
    int monitor_side = +1;       // sign of the tracked half-plane
    double spacing = 0.2;        // adjacent antenna spacing, meters

    static constexpr int kReference = 1;

    Point2 reference(int receiver) const { return rx[receiver][kReference]; }
    Point2 antenna(int receiver, int idx) const { return rx[receiver][idx]; }

    /// Unit direction of the (common) antenna line.
    Point2 line_direction() const;
    /// Distance from p to the antenna line.
    double line_distance(Point2 p) const;
    HalfPlane monitor_half_plane() const;

    /// Throws ConfigError when the seven antennas are not collinear within
    /// kCollinearityTol or per-receiver spacing deviates from `spacing`.
    void validate() const;
};

enum class EllipseTrend { Inward = -1, On = 0, Outward = +1 };

/// 3x3 grid of ellipse-family intersections around the current position.
/// Index s in {-1,0,+1} selects inward-aux / reference / outward-aux per
/// family; landmark(0,0) is the current position.
struct MeshModel {
    std::array<std::array<Point2, 3>, 3> landmarks;  // [s1+1][s2+1]
    std::array<double, 2> reference_lengths;
    Point2 current;
    // Physical antenna index (0..2 within the receiver) backing each s value.
    std::array<std::array<int, 3>, 2> antenna_for;   // [family][s+1]

    Point2 landmark(int s1, int s2) const { return landmarks[s1 + 1][s2 + 1]; }
    int antenna_index(int family, int s) const { return antenna_for[family][s + 1]; }
};

/// Builds the mesh at `current`. Throws DegenerateMesh when the position is
/// closer than kMinLineClearance to the antenna line, outside the monitor
/// half-plane, or any of the nine intersections fails.
MeshModel build_mesh(const AntennaLayout& layout, Point2 current);

/// One mesh cell: the landmark for a specific (s1, s2) selector plus the
/// per-family backing antennas and aux-ellipse gaps. Lets the tracker keep
/// going when an unrelated corner of the full mesh degenerates.
struct MeshCell {
    Point2 landmark;
    std::array<double, 2> reference_lengths;
    std::array<int, 2> aux_antenna;  // local antenna index per family
    std::array<double, 2> aux_gap;   // ref_len - path_length(current, tx, aux)
};

MeshCell build_mesh_cell(const AntennaLayout& layout, Point2 current, int s1, int s2);

/// Maps a per-receiver trend pair onto the landmark grid; (On, On) means the
/// target is stationary and yields nullopt.
std::optional<Point2> landmark_for(const MeshModel& mesh, EllipseTrend t1, EllipseTrend t2);

struct DirectionErrorBound {
    double degrees;
    double speed_ratio;
};

/// Sector half-angle implied by the 8 mesh directions and the matching
/// relative speed bound 1/cos(22.5 deg) - 1.
DirectionErrorBound direction_error_bound(const MeshModel& mesh);

}  // namespace meshtrack
