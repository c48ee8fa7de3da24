#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "helpers.hpp"
#include "meshtrack/channel_sim.hpp"
#include "meshtrack/errors.hpp"

using namespace meshtrack;
using meshtrack::testing::office_layout;
using meshtrack::testing::quiet_scene;

TEST_CASE("static channel: no target, no noise, identical frames") {
    Scene scene = quiet_scene(office_layout());
    scene.human = {HumanAmplitudeModel::Kind::Constant, 0.0};
    const GroundTruthPath empty{};
    const CsiTrace trace = synthesize(scene, empty, 1000.0, 0.2, 3);
    REQUIRE(trace.packets() == 200);
    for (size_t p = 1; p < trace.packets(); ++p) {
        for (int a = 0; a < trace.header.antennas; ++a) {
            CHECK(trace.frame(p, a) == trace.frame(0, a));
        }
    }
}

TEST_CASE("power conservation with only the line of sight") {
    Scene scene = quiet_scene(office_layout());
    scene.scatterers.clear();
    scene.human = {HumanAmplitudeModel::Kind::Constant, 0.0};
    scene.los_amplitude = 1.0;
    const CsiTrace trace = synthesize(scene, {}, 1000.0, 0.05, 1);
    const PowerMatrix pm = cfr_power(trace);
    for (size_t p = 0; p < pm.packets; ++p) {
        for (int a = 0; a < pm.antennas; ++a) {
            for (int s = 0; s < pm.subcarriers; ++s) {
                CHECK(pm.at(p, a, s) == doctest::Approx(1.0).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("cfr_power equals the two-path expansion") {
    // Single frame, constant amplitudes, no scatterers: |H|^2 must equal
    // a0^2 + ah^2 + 2 a0 ah cos(rho0).
    AntennaLayout layout = office_layout();
    Scene scene = quiet_scene(layout);
    scene.scatterers.clear();
    scene.human = {HumanAmplitudeModel::Kind::Constant, 0.3};
    const Point2 target{0.4, 1.9};
    GroundTruthPath path;
    path.waypoints = {{0.0, target}, {1.0, target}};
    const CsiTrace trace = synthesize(scene, path, 1000.0, 0.01, 1);
    const PowerMatrix pm = cfr_power(trace);

    std::vector<Point2> ants;
    for (int r = 0; r < 2; ++r)
        for (int i = 0; i < 3; ++i) ants.push_back(layout.antenna(r, i));
    for (int a = 0; a < 6; ++a) {
        const double d0 = distance(layout.tx, ants[a]);
        const double dh = path_length(target, layout.tx, ants[a]);
        for (int s = 0; s < pm.subcarriers; ++s) {
            const double f = trace.header.subcarriers_hz[s];
            // Cross term of a0 e^{-jk d0} and ah e^{-jk dh + j phi0}.
            const double rho =
                2.0 * M_PI * f * (dh - d0) / kSpeedOfLight - scene.constant_phase;
            const double expected = 1.0 + 0.3 * 0.3 + 2.0 * 0.3 * std::cos(rho);
            CHECK(pm.at(0, a, s) == doctest::Approx(expected).epsilon(1e-5));
        }
    }
}

TEST_CASE("cfr_power is the squared magnitude") {
    CsiTrace trace;
    trace.header.rate_hz = 10;
    trace.header.antennas = 1;
    trace.header.subcarriers_hz = {1e9, 2e9};
    trace.frames = {{{1.0f, 0.0f}, {-2.5f, 1.5f}}};
    const PowerMatrix pm = cfr_power(trace);
    CHECK(pm.at(0, 0, 0) == doctest::Approx(1.0));
    CHECK(pm.at(0, 0, 1) == doctest::Approx(2.5 * 2.5 + 1.5 * 1.5));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<float> u(-3.0f, 3.0f);
    for (int i = 0; i < 100; ++i) {
        const float re = u(rng), im = u(rng);
        trace.frames[0][0] = {re, im};
        const PowerMatrix q = cfr_power(trace);
        CHECK(q.at(0, 0, 0) ==
              doctest::Approx(static_cast<double>(re) * re + static_cast<double>(im) * im));
    }
}

TEST_CASE("radial walk produces the analytic fringe count") {
    // d_h grows at a known rate; the power of one subcarrier must oscillate
    // once per carrier wavelength of path-length change.
    AntennaLayout layout = office_layout();
    Scene scene = quiet_scene(layout);
    scene.scatterers.clear();
    scene.human = {HumanAmplitudeModel::Kind::Constant, 0.3};
    GroundTruthPath path = meshtrack::testing::segment_path({0.0, 1.5}, {0.0, 3.5}, 1.0);
    const CsiTrace trace = synthesize(scene, path, 1000.0, 2.0, 1);
    const PowerMatrix pm = cfr_power(trace);

    const int antenna = 1;  // receiver 1 reference
    const int sub = 0;
    const double f = trace.header.subcarriers_hz[sub];
    const Point2 ant = layout.reference(0);
    const double dh0 = path_length({0.0, 1.5}, layout.tx, ant);
    const double dh1 = path_length({0.0, 3.5}, layout.tx, ant);
    const double expected_fringes = (dh1 - dh0) * f / kSpeedOfLight;

    double mean = 0.0;
    for (size_t p = 0; p < pm.packets; ++p) mean += pm.at(p, antenna, sub);
    mean /= static_cast<double>(pm.packets);
    int crossings = 0;
    bool above = pm.at(0, antenna, sub) > mean;
    for (size_t p = 1; p < pm.packets; ++p) {
        const bool now = pm.at(p, antenna, sub) > mean;
        if (now != above) ++crossings;
        above = now;
    }
    CHECK(std::abs(crossings / 2.0 - expected_fringes) <= 2.0);
}

TEST_CASE("synthesize is deterministic under a seed") {
    Scene scene = quiet_scene(office_layout());
    scene.noise_sigma = 0.05;
    const GroundTruthPath path = meshtrack::testing::segment_path({0, 1.6}, {0, 2.6}, 1.0);
    const CsiTrace a = synthesize(scene, path, 1000.0, 1.0, 42);
    const CsiTrace b = synthesize(scene, path, 1000.0, 1.0, 42);
    REQUIRE(a.frames.size() == b.frames.size());
    for (size_t i = 0; i < a.frames.size(); ++i) CHECK(a.frames[i] == b.frames[i]);

    const CsiTrace c = synthesize(scene, path, 1000.0, 1.0, 43);
    bool any_diff = false;
    for (size_t i = 0; i < a.frames.size() && !any_diff; ++i) any_diff = a.frames[i] != c.frames[i];
    CHECK(any_diff);
}

TEST_CASE("doubling amplitudes quadruples power") {
    AntennaLayout layout = office_layout();
    Scene scene = quiet_scene(layout);
    scene.human = {HumanAmplitudeModel::Kind::Constant, 0.2};
    GroundTruthPath path = meshtrack::testing::segment_path({0.1, 1.7}, {0.1, 2.2}, 1.0);

    Scene doubled = scene;
    doubled.los_amplitude *= 2.0;
    doubled.human.value *= 2.0;
    for (auto& sc : doubled.scatterers) sc.amplitude *= 2.0;

    const PowerMatrix p1 = cfr_power(synthesize(scene, path, 1000.0, 0.1, 1));
    const PowerMatrix p2 = cfr_power(synthesize(doubled, path, 1000.0, 0.1, 1));
    for (size_t i = 0; i < p1.values.size(); ++i) {
        CHECK(p2.values[i] == doctest::Approx(4.0 * p1.values[i]).epsilon(1e-4));
    }
}

TEST_CASE("equidistant antennas observe the same human phase term") {
    // Symmetric target: mirrored antennas see identical d_h, so after removing
    // the static part the human terms agree.
    AntennaLayout layout = office_layout();
    Scene scene = quiet_scene(layout);
    scene.scatterers.clear();
    scene.human = {HumanAmplitudeModel::Kind::Constant, 0.25};
    const Point2 target{0.0, 2.0};  // on the symmetry axis
    GroundTruthPath path;
    path.waypoints = {{0.0, target}, {1.0, target}};
    const CsiTrace with_human = synthesize(scene, path, 1000.0, 0.01, 1);
    Scene no_human = scene;
    no_human.human.value = 0.0;
    const CsiTrace without = synthesize(no_human, path, 1000.0, 0.01, 1);

    // Mirrored pairs: rx1 antenna i <-> rx2 antenna 2-i.
    for (int i = 0; i < 3; ++i) {
        for (size_t s = 0; s < with_human.header.subcarriers_hz.size(); ++s) {
            const std::complex<float> h1 = with_human.frame(0, i)[s] - without.frame(0, i)[s];
            const std::complex<float> h2 =
                with_human.frame(0, 3 + (2 - i))[s] - without.frame(0, 3 + (2 - i))[s];
            CHECK(std::abs(h1 - h2) < 1e-5f);
        }
    }
}

TEST_CASE("make_path shapes") {
    const BBox box{-1.5, 1.0, 1.5, 4.0};

    const GroundTruthPath straight = make_path(PathKind::Straight, box, 1.0);
    CHECK(straight.waypoints.size() == 2);
    CHECK(straight.duration() == doctest::Approx(3.0));
    CHECK(straight.total_length() == doctest::Approx(3.0));

    const GroundTruthPath z = make_path(PathKind::Z, {0.0, 0.0, 3.0, 3.0}, 1.0);
    REQUIRE(z.waypoints.size() == 4);
    // Turn angles at the two interior waypoints are 135 degrees in a square box.
    for (size_t i = 1; i + 1 < z.waypoints.size(); ++i) {
        const Point2 a = z.waypoints[i].p - z.waypoints[i - 1].p;
        const Point2 b = z.waypoints[i + 1].p - z.waypoints[i].p;
        const double turn =
            std::acos(dot(a, b) / (norm(a) * norm(b))) * 180.0 / M_PI;
        CHECK(turn == doctest::Approx(135.0).epsilon(1e-6));
    }

    const GroundTruthPath m = make_path(PathKind::M, box, 1.0);
    CHECK(m.waypoints.size() == 6);  // five segments
    // The first two segments reverse: a 180-degree turn-back.
    const Point2 s1 = m.waypoints[1].p - m.waypoints[0].p;
    const Point2 s2 = m.waypoints[2].p - m.waypoints[1].p;
    CHECK(dot(s1, s2) / (norm(s1) * norm(s2)) == doctest::Approx(-1.0));

    const GroundTruthPath arc = make_path(PathKind::Arc, box, 1.0);
    CHECK(arc.waypoints.size() > 10);
    for (const auto& w : arc.waypoints) {
        CHECK(w.p.x >= box.x0 - 1e-9);
        CHECK(w.p.x <= box.x1 + 1e-9);
        CHECK(w.p.y >= box.y0 - 1e-9);
        CHECK(w.p.y <= box.y1 + 1e-9);
    }

    CHECK_THROWS_AS(make_path(PathKind::Straight, box, 0.0), ConfigError);
    CHECK_THROWS_AS(make_path(PathKind::Straight, {0, 0, 0, 1}, 1.0), ConfigError);
    CHECK_THROWS_AS(path_kind_from_string("spiral"), ConfigError);
    CHECK(path_kind_from_string("straight") == PathKind::Straight);
    CHECK(to_string(PathKind::Arc) == "arc");
}

TEST_CASE("path interpolation clamps outside the waypoint span") {
    const GroundTruthPath p = meshtrack::testing::segment_path({0, 1}, {2, 1}, 1.0);
    CHECK(p.position_at(-5.0).x == doctest::Approx(0.0));
    CHECK(p.position_at(99.0).x == doctest::Approx(2.0));
    CHECK(p.position_at(1.0).x == doctest::Approx(1.0));
    const GroundTruthPath shifted = p.shifted(1.0);
    CHECK(shifted.position_at(1.0).x == doctest::Approx(0.0));
    CHECK(shifted.waypoints.front().t == doctest::Approx(1.0));
}

TEST_CASE("scene validation") {
    Scene scene = quiet_scene(office_layout());
    scene.noise_sigma = -0.1;
    CHECK_THROWS_AS(scene.validate(), ConfigError);
    scene.noise_sigma = 0.0;
    scene.subcarriers_hz = {2e9, 1e9};
    CHECK_THROWS_AS(scene.validate(), ConfigError);
    scene.subcarriers_hz = Scene::default_subcarriers(5.825e9);
    CHECK_NOTHROW(scene.validate());
    CHECK(scene.subcarriers_hz.size() == 30);
    CHECK(scene.subcarriers_hz.front() == doctest::Approx(5.825e9 - 20e6));
    CHECK(scene.subcarriers_hz.back() == doctest::Approx(5.825e9 + 20e6));
}
