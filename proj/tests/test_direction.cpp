#include "doctest.h"

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "meshtrack/channel_sim.hpp"
#include "meshtrack/direction.hpp"
#include "meshtrack/errors.hpp"

using namespace meshtrack;
using namespace meshtrack::testing;

namespace {

// Synthetic voter machinery: SSD pairs with hand-picked sign patterns.
struct VoterPool {
    std::vector<SsdVector> storage;
    std::vector<Voter> voters;

    void add(std::vector<int> a, std::vector<int> b) {
        storage.reserve(storage.size() + 2);
        SsdVector s1, s2;
        s1.elements = std::move(a);
        s2.elements = std::move(b);
        for (auto* s : {&s1, &s2}) {
            s->flagged.assign(s->elements.size(), false);
            s->pairs.resize(s->elements.size());
            for (size_t i = 0; i < s->pairs.size(); ++i) {
                s->pairs[i] = {static_cast<int>(i) + 15, static_cast<int>(i)};
            }
        }
        storage.push_back(std::move(s1));
        storage.push_back(std::move(s2));
    }

    void finish() {
        for (size_t i = 0; i + 1 < storage.size(); i += 2) {
            voters.push_back({&storage[i], &storage[i + 1]});
        }
    }
};

struct SmoothedTrace {
    PowerMatrix pm;
    std::vector<SsdCache> caches;
};

SmoothedTrace prepare(const CsiTrace& trace) {
    SmoothedTrace out;
    out.pm = cfr_power(trace);
    SgfConfig sgf;
    std::vector<double> series(out.pm.packets);
    for (int a = 0; a < out.pm.antennas; ++a) {
        for (int s = 0; s < out.pm.subcarriers; ++s) {
            for (size_t p = 0; p < out.pm.packets; ++p) series[p] = out.pm.at(p, a, s);
            const auto sm = sgf_smooth(series, sgf);
            for (size_t p = 0; p < out.pm.packets; ++p) out.pm.at(p, a, s) = sm[p];
        }
    }
    out.caches.reserve(6);
    for (int a = 0; a < 6; ++a) {
        AntennaPowerView v;
        v.data = out.pm.values.data() + a * out.pm.subcarriers;
        v.packets = out.pm.packets;
        v.subcarriers = out.pm.subcarriers;
        v.stride = static_cast<size_t>(out.pm.antennas) * out.pm.subcarriers;
        out.caches.emplace_back(v, default_pairs(30), 32, 16, a);
    }
    return out;
}

}  // namespace

TEST_CASE("voter construction matches the stock parameter arithmetic") {
    // T=128ms, T_w=32ms, N=4, rate 1000, delta=5: window starts {0,32,64,96},
    // 27 pairs per window, 108 voters total.
    const AntennaLayout layout = office_layout();
    Scene scene = quiet_scene(layout);
    const CsiTrace trace =
        synthesize(scene, segment_path({0, 1.6}, {0, 2.2}, 1.0), 1000.0, 0.6, 2);
    SmoothedTrace st = prepare(trace);

    VoterConfig cfg;
    const auto voters = build_voters(st.caches[1], cfg, 0, 1000.0);
    REQUIRE(voters.size() == 108);
    // Enumerate the expected (start, start+5) pairs.
    size_t idx = 0;
    for (size_t w = 0; w < 4; ++w) {
        for (size_t i = 0; i + 5 < 32; ++i) {
            CHECK(voters[idx].first->window_start == w * 32 + i);
            CHECK(voters[idx].second->window_start == w * 32 + i + 5);
            ++idx;
        }
    }
}

TEST_CASE("voter count formula holds across configs") {
    const AntennaLayout layout = office_layout();
    Scene scene = quiet_scene(layout);
    const CsiTrace trace =
        synthesize(scene, segment_path({0, 1.6}, {0, 2.2}, 1.0), 1000.0, 0.8, 2);
    SmoothedTrace st = prepare(trace);

    for (int n_win : {1, 2, 4}) {
        for (int delta : {1, 5, 12}) {
            VoterConfig cfg;
            cfg.window_count = n_win;
            cfg.packet_delay = delta;
            const auto voters = build_voters(st.caches[1], cfg, 0, 1000.0);
            CHECK(voters.size() == static_cast<size_t>(n_win) * (32 - delta));
        }
    }
}

TEST_CASE("packet delay spanning the window yields InsufficientPackets") {
    const AntennaLayout layout = office_layout();
    Scene scene = quiet_scene(layout);
    const CsiTrace trace =
        synthesize(scene, segment_path({0, 1.6}, {0, 2.0}, 1.0), 1000.0, 0.4, 2);
    SmoothedTrace st = prepare(trace);
    VoterConfig cfg;
    cfg.packet_delay = 32;
    CHECK_THROWS_AS(build_voters(st.caches[1], cfg, 0, 1000.0), InsufficientPackets);
}

TEST_CASE("departure statistic accumulates kappa") {
    VoterPool pool;
    for (int i = 0; i < 108; ++i) pool.add({1, 2, 3}, {2, 2, 2});  // kappa = 1 each
    pool.finish();
    VoterConfig cfg;
    const DepartureResult r = ellipse_departure_test(pool.voters, cfg);
    CHECK(r.statistic == doctest::Approx(108.0));
    CHECK(r.departed);
}

TEST_CASE("random independent signs rarely cross the departure threshold") {
    // Null behavior of the threshold: with 108 independent voters of 15
    // elements each, P(sum kappa > 4.5) sits just under 5%.
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> sign(0, 1);
    VoterConfig cfg;
    int false_departures = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        VoterPool pool;
        for (int v = 0; v < 108; ++v) {
            std::vector<int> a(15), b(15);
            for (int i = 0; i < 15; ++i) {
                a[i] = sign(rng) ? 1 : -1;
                b[i] = sign(rng) ? 1 : -1;
            }
            pool.add(std::move(a), std::move(b));
        }
        pool.finish();
        if (ellipse_departure_test(pool.voters, cfg).departed) ++false_departures;
    }
    CHECK(false_departures < trials / 20);
}

TEST_CASE("adding agreeing voters never cancels a departure") {
    VoterConfig cfg;
    VoterPool pool;
    for (int i = 0; i < 10; ++i) pool.add({1, 1, 1}, {1, 1, 1});
    pool.finish();
    DepartureResult r = ellipse_departure_test(pool.voters, cfg);
    const bool before = r.departed;
    for (int extra = 0; extra < 50; ++extra) {
        VoterPool bigger;
        for (int i = 0; i < 10 + extra; ++i) bigger.add({1, 1, 1}, {1, 1, 1});
        bigger.finish();
        const DepartureResult r2 = ellipse_departure_test(bigger.voters, cfg);
        if (before) CHECK(r2.departed);
    }
}

TEST_CASE("trend_of follows the majority sign with ties resolved as On") {
    VoterPool pos;
    pos.add({1, 1, -1}, {1, 1, 1});
    pos.finish();
    CHECK(trend_of(pos.voters, false) == EllipseTrend::On);
    CHECK(trend_of(pos.voters, true) == EllipseTrend::Outward);

    VoterPool neg;
    neg.add({-1, -1, 1}, {-1, -1, -1});
    neg.finish();
    CHECK(trend_of(neg.voters, true) == EllipseTrend::Inward);

    VoterPool tie;
    tie.add({1, -1}, {1, -1});
    tie.finish();
    CHECK(trend_of(tie.voters, true) == EllipseTrend::On);
}

TEST_CASE("simulator radial walks calibrate the outward sign") {
    const AntennaLayout layout = office_layout();
    Scene scene = quiet_scene(layout);
    VoterConfig cfg;

    const CsiTrace out_trace =
        synthesize(scene, segment_path({0, 1.6}, {0, 2.8}, 1.0), 1000.0, 1.2, 3);
    SmoothedTrace so = prepare(out_trace);
    const auto out_voters = build_voters(so.caches[1], cfg, 256, 1000.0);
    const auto out_dep = ellipse_departure_test(out_voters, cfg);
    CHECK(out_dep.departed);
    CHECK(trend_of(out_voters, out_dep.departed) == EllipseTrend::Outward);

    const CsiTrace in_trace =
        synthesize(scene, segment_path({0, 2.8}, {0, 1.6}, 1.0), 1000.0, 1.2, 3);
    SmoothedTrace si = prepare(in_trace);
    const auto in_voters = build_voters(si.caches[1], cfg, 256, 1000.0);
    const auto in_dep = ellipse_departure_test(in_voters, cfg);
    CHECK(in_dep.departed);
    CHECK(trend_of(in_voters, in_dep.departed) == EllipseTrend::Inward);
}

TEST_CASE("estimate_direction is stationary on a static target and deterministic") {
    const AntennaLayout layout = office_layout();
    Scene scene = quiet_scene(layout);
    GroundTruthPath still;
    still.waypoints = {{0.0, {0.1, 2.0}}, {1.0, {0.1, 2.0}}};
    const CsiTrace trace = synthesize(scene, still, 1000.0, 1.0, 4);
    SmoothedTrace st = prepare(trace);
    VoterConfig cfg;
    const DirectionState a = estimate_direction(st.caches[1], st.caches[4], cfg, 0, 1000.0);
    CHECK(a.stationary());
    const DirectionState b = estimate_direction(st.caches[1], st.caches[4], cfg, 0, 1000.0);
    CHECK(a.trend[0] == b.trend[0]);
    CHECK(a.statistic[0] == b.statistic[0]);
    CHECK(a.statistic[1] == b.statistic[1]);
}

TEST_CASE("walks along a reference ellipse read On for that receiver") {
    const AntennaLayout layout = office_layout();
    Scene scene = quiet_scene(layout);
    const Point2 start{0.0, 1.8};

    // Walk along receiver 1's reference ellipse, moving outward of family 2.
    const GroundTruthPath arc =
        arc_path_on_reference_ellipse(layout, 0, start, 1.0, 1.0, +1);
    const CsiTrace trace = synthesize(scene, arc, 1000.0, 1.0, 5);
    SmoothedTrace st = prepare(trace);
    VoterConfig cfg;
    const DirectionState dir = estimate_direction(st.caches[1], st.caches[4], cfg, 128, 1000.0);
    CHECK(dir.trend[0] == EllipseTrend::On);
    CHECK(dir.trend[1] == EllipseTrend::Outward);
}

TEST_CASE("voter config validation") {
    VoterConfig bad;
    bad.window_count = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = VoterConfig{};
    bad.window_ms = 256.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = VoterConfig{};
    bad.kappa_threshold = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_NOTHROW(VoterConfig{}.validate());
}
