#include "meshtrack/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "meshtrack/errors.hpp"

namespace meshtrack {

double HumanAmplitudeModel::at(double path_length_m) const {
    switch (kind) {
        case Kind::Constant:
            return value;
        case Kind::InverseSquare: {
            const double d = std::max(path_length_m, 0.5);
            return value / (d * d);
        }
    }
    return 0.0;
}

std::vector<double> Scene::default_subcarriers(double carrier_hz) {
    std::vector<double> f(30);
    for (int i = 0; i < 30; ++i) {
        f[i] = carrier_hz - 20e6 + 40e6 * static_cast<double>(i) / 29.0;
    }
    return f;
}

Scene Scene::default_scene(const AntennaLayout& layout, uint64_t seed) {
    Scene s;
    s.layout = layout;
    s.subcarriers_hz = default_subcarriers(s.carrier_center_hz);

    // Five static scatterers spread over the monitor side, 10% of LoS.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    std::uniform_real_distribution<double> uy(0.5, 4.0);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);
    const HalfPlane half = layout.monitor_half_plane();
    const Point2 n = half.normal;
    for (int i = 0; i < 5; ++i) {
        const double along = ux(rng);
        const double away = uy(rng);
        const Point2 d = layout.line_direction();
        const Point2 pos = layout.tx + along * d + away * n;
        s.scatterers.push_back({pos, 0.1 * s.los_amplitude, uphase(rng)});
    }
    return s;
}

void Scene::validate() const {
    if (los_amplitude < 0.0) throw ConfigError("los_amplitude must be nonnegative");
    if (human.value < 0.0) throw ConfigError("human amplitude must be nonnegative");
    for (const auto& sc : scatterers) {
        if (sc.amplitude < 0.0) throw ConfigError("scatterer amplitude must be nonnegative");
    }
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be nonnegative");
    if (subcarriers_hz.size() < 2) throw ConfigError("need at least two subcarriers");
    for (size_t i = 1; i < subcarriers_hz.size(); ++i) {
        if (subcarriers_hz[i] <= subcarriers_hz[i - 1]) {
            throw ConfigError("subcarrier frequencies must be strictly increasing");
        }
    }
    layout.validate();
}

Point2 GroundTruthPath::position_at(double t) const {
    if (waypoints.empty()) throw ConfigError("empty path");
    if (t <= waypoints.front().t) return waypoints.front().p;
    if (t >= waypoints.back().t) return waypoints.back().p;
    auto it = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                               [](double v, const Waypoint& w) { return v < w.t; });
    const Waypoint& b = *it;
    const Waypoint& a = *(it - 1);
    const double u = (t - a.t) / (b.t - a.t);
    return a.p + u * (b.p - a.p);
}

double GroundTruthPath::duration() const {
    if (waypoints.empty()) return 0.0;
    return waypoints.back().t - waypoints.front().t;
}

double GroundTruthPath::total_length() const {
    double len = 0.0;
    for (size_t i = 1; i < waypoints.size(); ++i) {
        len += distance(waypoints[i].p, waypoints[i - 1].p);
    }
    return len;
}

GroundTruthPath GroundTruthPath::shifted(double dt) const {
    GroundTruthPath out = *this;
    for (auto& w : out.waypoints) w.t += dt;
    return out;
}

PathKind path_kind_from_string(const std::string& s) {
    if (s == "straight") return PathKind::Straight;
    if (s == "L" || s == "l") return PathKind::L;
    if (s == "U" || s == "u") return PathKind::U;
    if (s == "S" || s == "s") return PathKind::S;
    if (s == "M" || s == "m") return PathKind::M;
    if (s == "Z" || s == "z") return PathKind::Z;
    if (s == "arc") return PathKind::Arc;
    throw ConfigError("unsupported path kind: " + s);
}

std::string to_string(PathKind k) {
    switch (k) {
        case PathKind::Straight: return "straight";
        case PathKind::L: return "L";
        case PathKind::U: return "U";
        case PathKind::S: return "S";
        case PathKind::M: return "M";
        case PathKind::Z: return "Z";
        case PathKind::Arc: return "arc";
    }
    return "?";
}

GroundTruthPath make_path(PathKind kind, const BBox& bbox, double speed_mps) {
    if (!(speed_mps > 0.0)) throw ConfigError("path speed must be positive");
    const double w = bbox.x1 - bbox.x0;
    const double h = bbox.y1 - bbox.y0;
    if (!(w > 0.0) || !(h > 0.0)) throw ConfigError("degenerate path bbox");

    const double xc = 0.5 * (bbox.x0 + bbox.x1);
    const double yc = 0.5 * (bbox.y0 + bbox.y1);

    std::vector<Point2> pts;
    switch (kind) {
        case PathKind::Straight:
            pts = {{bbox.x0, yc}, {bbox.x1, yc}};
            break;
        case PathKind::L:
            pts = {{bbox.x0, bbox.y1}, {bbox.x0, bbox.y0}, {bbox.x1, bbox.y0}};
            break;
        case PathKind::U:
            pts = {{bbox.x0, bbox.y1}, {bbox.x0, bbox.y0}, {bbox.x1, bbox.y0}, {bbox.x1, bbox.y1}};
            break;
        case PathKind::S:
            pts = {{bbox.x1, bbox.y0}, {bbox.x0, bbox.y0}, {bbox.x0, yc},
                   {bbox.x1, yc},      {bbox.x1, bbox.y1}, {bbox.x0, bbox.y1}};
            break;
        case PathKind::M:
            // Blocky M-walk: five segments with a 180-degree turn-back on the
            // first stroke.
            pts = {{bbox.x0, bbox.y0}, {bbox.x0, bbox.y1}, {bbox.x0, yc},
                   {xc, yc},           {xc, bbox.y1},      {bbox.x1, bbox.y1}};
            break;
        case PathKind::Z:
            pts = {{bbox.x0, bbox.y1}, {bbox.x1, bbox.y1}, {bbox.x0, bbox.y0}, {bbox.x1, bbox.y0}};
            break;
        case PathKind::Arc: {
            const double r = std::min(0.5 * w, h);
            const int n = 64;
            for (int i = 0; i <= n; ++i) {
                const double a = M_PI - M_PI * static_cast<double>(i) / n;
                pts.push_back({xc + r * std::cos(a), bbox.y0 + r * std::sin(a)});
            }
            break;
        }
    }

    GroundTruthPath path;
    double t = 0.0;
    path.waypoints.push_back({0.0, pts.front()});
    for (size_t i = 1; i < pts.size(); ++i) {
        t += distance(pts[i], pts[i - 1]) / speed_mps;
        path.waypoints.push_back({t, pts[i]});
    }
    return path;
}

size_t CsiTrace::packets() const {
    return header.antennas == 0 ? 0 : frames.size() / header.antennas;
}

double CsiTrace::duration_s() const {
    return header.rate_hz == 0 ? 0.0 : static_cast<double>(packets()) / header.rate_hz;
}

const std::vector<std::complex<float>>& CsiTrace::frame(size_t packet, int antenna) const {
    return frames[packet * header.antennas + antenna];
}

CsiTrace synthesize(const Scene& scene, const GroundTruthPath& path, double rate_hz,
                    double duration_s, uint64_t noise_seed) {
    if (!(rate_hz > 0.0)) throw ConfigError("packet rate must be positive");
    scene.validate();

    const auto& freqs = scene.subcarriers_hz;
    const int n_sub = static_cast<int>(freqs.size());
    const int n_ant = 6;
    const size_t n_pkt = static_cast<size_t>(std::llround(duration_s * rate_hz));

    std::vector<Point2> antennas;
    for (int r = 0; r < 2; ++r)
        for (int i = 0; i < 3; ++i) antennas.push_back(scene.layout.antenna(r, i));

    // Static part (LoS + scatterers) is constant per antenna/subcarrier.
    std::vector<std::complex<double>> static_part(n_ant * n_sub);
    for (int a = 0; a < n_ant; ++a) {
        const double d0 = distance(scene.layout.tx, antennas[a]);
        for (int s = 0; s < n_sub; ++s) {
            const double k = 2.0 * M_PI * freqs[s] / kSpeedOfLight;
            std::complex<double> H = std::polar(scene.los_amplitude, -k * d0);
            for (const auto& sc : scene.scatterers) {
                const double dl = distance(scene.layout.tx, sc.position) +
                                  distance(sc.position, antennas[a]);
                H += std::polar(sc.amplitude, -k * dl + sc.phase);
            }
            static_part[a * n_sub + s] = H;
        }
    }

    CsiTrace trace;
    trace.header.rate_hz = static_cast<uint32_t>(std::llround(rate_hz));
    trace.header.antennas = static_cast<uint8_t>(n_ant);
    trace.header.subcarriers_hz = freqs;
    trace.frames.assign(n_pkt * n_ant, std::vector<std::complex<float>>(n_sub));

    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const bool noisy = scene.noise_sigma > 0.0;
    const bool has_target = !path.waypoints.empty();  // empty path = target removed

    for (size_t p = 0; p < n_pkt; ++p) {
        const double t = static_cast<double>(p) / rate_hz;
        const Point2 pos = has_target ? path.position_at(t) : Point2{};
        for (int a = 0; a < n_ant; ++a) {
            const double dh = path_length(pos, scene.layout.tx, antennas[a]);
            const double ah = has_target ? scene.human.at(dh) : 0.0;
            auto& frame = trace.frames[p * n_ant + a];
            for (int s = 0; s < n_sub; ++s) {
                const double k = 2.0 * M_PI * freqs[s] / kSpeedOfLight;
                std::complex<double> H = static_part[a * n_sub + s];
                if (ah > 0.0) H += std::polar(ah, -k * dh + scene.constant_phase);
                if (noisy) {
                    H += std::complex<double>(scene.noise_sigma * gauss(rng),
                                              scene.noise_sigma * gauss(rng));
                }
                frame[s] = std::complex<float>(static_cast<float>(H.real()),
                                               static_cast<float>(H.imag()));
            }
        }
    }
    return trace;
}

double& PowerMatrix::at(size_t packet, int antenna, int sub) {
    return values[(packet * antennas + antenna) * subcarriers + sub];
}

double PowerMatrix::at(size_t packet, int antenna, int sub) const {
    return values[(packet * antennas + antenna) * subcarriers + sub];
}

PowerMatrix cfr_power(const CsiTrace& trace) {
    PowerMatrix m;
    m.packets = trace.packets();
    m.antennas = trace.header.antennas;
    m.subcarriers = static_cast<int>(trace.header.subcarriers_hz.size());
    m.values.resize(m.packets * m.antennas * m.subcarriers);
    for (size_t p = 0; p < m.packets; ++p) {
        for (int a = 0; a < m.antennas; ++a) {
            const auto& frame = trace.frame(p, a);
            for (int s = 0; s < m.subcarriers; ++s) {
                const double re = frame[s].real();
                const double im = frame[s].imag();
                m.at(p, a, s) = re * re + im * im;
            }
        }
    }
    return m;
}

}  // namespace meshtrack
