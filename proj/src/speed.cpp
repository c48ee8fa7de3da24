#include "meshtrack/speed.hpp"

#include <algorithm>
#include <cmath>

#include "meshtrack/errors.hpp"

namespace meshtrack {

double emd(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw LengthMismatch("emd needs equal element counts");
    if (u.empty()) throw LengthMismatch("emd of empty vectors");
    std::vector<double> a = u;
    std::vector<double> b = v;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc / static_cast<double>(a.size());
}

double emd(const SsdVector& u, const SsdVector& v) {
    std::vector<double> a(u.elements.begin(), u.elements.end());
    std::vector<double> b(v.elements.begin(), v.elements.end());
    return emd(a, b);
}

namespace {

void append_scaled(std::vector<double>& out, const SsdVector& s, double scale) {
    for (int e : s.elements) out.push_back(scale * static_cast<double>(e));
}

void append_plain(std::vector<double>& out, const SsdVector& s) {
    for (int e : s.elements) out.push_back(static_cast<double>(e));
}

constexpr double kSpeedOfLightLocal = 299792458.0;

// Leading eigenvector of a small symmetric matrix by power iteration.
std::vector<double> leading_eigenvector(const std::vector<std::vector<double>>& m,
                                        double* eigenvalue) {
    const size_t n = m.size();
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
    double lambda = 0.0;
    std::vector<double> w(n);
    for (int it = 0; it < 60; ++it) {
        for (size_t r = 0; r < n; ++r) {
            double acc = 0.0;
            for (size_t c = 0; c < n; ++c) acc += m[r][c] * v[c];
            w[r] = acc;
        }
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm <= 0.0) break;
        for (size_t r = 0; r < n; ++r) v[r] = w[r] / norm;
        lambda = norm;
    }
    if (eigenvalue) *eigenvalue = lambda;
    return v;
}

}  // namespace

std::vector<double> measure_path_change(const PhaseGapProbe& probe, size_t t0, size_t count) {
    const auto& freqs = *probe.freqs;
    const int n_sub = static_cast<int>(freqs.size());
    if (probe.view.packets < t0 + count) throw SeriesTooShort("gap probe beyond series");
    std::vector<double> out(count, 0.0);
    if (count < 2 || n_sub < 2) return out;

    // Pad the span so the fit sees at least a fringe or two even when the
    // search window itself covers only part of one.
    const size_t pad = 256;
    const size_t a0 = (t0 > pad) ? t0 - pad : 0;
    const size_t a1 = std::min(probe.view.packets, t0 + count + pad);
    const size_t span = a1 - a0;

    std::vector<double> mean(n_sub, 0.0);
    for (size_t t = a0; t < a1; ++t)
        for (int s = 0; s < n_sub; ++s) mean[s] += probe.view.at(t, s);
    for (int s = 0; s < n_sub; ++s) mean[s] /= static_cast<double>(span);

    // The mean-removed ensemble is approximately
    //   x_f(t) = C_f cos(psi_f) cos(Phi(t)) - C_f sin(psi_f) sin(Phi(t)),
    // i.e. rank two; its principal pair forms a quadrature for Phi.
    std::vector<std::vector<double>> cov(n_sub, std::vector<double>(n_sub, 0.0));
    std::vector<double> row(n_sub);
    for (size_t t = a0; t < a1; ++t) {
        for (int s = 0; s < n_sub; ++s) row[s] = probe.view.at(t, s) - mean[s];
        for (int r = 0; r < n_sub; ++r) {
            const double xr = row[r];
            for (int c = r; c < n_sub; ++c) cov[r][c] += xr * row[c];
        }
    }
    for (int r = 0; r < n_sub; ++r)
        for (int c = 0; c < r; ++c) cov[r][c] = cov[c][r];

    double lambda1 = 0.0;
    const auto v1 = leading_eigenvector(cov, &lambda1);
    if (!(lambda1 > 0.0)) return out;
    // Deflate and take the second component.
    for (int r = 0; r < n_sub; ++r)
        for (int c = 0; c < n_sub; ++c) cov[r][c] -= lambda1 * v1[r] * v1[c];
    double lambda2 = 0.0;
    const auto v2 = leading_eigenvector(cov, &lambda2);
    if (!(lambda2 > 0.02 * lambda1)) return out;  // arc too short or no fringe

    const double s1 = std::sqrt(lambda1);
    const double s2 = std::sqrt(lambda2);
    auto phase_at = [&](size_t t) {
        double p1 = 0.0, p2 = 0.0;
        for (int s = 0; s < n_sub; ++s) {
            const double x = probe.view.at(t, s) - mean[s];
            p1 += x * v1[s];
            p2 += x * v2[s];
        }
        return std::atan2(p2 / s2, p1 / s1);
    };

    const double f_mid = 0.5 * (freqs.front() + freqs.back());
    const double to_meters = kSpeedOfLightLocal / (2.0 * M_PI * f_mid);
    double prev = phase_at(t0);
    double acc = 0.0;
    for (size_t t = 1; t < count; ++t) {
        const double cur = phase_at(t0 + t);
        double d = cur - prev;
        while (d > M_PI) d -= 2.0 * M_PI;
        while (d < -M_PI) d += 2.0 * M_PI;
        acc += d;
        prev = cur;
        out[t] = std::abs(acc) * to_meters;
    }
    return out;
}

namespace {

struct FamilyEvidence {
    bool has_probe = false;
    bool informative = false;       // measured rate above the mute floor
    double rate = 0.0;              // signed path-change rate, m/packet
    double crossing_offset = 0.0;   // gap / rate, packets; 0 when not crossing
};

FamilyEvidence family_evidence(const ArrivalFamilyInput& fam, size_t t_k, int last_offset) {
    FamilyEvidence ev;
    if (!fam.probe) return ev;
    ev.has_probe = true;
    if (fam.probe->trend_sign == 0) {
        // Reference family of an On trend: the path length holds still.
        ev.informative = true;
        return ev;
    }
    const size_t count = static_cast<size_t>(last_offset) + 1;
    const auto change = measure_path_change(*fam.probe, t_k, count);
    const double slope = (change.back() - change.front()) / static_cast<double>(count - 1);
    const double floor = 0.02 / fam.probe->rate_hz;  // 0.02 m/s
    if (slope < floor) return ev;
    ev.informative = true;
    ev.rate = static_cast<double>(fam.probe->trend_sign) * slope;
    const double crossing = fam.probe->gap_m / ev.rate;
    if (crossing > 0.0) ev.crossing_offset = crossing;
    return ev;
}

}  // namespace

ArrivalSearch search_arrival(const ArrivalFamilyInput& fam1, const ArrivalFamilyInput& fam2,
                             size_t t_k, size_t period_packets, size_t step_packets,
                             double landmark_distance_m) {
    if (step_packets < 1) throw ConfigError("search step must be >= 1 packet");

    std::vector<double> target;
    append_scaled(target, *fam1.reference, fam1.lag_scale);
    append_scaled(target, *fam2.reference, fam2.lag_scale);

    const size_t limit = std::min(fam1.aux_stream->max_start(), fam2.aux_stream->max_start());

    ArrivalSearch out;
    std::vector<double> probe;
    probe.reserve(target.size());
    for (size_t off = step_packets; off <= period_packets; off += step_packets) {
        const size_t t_i = t_k + off;
        if (t_i > limit) break;
        probe.clear();
        append_plain(probe, fam1.aux_stream->at(t_i));
        append_plain(probe, fam2.aux_stream->at(t_i));
        out.candidate_offsets.push_back(static_cast<int>(off));
        out.emd_curve.push_back(emd(target, probe));
    }
    if (out.emd_curve.empty()) throw EmptyCandidates("no supported arrival candidates");

    out.cost_curve = out.emd_curve;
    bool broken_measurement = false;
    if (fam1.probe || fam2.probe) {
        const double rate_hz = fam1.probe ? fam1.probe->rate_hz : fam2.probe->rate_hz;
        const int last = out.candidate_offsets.back();
        const FamilyEvidence ev1 = family_evidence(fam1, t_k, last);
        const FamilyEvidence ev2 = family_evidence(fam2, t_k, last);

        double anchor = 0.0;  // packets; 0 = no arrival evidence
        if (ev1.has_probe && ev2.has_probe && ev1.informative && ev2.informative &&
            landmark_distance_m > 0.0) {
            // grad_r . v = rate_r fixes the walking velocity; the arrival is
            // when it covers the landmark distance.
            const Point2 g1 = fam1.probe->gradient;
            const Point2 g2 = fam2.probe->gradient;
            const double det = g1.x * g2.y - g1.y * g2.x;
            if (std::abs(det) > 1e-9) {
                const Point2 v{(ev1.rate * g2.y - ev2.rate * g1.y) / det,
                               (g1.x * ev2.rate - g2.x * ev1.rate) / det};
                const double speed = norm(v) * rate_hz;  // m/s
                if (speed > kMaxWalkingSpeed) {
                    // Non-physical velocity: the window's measurement is
                    // broken; leave the arrival to the global refinement.
                    broken_measurement = true;
                } else if (speed > 0.02) {
                    anchor = landmark_distance_m / norm(v);
                    out.solved_speed = speed;
                }
            }
        }
        if (anchor <= 0.0 && !broken_measurement) {
            // Single-family fallback: that family's own gap crossing.
            if (ev1.crossing_offset > 0.0) anchor = ev1.crossing_offset;
            if (ev2.crossing_offset > 0.0 &&
                (anchor <= 0.0 || ev2.crossing_offset < anchor)) {
                anchor = ev2.crossing_offset;
            }
        }
        if (anchor > 0.0) {
            out.combined_offset = static_cast<int>(std::llround(
                std::clamp(anchor, 1.0, 2.0 * static_cast<double>(period_packets))));
            const double in_grid = std::min(anchor, static_cast<double>(last));
            const double ms_per_packet = 1000.0 / rate_hz;
            for (size_t i = 0; i < out.cost_curve.size(); ++i) {
                out.cost_curve[i] +=
                    std::abs(static_cast<double>(out.candidate_offsets[i]) - in_grid) *
                    ms_per_packet;
            }
        }
    }

    size_t best = 0;
    double mean = 0.0;
    double lo = out.cost_curve[0];
    double hi = out.cost_curve[0];
    for (size_t i = 0; i < out.cost_curve.size(); ++i) {
        const double v = out.cost_curve[i];
        if (v < out.cost_curve[best]) best = i;
        mean += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    mean /= static_cast<double>(out.cost_curve.size());
    out.chosen = best;
    out.low_confidence = broken_measurement || (hi - lo) < 0.1 * mean || mean == 0.0;
    return out;
}

double speed_from(Point2 current, Point2 landmark, double t_k_s, double t_k1_s) {
    const double dt = t_k1_s - t_k_s;
    if (!(dt > 0.0)) throw NonpositiveInterval("arrival interval must be positive");
    return distance(current, landmark) / dt;
}

}  // namespace meshtrack
