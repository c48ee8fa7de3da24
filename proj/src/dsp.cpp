#include "meshtrack/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshtrack/errors.hpp"

namespace meshtrack {

void SgfConfig::validate() const {
    if (window < 1 || window % 2 == 0) throw ConfigError("SGF window must be odd and positive");
    if (order < 0 || order >= window) throw ConfigError("SGF order must be < window");
}

namespace {

// Solves the (small, SPD) normal equations by Gaussian elimination with
// partial pivoting.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t pivot = col;
        for (size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        const double d = a[col][col];
        for (size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / d;
            for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

// Least-squares polynomial coefficients for samples y at offsets k0..k0+m-1.
std::vector<double> poly_fit(const double* y, int m, int k0, int order) {
    const int terms = order + 1;
    std::vector<std::vector<double>> ata(terms, std::vector<double>(terms, 0.0));
    std::vector<double> aty(terms, 0.0);
    for (int i = 0; i < m; ++i) {
        const double k = static_cast<double>(k0 + i);
        double powers[16];
        powers[0] = 1.0;
        for (int j = 1; j < terms; ++j) powers[j] = powers[j - 1] * k;
        for (int r = 0; r < terms; ++r) {
            aty[r] += powers[r] * y[i];
            for (int c = 0; c < terms; ++c) ata[r][c] += powers[r] * powers[c];
        }
    }
    return solve_linear(std::move(ata), std::move(aty));
}

double poly_eval(const std::vector<double>& coeff, double k) {
    double v = 0.0;
    for (size_t j = coeff.size(); j-- > 0;) v = v * k + coeff[j];
    return v;
}

}  // namespace

std::vector<double> sgf_smooth(const std::vector<double>& series, const SgfConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(series.size());
    const int w = cfg.window;
    if (n < w) throw SeriesTooShort("series shorter than SGF window");
    const int h = w / 2;

    // Center weights of the least-squares fit: value at k=0 is coeff[0], which
    // is linear in y, so accumulate per-sample weights once.
    std::vector<double> center(w);
    {
        std::vector<double> unit(w, 0.0);
        for (int i = 0; i < w; ++i) {
            unit[i] = 1.0;
            center[i] = poly_eval(poly_fit(unit.data(), w, -h, cfg.order), 0.0);
            unit[i] = 0.0;
        }
    }

    std::vector<double> out(n);
    for (int i = h; i < n - h; ++i) {
        double v = 0.0;
        for (int j = 0; j < w; ++j) v += center[j] * series[i - h + j];
        out[i] = v;
    }
    const auto head = poly_fit(series.data(), w, -h, cfg.order);
    for (int i = 0; i < h; ++i) out[i] = poly_eval(head, i - h);
    const auto tail = poly_fit(series.data() + (n - w), w, -h, cfg.order);
    for (int i = n - h; i < n; ++i) out[i] = poly_eval(tail, i - (n - 1 - h));
    return out;
}

SgfNoiseGain sgf_noise_gain(const SgfConfig& cfg) {
    cfg.validate();
    const int w = cfg.window;
    const int h = w / 2;
    std::vector<double> center(w);
    std::vector<double> unit(w, 0.0);
    for (int i = 0; i < w; ++i) {
        unit[i] = 1.0;
        center[i] = poly_eval(poly_fit(unit.data(), w, -h, cfg.order), 0.0);
        unit[i] = 0.0;
    }
    SgfNoiseGain g;
    for (double c : center) g.smoothed_var += c * c;
    g.residual_var = 1.0 - 2.0 * center[h] + g.smoothed_var;
    return g;
}

std::vector<SubcarrierPair> default_pairs(int subcarriers, int separation) {
    if (separation < 1 || separation >= subcarriers) {
        throw ConfigError("pair separation out of range");
    }
    std::vector<SubcarrierPair> pairs;
    for (int i = 0; i + separation < subcarriers; ++i) {
        pairs.push_back({i + separation, i});
    }
    return pairs;
}

bool SsdVector::all_flat() const {
    for (bool f : flagged)
        if (!f) return false;
    return !flagged.empty();
}

int SsdVector::nonzero_count() const {
    int n = 0;
    for (int e : elements)
        if (e != 0) ++n;
    return n;
}

namespace {

struct SeriesStats {
    double mean = 0.0;
    bool flat = false;
};

SeriesStats window_stats(const AntennaPowerView& power, int sub, size_t start, size_t len) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (size_t t = 0; t < len; ++t) {
        const double v = power.at(start + t, sub);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        sum += v;
        sum_sq += v * v;
    }
    SeriesStats s;
    s.mean = sum / static_cast<double>(len);
    const double var = std::max(0.0, sum_sq / static_cast<double>(len) - s.mean * s.mean);
    s.flat = (hi - lo) <= 1e-12 * (std::abs(hi) + std::abs(lo));
    if (power.noise_floor && var <= power.noise_floor[sub]) s.flat = true;
    return s;
}

}  // namespace

SsdVector compute_ssd(const AntennaPowerView& power, const std::vector<SubcarrierPair>& pairs,
                      size_t window_start, size_t window_len, int max_lag, int antenna) {
    if (pairs.empty()) throw ConfigError("empty pair list");
    if (max_lag < 1) throw ConfigError("max_lag must be >= 1");
    if (window_start + window_len > power.packets) {
        throw SeriesTooShort("SSD window exceeds series");
    }
    if (window_len < 2 * static_cast<size_t>(max_lag)) {
        throw SeriesTooShort("SSD window shorter than 2*max_lag");
    }

    SsdVector ssd;
    ssd.antenna = antenna;
    ssd.window_start = window_start;
    ssd.pairs = pairs;
    ssd.elements.resize(pairs.size(), 0);
    ssd.flagged.resize(pairs.size(), false);

    const int w = static_cast<int>(window_len);
    std::vector<double> x(w), y(w);

    for (size_t pi = 0; pi < pairs.size(); ++pi) {
        const auto [hi, lo] = pairs[pi];
        const SeriesStats sx = window_stats(power, hi, window_start, window_len);
        const SeriesStats sy = window_stats(power, lo, window_start, window_len);
        if (sx.flat || sy.flat) {
            ssd.flagged[pi] = true;
            continue;
        }
        for (int t = 0; t < w; ++t) {
            x[t] = power.at(window_start + t, hi) - sx.mean;
            y[t] = power.at(window_start + t, lo) - sy.mean;
        }

        // Scan lags in order of increasing magnitude so exact ties resolve to
        // the smallest offset.
        double best = -std::numeric_limits<double>::infinity();
        int best_lag = 0;
        for (int step = 0; step <= 2 * max_lag; ++step) {
            const int lag = (step % 2 == 0) ? step / 2 : -(step + 1) / 2;
            if (lag < -max_lag || lag > max_lag) continue;
            const int t0 = std::max(0, -lag);
            const int t1 = w - 1 - std::max(0, lag);
            double sxy = 0.0, sxx = 0.0, syy = 0.0;
            for (int t = t0; t <= t1; ++t) {
                sxy += x[t] * y[t + lag];
                sxx += x[t] * x[t];
                syy += y[t + lag] * y[t + lag];
            }
            const double denom = std::sqrt(sxx * syy);
            if (denom <= 0.0) continue;
            const double r = sxy / denom;
            if (r > best) {
                best = r;
                best_lag = lag;
            }
        }
        ssd.elements[pi] = best_lag;
    }
    return ssd;
}

SsdVector compute_ssd_checked(const AntennaPowerView& power,
                              const std::vector<SubcarrierPair>& pairs, size_t window_start,
                              size_t window_len, int max_lag, int antenna) {
    SsdVector ssd = compute_ssd(power, pairs, window_start, window_len, max_lag, antenna);
    if (ssd.all_flat()) throw AllFlat("every subcarrier pair is flat in this window");
    return ssd;
}

double sign_distance(const SsdVector& s1, const SsdVector& s2) {
    if (s1.pairs != s2.pairs || s1.antenna != s2.antenna) {
        throw PairMismatch("sign_distance needs matching pair lists and antenna");
    }
    const int nz1 = s1.nonzero_count();
    const int nz2 = s2.nonzero_count();
    if (nz1 == 0 || nz2 == 0) return 0.0;
    double acc = 0.0;
    for (size_t i = 0; i < s1.elements.size(); ++i) {
        const int a = s1.elements[i];
        const int b = s2.elements[i];
        acc += static_cast<double>((a > 0) - (a < 0)) * static_cast<double>((b > 0) - (b < 0));
    }
    return acc / (std::sqrt(static_cast<double>(nz1)) * std::sqrt(static_cast<double>(nz2)));
}

}  // namespace meshtrack
