#include "meshtrack/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "meshtrack/errors.hpp"

namespace meshtrack {

std::vector<Point2> resample(const std::vector<Point2>& traj, int samples) {
    if (traj.empty()) throw EmptyInput("cannot resample an empty trajectory");
    if (samples < 2) throw ConfigError("resample needs at least 2 samples");

    std::vector<double> cum(traj.size(), 0.0);
    for (size_t i = 1; i < traj.size(); ++i) {
        cum[i] = cum[i - 1] + distance(traj[i], traj[i - 1]);
    }
    const double total = cum.back();
    if (total <= 0.0) {
        return std::vector<Point2>(samples, traj.front());
    }

    std::vector<Point2> out(samples);
    size_t seg = 1;
    for (int k = 0; k < samples; ++k) {
        const double s = total * static_cast<double>(k) / (samples - 1);
        while (seg + 1 < traj.size() && cum[seg] < s) ++seg;
        const double span = cum[seg] - cum[seg - 1];
        const double u = (span > 0.0) ? (s - cum[seg - 1]) / span : 0.0;
        out[k] = traj[seg - 1] + std::clamp(u, 0.0, 1.0) * (traj[seg] - traj[seg - 1]);
    }
    return out;
}

double dtw_error(const std::vector<Point2>& a, const std::vector<Point2>& b, int window) {
    if (a.size() != b.size()) throw LengthMismatch("dtw_error needs equal lengths");
    if (a.empty()) throw EmptyInput("dtw_error of empty sequences");
    if (window < 1) throw ConfigError("DTW window must be >= 1");

    const int n = static_cast<int>(a.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));

    auto ground = [&](int i, int j) { return distance(a[i], b[j]); };

    d[0][0] = ground(0, 0);
    for (int i = 0; i < n; ++i) {
        const int j0 = std::max(0, i - window);
        const int j1 = std::min(n - 1, i + window);
        for (int j = j0; j <= j1; ++j) {
            if (i == 0 && j == 0) continue;
            double prev = inf;
            if (i > 0 && j > 0) prev = std::min(prev, d[i - 1][j - 1]);
            if (i > 0) prev = std::min(prev, d[i - 1][j]);
            if (j > 0) prev = std::min(prev, d[i][j - 1]);
            d[i][j] = ground(i, j) + prev;
        }
    }

    // Path length of one optimal alignment; diagonal preferred on ties.
    int i = n - 1, j = n - 1;
    long long len = 1;
    while (i > 0 || j > 0) {
        const double diag = (i > 0 && j > 0) ? d[i - 1][j - 1] : inf;
        const double up = (i > 0) ? d[i - 1][j] : inf;
        const double left = (j > 0) ? d[i][j - 1] : inf;
        if (diag <= up && diag <= left) {
            --i;
            --j;
        } else if (up <= left) {
            --i;
        } else {
            --j;
        }
        ++len;
    }
    return d[n - 1][n - 1] / static_cast<double>(len);
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw EmptyInput("percentile of empty list");
    std::sort(values.begin(), values.end());
    const double rank = std::clamp(q, 0.0, 100.0) / 100.0 * (values.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(rank));
    const size_t hi = static_cast<size_t>(std::ceil(rank));
    const double u = rank - static_cast<double>(lo);
    return values[lo] * (1.0 - u) + values[hi] * u;
}

ErrorReport summarize(const std::vector<double>& errors,
                      const std::vector<std::string>& group_keys) {
    if (errors.empty()) throw EmptyInput("summarize needs at least one error value");
    if (!group_keys.empty() && group_keys.size() != errors.size()) {
        throw ConfigError("group keys must parallel the error list");
    }

    ErrorReport report;
    report.median = percentile(errors, 50.0);
    report.p90 = percentile(errors, 90.0);
    report.cdf.resize(101);
    for (int p = 0; p <= 100; ++p) report.cdf[p] = percentile(errors, static_cast<double>(p));

    if (!group_keys.empty()) {
        std::map<std::string, std::vector<double>> buckets;
        for (size_t i = 0; i < errors.size(); ++i) buckets[group_keys[i]].push_back(errors[i]);
        for (auto& [key, vals] : buckets) {
            ErrorReport::GroupStats g;
            g.count = vals.size();
            g.median = percentile(vals, 50.0);
            g.p90 = percentile(vals, 90.0);
            report.groups[key] = g;
        }
    }
    return report;
}

}  // namespace meshtrack
