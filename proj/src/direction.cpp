#include "meshtrack/direction.hpp"

#include <cmath>

#include "meshtrack/errors.hpp"

namespace meshtrack {

void VoterConfig::validate() const {
    if (!(period_ms > 0.0) || !(window_ms > 0.0)) throw ConfigError("voter periods must be positive");
    if (window_ms > period_ms) throw ConfigError("window_ms must not exceed period_ms");
    if (window_count < 1) throw ConfigError("window_count must be >= 1");
    if (packet_delay < 1) throw ConfigError("packet_delay must be >= 1");
    if (!(kappa_threshold > 0.0)) throw ConfigError("kappa_threshold must be positive");
}

SsdCache::SsdCache(AntennaPowerView view, std::vector<SubcarrierPair> pairs, size_t window_len,
                   int max_lag, int antenna)
    : view_(view),
      pairs_(std::move(pairs)),
      window_len_(window_len),
      max_lag_(max_lag),
      antenna_(antenna),
      memo_(view.packets) {}

const SsdVector& SsdCache::at(size_t packet) const {
    if (packet >= memo_.size()) throw SeriesTooShort("SSD start beyond series");
    auto& slot = memo_[packet];
    if (!slot) {
        slot = std::make_unique<SsdVector>(
            compute_ssd(view_, pairs_, packet, window_len_, max_lag_, antenna_));
    }
    return *slot;
}

size_t SsdCache::max_start() const {
    if (view_.packets < window_len_) throw SeriesTooShort("series shorter than SSD window");
    return view_.packets - window_len_;
}

std::vector<Voter> build_voters(const SsdCache& cache, const VoterConfig& cfg,
                                size_t window_start, double rate_hz) {
    cfg.validate();
    const auto to_packets = [&](double ms) {
        return static_cast<size_t>(std::llround(ms * rate_hz / 1000.0));
    };
    const size_t period = to_packets(cfg.period_ms);
    const size_t window = to_packets(cfg.window_ms);
    const size_t delta = static_cast<size_t>(cfg.packet_delay);
    const size_t n_win = static_cast<size_t>(cfg.window_count);

    if (window <= delta) throw InsufficientPackets("packet delay spans the whole window");

    const size_t stride = (n_win > 1) ? (period - window) / (n_win - 1) : 0;
    const size_t limit = cache.max_start();

    std::vector<Voter> voters;
    voters.reserve(n_win * (window - delta));
    for (size_t w = 0; w < n_win; ++w) {
        const size_t start = window_start + w * stride;
        for (size_t i = 0; i + delta < window; ++i) {
            const size_t a = start + i;
            const size_t b = a + delta;
            if (b > limit) break;
            voters.push_back({&cache.at(a), &cache.at(b)});
        }
    }
    if (voters.empty()) throw InsufficientPackets("no voters fit inside the trace");
    return voters;
}

DepartureResult ellipse_departure_test(const std::vector<Voter>& voters, const VoterConfig& cfg) {
    DepartureResult r;
    for (const Voter& v : voters) r.statistic += sign_distance(*v.first, *v.second);
    r.departed = r.statistic > cfg.kappa_threshold;
    return r;
}

namespace {

int majority_element_sign(const std::vector<Voter>& voters) {
    long long pos = 0;
    long long neg = 0;
    auto tally = [&](const SsdVector& s) {
        for (int e : s.elements) {
            if (e > 0) ++pos;
            else if (e < 0) ++neg;
        }
    };
    for (const Voter& v : voters) {
        tally(*v.first);
        tally(*v.second);
    }
    if (pos > neg) return +1;
    if (neg > pos) return -1;
    return 0;
}

}  // namespace

EllipseTrend trend_of(const std::vector<Voter>& voters, bool departed) {
    if (!departed) return EllipseTrend::On;
    const int sign = majority_element_sign(voters);
    if (sign == 0) return EllipseTrend::On;  // exact tie
    return (sign == kOutwardSign) ? EllipseTrend::Outward : EllipseTrend::Inward;
}

DirectionState estimate_direction(const SsdCache& ref1, const SsdCache& ref2,
                                  const VoterConfig& cfg, size_t window_start, double rate_hz) {
    DirectionState state;
    const SsdCache* caches[2] = {&ref1, &ref2};
    for (int r = 0; r < 2; ++r) {
        const auto voters = build_voters(*caches[r], cfg, window_start, rate_hz);
        const DepartureResult dep = ellipse_departure_test(voters, cfg);
        state.statistic[r] = dep.statistic;
        state.voter_count[r] = voters.size();
        state.majority_sign[r] = majority_element_sign(voters);
        state.trend[r] = trend_of(voters, dep.departed);
    }
    return state;
}

}  // namespace meshtrack
