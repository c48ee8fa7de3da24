#include "meshtrack/pipeline.hpp"

#include <cmath>

#include "meshtrack/errors.hpp"

namespace meshtrack {

void TrackerConfig::validate() const {
    voter.validate();
    sgf.validate();
    if (pair_separation < 1) throw ConfigError("pair_separation must be >= 1");
    if (max_lag < 1) throw ConfigError("max_lag must be >= 1");
    if (arrival_step < 1) throw ConfigError("arrival_step must be >= 1");
    if (omega < 0.0) throw ConfigError("omega must be nonnegative");
}

Tracker::Tracker(const CsiTrace& trace, const AntennaLayout& layout, const TrackerConfig& cfg)
    : layout_(layout), cfg_(cfg) {
    cfg_.validate();
    layout_.validate();
    if (trace.header.antennas != 6) {
        throw ConfigError("trace must carry 6 receiver antennas for this layout");
    }
    rate_hz_ = static_cast<double>(trace.header.rate_hz);
    freqs_ = trace.header.subcarriers_hz;
    period_packets_ = static_cast<size_t>(std::llround(cfg.voter.period_ms * rate_hz_ / 1000.0));
    window_packets_ = static_cast<size_t>(std::llround(cfg.voter.window_ms * rate_hz_ / 1000.0));
    if (period_packets_ == 0 || window_packets_ == 0) {
        throw ConfigError("estimation periods are empty at this packet rate");
    }
    if (trace.packets() < period_packets_) {
        throw ConfigError("trace shorter than one estimation period");
    }
    window_count_ = trace.packets() / period_packets_;

    // Smooth every antenna/subcarrier power series once, and estimate from
    // the residual how much noise variance survives into the smoothed series;
    // that sets the flat-window floor for the SSD extraction.
    smoothed_ = cfr_power(trace);
    const size_t n = smoothed_.packets;
    const SgfNoiseGain gain = sgf_noise_gain(cfg_.sgf);
    noise_floors_.assign(static_cast<size_t>(smoothed_.antennas) * smoothed_.subcarriers, 0.0);
    std::vector<double> series(n);
    for (int a = 0; a < smoothed_.antennas; ++a) {
        for (int s = 0; s < smoothed_.subcarriers; ++s) {
            for (size_t p = 0; p < n; ++p) series[p] = smoothed_.at(p, a, s);
            const auto smooth = sgf_smooth(series, cfg_.sgf);
            double resid_var = 0.0;
            for (size_t p = 0; p < n; ++p) {
                const double r = series[p] - smooth[p];
                resid_var += r * r;
                smoothed_.at(p, a, s) = smooth[p];
            }
            resid_var /= static_cast<double>(n);
            if (gain.residual_var > 0.05) {
                noise_floors_[a * smoothed_.subcarriers + s] =
                    cfg_.flat_margin * resid_var * gain.smoothed_var / gain.residual_var;
            }
        }
    }

    const auto pairs = default_pairs(smoothed_.subcarriers, cfg_.pair_separation);
    caches_.reserve(6);
    for (int a = 0; a < 6; ++a) {
        caches_.push_back(std::make_unique<SsdCache>(antenna_view(a), pairs, window_packets_,
                                                     cfg_.max_lag, a));
    }
}

AntennaPowerView Tracker::antenna_view(int antenna) const {
    AntennaPowerView v;
    v.data = smoothed_.values.data() + antenna * smoothed_.subcarriers;
    v.packets = smoothed_.packets;
    v.subcarriers = smoothed_.subcarriers;
    v.stride = static_cast<size_t>(smoothed_.antennas) * smoothed_.subcarriers;
    v.noise_floor = noise_floors_.data() + static_cast<size_t>(antenna) * smoothed_.subcarriers;
    return v;
}

TrackerState Tracker::initial_state() const {
    TrackerState st;
    st.position = cfg_.initial;
    const size_t grid = period_packets_ / cfg_.arrival_step;
    st.emd.candidate_offsets.resize(grid);
    for (size_t j = 0; j < grid; ++j) {
        st.emd.candidate_offsets[j] = static_cast<int>((j + 1) * cfg_.arrival_step);
    }
    return st;
}

void Tracker::step(TrackerState& state) const {
    const size_t k = state.window_index;
    const size_t t0 = k * period_packets_;

    VelocityStep step;
    step.window_start_s = static_cast<double>(t0) / rate_hz_;
    WindowDiagnostic diag;
    diag.window = k;

    const int ref1 = global_antenna(0, AntennaLayout::kReference);
    const int ref2 = global_antenna(1, AntennaLayout::kReference);

    try {
        const DirectionState dir =
            estimate_direction(*caches_[ref1], *caches_[ref2], cfg_.voter, t0, rate_hz_);
        diag.direction = dir;
        step.trend1 = dir.trend[0];
        step.trend2 = dir.trend[1];

        if (dir.stationary()) {
            diag.status = "stationary";
        } else {
            const int s1 = static_cast<int>(step.trend1);
            const int s2 = static_cast<int>(step.trend2);
            const MeshCell cell = build_mesh_cell(layout_, state.position, s1, s2);
            const Point2 landmark = cell.landmark;

            ArrivalFamilyInput fams[2];
            const int sel[2] = {s1, s2};
            for (int r = 0; r < 2; ++r) {
                const int s = sel[r];
                const int aux_local = cell.aux_antenna[r];
                const int aux = global_antenna(r, aux_local);
                const int ref = global_antenna(r, AntennaLayout::kReference);
                fams[r].reference = &caches_[ref]->at(t0);
                fams[r].aux_stream = caches_[aux].get();
                fams[r].lag_scale = 1.0;
                if (cfg_.geometry_correction) {
                    const double d0_ref = distance(layout_.tx, layout_.reference(r));
                    const double d0_aux = distance(layout_.tx, layout_.antenna(r, aux_local));
                    const double excess_ref = cell.reference_lengths[r] - d0_ref;
                    const double excess_aux = cell.reference_lengths[r] - d0_aux;
                    if (excess_ref > kGeomEps && excess_aux > kGeomEps) {
                        fams[r].lag_scale = excess_aux / excess_ref;
                    }
                }
                PhaseGapProbe probe;
                probe.view = antenna_view(aux);
                probe.freqs = &freqs_;
                probe.rate_hz = rate_hz_;
                probe.gap_m = cell.aux_gap[r];
                probe.trend_sign = (s > 0) ? +1 : (s < 0 ? -1 : 0);
                const Point2 to_tx = state.position - layout_.tx;
                const Point2 to_aux = state.position - layout_.antenna(r, aux_local);
                probe.gradient = (1.0 / norm(to_tx)) * to_tx + (1.0 / norm(to_aux)) * to_aux;
                fams[r].probe = probe;
            }

            const ArrivalSearch search =
                search_arrival(fams[0], fams[1], t0, period_packets_,
                               static_cast<size_t>(cfg_.arrival_step),
                               distance(state.position, landmark));
            diag.low_confidence = search.low_confidence;
            diag.status = "moving";

            const int offset =
                (search.combined_offset > 0) ? search.combined_offset : search.chosen_offset();
            step.interval_s = static_cast<double>(offset) / rate_hz_;
            // Walking speeds cap at 3 m/s; keep the interval consistent.
            const double min_interval = distance(state.position, landmark) / kMaxWalkingSpeed;
            step.interval_s = std::max(step.interval_s, min_interval);
            step.speed_mps = speed_from(state.position, landmark, 0.0, step.interval_s);
            step.search = search;

            // Provisional advance so the next window's mesh sits where the
            // target should be after a full period at this velocity; the
            // refinement pass recomputes the final positions.
            const double scale =
                (static_cast<double>(period_packets_) / rate_hz_) / step.interval_s;
            const Point2 advanced = state.position + scale * (landmark - state.position);
            const HalfPlane half = layout_.monitor_half_plane();
            if (half.contains(advanced) && layout_.line_distance(advanced) > kMinLineClearance) {
                state.position = advanced;
            }

            // Row on the shared candidate grid; sentinel where unsupported.
            // The fused cost carries the arrival information the DP refines.
            std::vector<double> row(state.emd.candidate_offsets.size(), kMissingEmd);
            for (size_t i = 0; i < search.candidate_offsets.size(); ++i) {
                const size_t idx =
                    static_cast<size_t>(search.candidate_offsets[i] / cfg_.arrival_step) - 1;
                row[idx] = search.cost_curve[i];
            }
            state.emd.rows.push_back(std::move(row));
            state.emd.low_confidence.push_back(search.low_confidence);
            state.emd_step_index.push_back(state.steps.size());
        }
    } catch (const DegenerateMesh& e) {
        step.valid = false;
        step.status = std::string("degenerate mesh: ") + e.what();
        diag.status = step.status;
    } catch (const InsufficientPackets& e) {
        step.valid = false;
        step.status = std::string("insufficient packets: ") + e.what();
        diag.status = step.status;
    } catch (const EmptyCandidates& e) {
        step.valid = false;
        step.status = std::string("empty arrival search: ") + e.what();
        diag.status = step.status;
    } catch (const AllFlat& e) {
        step.valid = false;
        step.status = std::string("flat window: ") + e.what();
        diag.status = step.status;
    }

    state.steps.push_back(std::move(step));
    state.diagnostics.push_back(std::move(diag));
    state.window_index = k + 1;
}

TrackResult run(const CsiTrace& trace, const AntennaLayout& layout, const TrackerConfig& cfg) {
    Tracker tracker(trace, layout, cfg);
    TrackerState state = tracker.initial_state();
    for (size_t k = 0; k < tracker.window_count(); ++k) tracker.step(state);

    // Refine arrival intervals per run of consecutive moving windows; the
    // coupling term has no meaning across stationary gaps.
    const double period = static_cast<double>(tracker.period_packets());
    size_t row = 0;
    while (row < state.emd.rows.size()) {
        size_t end = row + 1;
        while (end < state.emd.rows.size() &&
               state.emd_step_index[end] == state.emd_step_index[end - 1] + 1) {
            ++end;
        }
        EmdMatrix sub;
        sub.candidate_offsets = state.emd.candidate_offsets;
        for (size_t r = row; r < end; ++r) {
            sub.rows.push_back(state.emd.rows[r]);
            sub.low_confidence.push_back(state.emd.low_confidence[r]);
        }
        const auto chosen = refine_arrivals(sub, cfg.omega, period);
        for (size_t r = row; r < end; ++r) {
            VelocityStep& st = state.steps[state.emd_step_index[r]];
            int offset = state.emd.candidate_offsets[chosen[r - row]];
            // Refined choices pinned at the horizon defer to the solved
            // interval when the crossing lies beyond the search range.
            if (st.search && st.search->combined_offset > offset &&
                chosen[r - row] + 1 >= state.emd.candidate_offsets.size() * 9 / 10) {
                offset = st.search->combined_offset;
            }
            st.interval_s = static_cast<double>(offset) / tracker.rate_hz();
        }
        row = end;
    }

    TrackResult result;
    const double period_s = period / tracker.rate_hz();
    result.trajectory = recover(state.steps, cfg.initial, layout, period_s, /*strict=*/false);
    for (size_t k = 0; k < result.trajectory.steps.size(); ++k) {
        const auto& st = result.trajectory.steps[k];
        if (!st.valid && state.diagnostics[k].status == "moving") {
            state.diagnostics[k].status = st.status;
        }
    }
    result.diagnostics = std::move(state.diagnostics);
    result.emd = std::move(state.emd);
    return result;
}

}  // namespace meshtrack
