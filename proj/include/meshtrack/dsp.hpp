#pragma once

// Power-series smoothing and subcarrier-shift extraction. An SSD vector holds
// the per-pair time offsets between two subcarriers' power waveforms inside a
// short window; its element signs encode whether the reflected path is
// lengthening or shortening.

#include <cstdint>
#include <vector>

namespace meshtrack {

struct SgfConfig {
    // 25 samples at 1 kHz keeps the power fringes of fast walks (~50 Hz)
    // while suppressing most of the measurement noise.
    int window = 25;  // odd sample count
    int order = 3;    // polynomial order, < window

    void validate() const;
};

/// Savitzky-Golay smoothing. Interior samples use the centered least-squares
/// fit; the first/last half-windows evaluate the terminal window's polynomial
/// instead of shrinking it.
std::vector<double> sgf_smooth(const std::vector<double>& series, const SgfConfig& cfg);

/// White-noise bookkeeping for the centered SGF kernel: passing noise of unit
/// variance through it leaves `smoothed_var`, and the residual raw-minus-
/// smoothed keeps `residual_var`. Their ratio turns a measured residual
/// variance into the noise variance expected inside the smoothed series.
struct SgfNoiseGain {
    double smoothed_var = 0.0;
    double residual_var = 0.0;
};

SgfNoiseGain sgf_noise_gain(const SgfConfig& cfg);

struct SubcarrierPair {
    int hi = 0;  // higher-frequency subcarrier index
    int lo = 0;

    bool operator==(const SubcarrierPair&) const = default;
};

/// Default pairing: all (i + separation, i), maximal fixed frequency gap.
std::vector<SubcarrierPair> default_pairs(int subcarriers, int separation = 15);

struct SsdVector {
    std::vector<int> elements;    // signed integer lags, packets (ms at 1 kHz)
    std::vector<bool> flagged;    // element zeroed because a series was flat
    int antenna = -1;
    size_t window_start = 0;      // packet index of the window start
    std::vector<SubcarrierPair> pairs;

    bool all_flat() const;
    int nonzero_count() const;
};

/// One antenna's power series, time-major [packet][subcarrier], typically
/// already smoothed. Thin view over PowerMatrix or test data. When
/// noise_floor is set (per-subcarrier variance), windows whose variance does
/// not rise above it count as flat.
struct AntennaPowerView {
    const double* data = nullptr;
    size_t packets = 0;
    int subcarriers = 0;
    size_t stride = 0;  // doubles between consecutive packets
    const double* noise_floor = nullptr;

    double at(size_t packet, int sub) const { return data[packet * stride + sub]; }
};

/// Time offset per subcarrier pair inside [window_start, window_start+window_len):
/// argmax over lag in [-max_lag, +max_lag] of the normalized cross-correlation
/// between the mean-removed series; positive lag means the hi-frequency
/// waveform leads. Flat series (zero range, or negligible against the
/// subcarrier's full-series range) zero and flag the element.
/// Throws SeriesTooShort when the window exceeds the series or is shorter
/// than 2*max_lag.
SsdVector compute_ssd(const AntennaPowerView& power, const std::vector<SubcarrierPair>& pairs,
                      size_t window_start, size_t window_len, int max_lag, int antenna = -1);

/// compute_ssd that throws AllFlat when every pair is flagged.
SsdVector compute_ssd_checked(const AntennaPowerView& power,
                              const std::vector<SubcarrierPair>& pairs, size_t window_start,
                              size_t window_len, int max_lag, int antenna = -1);

/// Normalized sign agreement between two SSD vectors, in [-1, 1]. Zero
/// elements drop out of both the dot product and the norms; a vector without
/// nonzero elements yields 0. Throws PairMismatch on different pair lists or
/// antennas.
double sign_distance(const SsdVector& s1, const SsdVector& s2);

}  // namespace meshtrack
