#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "therakit/common.hpp"

namespace therakit {

// Single-channel EEG recording, voltages in microvolts.
struct EegSignal {
    std::vector<double> samples;
    double sampling_rate_hz = 256.0;
    std::string channel_label = "AF3";
};

enum class Band { Delta, Theta, Alpha, Beta };

struct BandDefinition {
    Band name;
    double low_hz;
    double high_hz;
};

// The four canonical bands: Delta 0.5-4, Theta 4-8, Alpha 8-13, Beta 13-30 Hz.
const std::array<BandDefinition, 4>& canonical_bands();
const BandDefinition& band_definition(Band band);
std::string band_name(Band band);

// Digital IIR transfer function b(z)/a(z), denominator normalized to a[0] = 1.
// `order` is the analog prototype order; the bandpass realization carries
// 2 * order poles (coefficient vectors of length 2 * order + 1).
struct FilterCoefficients {
    std::vector<double> numerator;
    std::vector<double> denominator;
    int order = 4;
};

struct Envelope {
    std::vector<double> values;
    int window_len = 256;
};

enum class Trend { Increasing, Decreasing };

struct BandFeatures {
    Band band;
    Trend trend;
    double dominant_freq_hz = 0.0;
    double median_first_half = 0.0;
    double median_second_half = 0.0;
    // Set when the band carried no spectral power and the lowest in-band bin
    // was reported instead of a real peak.
    bool flat_spectrum = false;
};

struct EegFeatureSet {
    std::array<BandFeatures, 4> per_band;  // fixed order: Delta, Theta, Alpha, Beta
    std::string source_path;
    std::size_t sample_count = 0;
};

namespace signal {

// Subtracts the temporal mean so the output averages to zero.
EegSignal remove_dc(const EegSignal& input);

// Butterworth bandpass from a 4th-order analog prototype via bilinear
// transform with frequency pre-warping (edges normalized to Nyquist).
FilterCoefficients design_bandpass(const BandDefinition& band, double sampling_rate_hz);

// Causal forward-only IIR filtering (direct form II transposed). The input is
// scaled to unit peak before filtering and the original scale restored after;
// an all-zero signal passes through unchanged.
EegSignal apply_filter(const FilterCoefficients& coeffs, const EegSignal& input);

// True iff every pole of the transfer function lies strictly inside the unit
// circle (Schur-Cohn recursion on the denominator).
bool is_stable(const FilterCoefficients& coeffs);

// Amplitude envelope |x + j*H{x}| computed over non-overlapping windows of
// `window_len` samples; a final partial window is transformed at its actual
// length, so the output length always equals the input length.
Envelope hilbert_envelope(const EegSignal& input, int window_len = 256);

struct TrendResult {
    Trend trend;
    double median_first_half;
    double median_second_half;
};

// Compares median envelope amplitude between the first and second halves.
// Increasing iff the second-half median is strictly larger; ties classify
// as Decreasing.
TrendResult classify_trend(const Envelope& envelope);

// Median of a sequence; even lengths average the two middle elements.
double median(std::span<const double> values);

struct BandPeak {
    double freq_hz;
    bool flat_spectrum;
};

// Argmax of a precomputed one-sided power spectrum restricted to the band.
// A band with zero total power reports its lowest bin with flat_spectrum set.
BandPeak band_peak(std::span<const double> power, double sampling_rate_hz,
                   std::size_t n_samples, const BandDefinition& band);

// Frequency of the strongest spectral bin inside [low_hz, high_hz]; the
// returned value is a bin center and always lies inside the band.
double dominant_frequency(const EegSignal& input, const BandDefinition& band);

// Full feature chain on an in-memory signal: DC removal, then per band
// filter -> envelope -> trend, plus the band-restricted spectral peak of the
// DC-removed (unfiltered) signal.
EegFeatureSet analyze(const EegSignal& input, const std::string& source_path = {});

// analyze() applied to an EEG log file on disk.
EegFeatureSet process_eeg(const std::string& path);

// Canonical JSON form, fixed key order:
// {"bands":[{"name","trend","dominant_freq_hz","median_first_half","median_second_half"}...]}
Json to_json(const EegFeatureSet& features);
std::string to_json_string(const EegFeatureSet& features);

std::string trend_name(Trend trend);

}  // namespace signal
}  // namespace therakit
