#include "therakit/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "therakit/fft.hpp"
#include "therakit/ingest.hpp"

namespace therakit {

const std::array<BandDefinition, 4>& canonical_bands() {
    static const std::array<BandDefinition, 4> bands = {{
        {Band::Delta, 0.5, 4.0},
        {Band::Theta, 4.0, 8.0},
        {Band::Alpha, 8.0, 13.0},
        {Band::Beta, 13.0, 30.0},
    }};
    return bands;
}

const BandDefinition& band_definition(Band band) {
    return canonical_bands()[static_cast<std::size_t>(band)];
}

std::string band_name(Band band) {
    switch (band) {
        case Band::Delta: return "Delta";
        case Band::Theta: return "Theta";
        case Band::Alpha: return "Alpha";
        case Band::Beta: return "Beta";
    }
    return "?";
}

namespace signal {

namespace {

using std::numbers::pi;

void require_nonempty(const EegSignal& s, const char* op) {
    if (s.samples.empty()) throw InputError(std::string(op) + ": empty signal");
    if (s.sampling_rate_hz <= 0.0)
        throw InputError(std::string(op) + ": sampling rate must be positive");
}

void require_finite(const EegSignal& s, const char* op) {
    for (double v : s.samples)
        if (!std::isfinite(v)) throw InputError(std::string(op) + ": non-finite sample");
}

void validate_band(const BandDefinition& band, double fs) {
    const double nyquist = fs / 2.0;
    if (!(band.low_hz > 0.0) || !(band.low_hz < band.high_hz) || !(band.high_hz < nyquist))
        throw InputError("band " + band_name(band.name) + " [" + std::to_string(band.low_hz) +
                         ", " + std::to_string(band.high_hz) +
                         "] Hz invalid against Nyquist " + std::to_string(nyquist) + " Hz");
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Compensated (Kahan) summation; the mean of ~1e5 samples must come out clean
// enough that the recentered signal averages below 1e-9 of full scale.
double kahan_mean(std::span<const double> v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(v.size());
}

// Polynomial with the given roots, leading coefficient 1, descending powers.
std::vector<std::complex<double>> poly_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> coeffs{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(coeffs.size() + 1, 0.0);
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            next[i] += coeffs[i];
            next[i + 1] -= coeffs[i] * r;
        }
        coeffs = std::move(next);
    }
    return coeffs;
}

// H(e^{jw}) for coefficient vectors in z^{-1} form.
std::complex<double> response_at(const FilterCoefficients& c, double w) {
    std::complex<double> num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < c.numerator.size(); ++k)
        num += c.numerator[k] * std::polar(1.0, -w * static_cast<double>(k));
    for (std::size_t k = 0; k < c.denominator.size(); ++k)
        den += c.denominator[k] * std::polar(1.0, -w * static_cast<double>(k));
    return num / den;
}

}  // namespace

EegSignal remove_dc(const EegSignal& input) {
    require_nonempty(input, "remove_dc");
    require_finite(input, "remove_dc");
    const double mean = kahan_mean(input.samples);
    EegSignal out = input;
    for (double& v : out.samples) v -= mean;
    return out;
}

FilterCoefficients design_bandpass(const BandDefinition& band, double sampling_rate_hz) {
    if (sampling_rate_hz <= 0.0) throw InputError("design_bandpass: sampling rate must be positive");
    validate_band(band, sampling_rate_hz);

    constexpr int order = 4;
    const double fs = sampling_rate_hz;

    // Pre-warped analog edge frequencies (rad/s).
    const double warp_lo = 2.0 * fs * std::tan(pi * band.low_hz / fs);
    const double warp_hi = 2.0 * fs * std::tan(pi * band.high_hz / fs);
    const double bw = warp_hi - warp_lo;
    const double w0_sq = warp_lo * warp_hi;

    // Analog Butterworth prototype poles on the unit circle, left half-plane.
    std::vector<std::complex<double>> analog_poles;
    analog_poles.reserve(2 * order);
    for (int k = 0; k < order; ++k) {
        const double angle = pi * (2.0 * k + order + 1.0) / (2.0 * order);
        const std::complex<double> proto = std::polar(1.0, angle);
        // Lowpass -> bandpass: each prototype pole maps to a conjugate pair via
        // s^2 - bw*p*s + w0^2 = 0.
        const std::complex<double> bp = bw * proto;
        const std::complex<double> disc = std::sqrt(bp * bp - 4.0 * w0_sq);
        analog_poles.push_back((bp + disc) / 2.0);
        analog_poles.push_back((bp - disc) / 2.0);
    }

    // Bilinear transform into the z-plane.
    std::vector<std::complex<double>> digital_poles;
    digital_poles.reserve(analog_poles.size());
    const double two_fs = 2.0 * fs;
    for (const auto& s : analog_poles) digital_poles.push_back((two_fs + s) / (two_fs - s));

    const auto den_c = poly_from_roots(digital_poles);

    // The bandpass zeros (order at s=0, order at infinity) land on z=1 and
    // z=-1, so the numerator is (z-1)^order * (z+1)^order = (z^2-1)^order.
    std::vector<std::complex<double>> zeros;
    zeros.reserve(2 * order);
    for (int k = 0; k < order; ++k) {
        zeros.push_back(1.0);
        zeros.push_back(-1.0);
    }
    const auto num_c = poly_from_roots(zeros);

    FilterCoefficients coeffs;
    coeffs.order = order;
    coeffs.numerator.resize(num_c.size());
    coeffs.denominator.resize(den_c.size());
    for (std::size_t i = 0; i < num_c.size(); ++i) coeffs.numerator[i] = num_c[i].real();
    for (std::size_t i = 0; i < den_c.size(); ++i) coeffs.denominator[i] = den_c[i].real();

    // Normalize so unity gain lands at the (warped) geometric band center.
    const double w_center = 2.0 * std::atan(std::sqrt(w0_sq) / two_fs);
    const double center_gain = std::abs(response_at(coeffs, w_center));
    for (double& b : coeffs.numerator) b /= center_gain;

    if (!is_stable(coeffs))
        throw InputError("design_bandpass: produced unstable filter for band " +
                         band_name(band.name));
    return coeffs;
}

bool is_stable(const FilterCoefficients& coeffs) {
    if (coeffs.denominator.empty() || coeffs.denominator[0] == 0.0) return false;
    std::vector<double> a = coeffs.denominator;
    const double lead = a[0];
    for (double& v : a) v /= lead;
    // Schur-Cohn recursion: stable iff all reflection coefficients |k| < 1.
    for (std::size_t m = a.size() - 1; m >= 1; --m) {
        const double k = a[m];
        if (!(std::abs(k) < 1.0)) return false;
        const double denom = 1.0 - k * k;
        std::vector<double> next(m);
        for (std::size_t j = 0; j < m; ++j) next[j] = (a[j] - k * a[m - j]) / denom;
        a = std::move(next);
    }
    return true;
}

EegSignal apply_filter(const FilterCoefficients& coeffs, const EegSignal& input) {
    require_nonempty(input, "apply_filter");
    require_finite(input, "apply_filter");
    if (coeffs.numerator.empty() || coeffs.denominator.empty())
        throw InputError("apply_filter: empty coefficient vectors");
    if (!is_stable(coeffs)) throw InputError("apply_filter: unstable filter coefficients");

    const double scale = max_abs(input.samples);
    if (scale == 0.0) return input;  // nothing to normalize or filter

    const std::size_t len = std::max(coeffs.numerator.size(), coeffs.denominator.size());
    std::vector<double> b(len, 0.0), a(len, 0.0);
    std::copy(coeffs.numerator.begin(), coeffs.numerator.end(), b.begin());
    std::copy(coeffs.denominator.begin(), coeffs.denominator.end(), a.begin());
    const double a0 = a[0];
    for (double& v : b) v /= a0;
    for (double& v : a) v /= a0;

    EegSignal out = input;
    std::vector<double> w(len - 1, 0.0);  // direct form II transposed state
    for (std::size_t i = 0; i < input.samples.size(); ++i) {
        const double x = input.samples[i] / scale;
        const double y = b[0] * x + (w.empty() ? 0.0 : w[0]);
        for (std::size_t k = 0; k + 1 < w.size(); ++k) w[k] = b[k + 1] * x + w[k + 1] - a[k + 1] * y;
        if (!w.empty()) w[w.size() - 1] = b[len - 1] * x - a[len - 1] * y;
        out.samples[i] = y * scale;
    }
    return out;
}

Envelope hilbert_envelope(const EegSignal& input, int window_len) {
    require_nonempty(input, "hilbert_envelope");
    if (window_len < 2) throw InputError("hilbert_envelope: window_len must be >= 2");

    Envelope env;
    env.window_len = window_len;
    env.values.reserve(input.samples.size());
    const std::size_t n = input.samples.size();
    const std::size_t w = static_cast<std::size_t>(window_len);
    for (std::size_t start = 0; start < n; start += w) {
        const std::size_t count = std::min(w, n - start);
        const auto z = fft::analytic_signal(
            std::span<const double>(input.samples.data() + start, count));
        for (const auto& v : z) env.values.push_back(std::abs(v));
    }
    return env;
}

TrendResult classify_trend(const Envelope& envelope) {
    const std::size_t n = envelope.values.size();
    if (n < 2) throw InputError("classify_trend: envelope must hold at least 2 values");
    const std::size_t half = n / 2;  // odd lengths give the first half floor(n/2) samples
    std::span<const double> values(envelope.values);
    const double m1 = median(values.subspan(0, half));
    const double m2 = median(values.subspan(half));
    return {m2 > m1 ? Trend::Increasing : Trend::Decreasing, m1, m2};
}

double median(std::span<const double> values) {
    if (values.empty()) throw InputError("median: empty input");
    std::vector<double> v(values.begin(), values.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    if (v.size() % 2 == 1) return v[mid];
    const double upper = v[mid];
    const double lower = *std::max_element(v.begin(), v.begin() + mid);
    return (lower + upper) / 2.0;
}

BandPeak band_peak(std::span<const double> power, double sampling_rate_hz,
                   std::size_t n_samples, const BandDefinition& band) {
    const double fs = sampling_rate_hz;
    const double n = static_cast<double>(n_samples);
    auto k_lo = static_cast<std::size_t>(
        std::max(0.0, std::ceil(band.low_hz * n / fs - 1e-9)));
    auto k_hi = static_cast<std::size_t>(std::max(0.0, std::floor(band.high_hz * n / fs + 1e-9)));
    if (k_hi >= power.size()) k_hi = power.size() - 1;
    if (k_lo > k_hi)
        throw InputError("dominant_frequency: no FFT bin inside band " + band_name(band.name) +
                         " (signal too short)");

    std::size_t best = k_lo;
    for (std::size_t k = k_lo + 1; k <= k_hi; ++k)
        if (power[k] > power[best]) best = k;
    const bool flat = power[best] <= 0.0;
    return {static_cast<double>(flat ? k_lo : best) * fs / n, flat};
}

double dominant_frequency(const EegSignal& input, const BandDefinition& band) {
    require_nonempty(input, "dominant_frequency");
    require_finite(input, "dominant_frequency");
    validate_band(band, input.sampling_rate_hz);
    if (static_cast<double>(input.samples.size()) < input.sampling_rate_hz)
        throw InputError("dominant_frequency: need at least one second of signal");
    const auto power = fft::power_spectrum(input.samples);
    return band_peak(power, input.sampling_rate_hz, input.samples.size(), band).freq_hz;
}

EegFeatureSet analyze(const EegSignal& input, const std::string& source_path) {
    require_nonempty(input, "analyze");
    require_finite(input, "analyze");
    if (input.samples.size() < 2) throw InputError("analyze: need at least 2 samples");
    if (static_cast<double>(input.samples.size()) < input.sampling_rate_hz)
        throw InputError("analyze: need at least one second of signal");

    const EegSignal centered = remove_dc(input);
    // One spectrum serves all four band-restricted peak searches.
    const auto power = fft::power_spectrum(centered.samples);

    EegFeatureSet features;
    features.source_path = source_path;
    features.sample_count = input.samples.size();
    std::size_t i = 0;
    for (const auto& band : canonical_bands()) {
        const auto coeffs = design_bandpass(band, input.sampling_rate_hz);
        const auto filtered = apply_filter(coeffs, centered);
        const auto env = hilbert_envelope(filtered, 256);
        const auto trend = classify_trend(env);
        const auto peak = band_peak(power, input.sampling_rate_hz, centered.samples.size(), band);
        features.per_band[i++] = {band.name,    trend.trend,
                                  peak.freq_hz, trend.median_first_half,
                                  trend.median_second_half, peak.flat_spectrum};
    }
    return features;
}

EegFeatureSet process_eeg(const std::string& path) {
    return analyze(ingest::parse_eeg_log(path), path);
}

std::string trend_name(Trend trend) {
    return trend == Trend::Increasing ? "Increasing" : "Decreasing";
}

Json to_json(const EegFeatureSet& features) {
    Json bands = Json::array();
    for (const auto& bf : features.per_band) {
        Json b;
        b["name"] = band_name(bf.band);
        b["trend"] = trend_name(bf.trend);
        b["dominant_freq_hz"] = bf.dominant_freq_hz;
        b["median_first_half"] = bf.median_first_half;
        b["median_second_half"] = bf.median_second_half;
        bands.push_back(std::move(b));
    }
    Json j;
    j["bands"] = std::move(bands);
    return j;
}

std::string to_json_string(const EegFeatureSet& features) { return to_json(features).dump(); }

}  // namespace signal
}  // namespace therakit
