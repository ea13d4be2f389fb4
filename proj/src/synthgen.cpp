#include "therakit/synthgen.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace therakit::synthgen {

namespace {

// Uniform double in [-1, 1) from the standardized mt19937 stream; avoids the
// implementation-defined std::uniform_real_distribution.
double next_uniform(std::mt19937& rng) {
    return static_cast<double>(rng()) * (2.0 / 4294967296.0) - 1.0;
}

}  // namespace

EegSignal synth_eeg(const std::vector<ToneSpec>& tones, double noise_amplitude, double fs,
                    double duration_s, std::uint32_t seed) {
    if (fs <= 0.0) throw InputError("synth_eeg: sampling rate must be positive");
    if (duration_s <= 0.0) throw InputError("synth_eeg: duration must be positive");
    for (const auto& tone : tones) {
        if (tone.freq_hz <= 0.0) throw InputError("synth_eeg: tone frequency must be positive");
        if (tone.freq_hz >= fs / 2.0)
            throw InputError("synth_eeg: tone at " + std::to_string(tone.freq_hz) +
                             " Hz is at or above Nyquist (" + std::to_string(fs / 2.0) + " Hz)");
        if (tone.amplitude_start < 0.0 || tone.amplitude_end < 0.0)
            throw InputError("synth_eeg: amplitudes must be non-negative");
    }
    if (noise_amplitude < 0.0) throw InputError("synth_eeg: noise amplitude must be non-negative");

    const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
    EegSignal out;
    out.sampling_rate_hz = fs;
    out.samples.resize(n, 0.0);

    const double ramp_denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (const auto& tone : tones) {
        const double w = 2.0 * std::numbers::pi * tone.freq_hz / fs;
        for (std::size_t i = 0; i < n; ++i) {
            const double amp = tone.amplitude_start +
                               (tone.amplitude_end - tone.amplitude_start) *
                                   (static_cast<double>(i) / ramp_denom);
            out.samples[i] += amp * std::sin(w * static_cast<double>(i) + tone.phase_rad);
        }
    }
    if (noise_amplitude > 0.0) {
        std::mt19937 rng(seed);
        for (std::size_t i = 0; i < n; ++i)
            out.samples[i] += noise_amplitude * next_uniform(rng);
    }
    return out;
}

CardioSeries synth_cardio(double base_bpm, double jitter_bpm, double duration_s,
                          std::uint32_t seed) {
    if (!(base_bpm > 20.0 && base_bpm < 250.0))
        throw InputError("synth_cardio: base_bpm must lie in (20, 250)");
    if (duration_s <= 0.0) throw InputError("synth_cardio: duration must be positive");
    if (jitter_bpm < 0.0) throw InputError("synth_cardio: jitter must be non-negative");

    const auto n = static_cast<std::size_t>(std::llround(duration_s));
    CardioSeries series;
    series.sample_rate_hz = 1.0;
    series.hr_bpm.reserve(n);
    series.spo2_pct.assign(n, 98.0);
    std::mt19937 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double jitter = jitter_bpm > 0.0 ? jitter_bpm * next_uniform(rng) : 0.0;
        series.hr_bpm.push_back(base_bpm + jitter);
    }
    return series;
}

Trend expected_trend(const ToneSpec& tone) {
    return tone.amplitude_end > tone.amplitude_start ? Trend::Increasing : Trend::Decreasing;
}

ExpectedBand expected_band(const std::vector<ToneSpec>& tones, const BandDefinition& band) {
    ExpectedBand expected;
    double best_mean = -1.0;
    for (const auto& tone : tones) {
        if (tone.freq_hz < band.low_hz || tone.freq_hz > band.high_hz) continue;
        const double mean_amp = (tone.amplitude_start + tone.amplitude_end) / 2.0;
        if (mean_amp > best_mean) {
            best_mean = mean_amp;
            expected.has_tone = true;
            expected.trend = expected_trend(tone);
            expected.dominant_freq_hz = tone.freq_hz;
        }
    }
    return expected;
}

}  // namespace therakit::synthgen
