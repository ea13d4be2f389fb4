#pragma once

#include <cstdint>
#include <vector>

#include "therakit/cardio.hpp"
#include "therakit/signal.hpp"

namespace therakit {

// One sinusoid with a linear amplitude ramp from amplitude_start at t=0 to
// amplitude_end at the last sample.
struct ToneSpec {
    double freq_hz;
    double amplitude_start;
    double amplitude_end;
    double phase_rad = 0.0;
};

namespace synthgen {

// Sum of amplitude-ramped sinusoids plus seeded uniform noise in
// [-noise_amplitude, noise_amplitude). Bit-identical for equal parameters
// and seed.
EegSignal synth_eeg(const std::vector<ToneSpec>& tones, double noise_amplitude, double fs,
                    double duration_s, std::uint32_t seed);

// 1 Hz heart-rate series around base_bpm with seeded uniform jitter in
// [-jitter_bpm, jitter_bpm); SpO2 held at a constant plausible value.
CardioSeries synth_cardio(double base_bpm, double jitter_bpm, double duration_s,
                          std::uint32_t seed);

// Ground-truth rule for generated fixtures: the strongest tone inside a band
// (largest mean amplitude) determines the band's expected dominant frequency,
// and its ramp direction the expected trend (flat ramps tie to Decreasing).
struct ExpectedBand {
    bool has_tone = false;
    Trend trend = Trend::Decreasing;
    double dominant_freq_hz = 0.0;
};

Trend expected_trend(const ToneSpec& tone);
ExpectedBand expected_band(const std::vector<ToneSpec>& tones, const BandDefinition& band);

}  // namespace synthgen
}  // namespace therakit
