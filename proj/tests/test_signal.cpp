#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "therakit/signal.hpp"
#include "therakit/synthgen.hpp"

using namespace therakit;
using testsupport::TempDir;

namespace {

EegSignal make_signal(std::vector<double> samples, double fs = 256.0) {
    EegSignal s;
    s.samples = std::move(samples);
    s.sampling_rate_hz = fs;
    return s;
}

EegSignal tone(double freq, double amp, double fs, double duration_s, double phase = 0.0) {
    return synthgen::synth_eeg({{freq, amp, amp, phase}}, 0.0, fs, duration_s, 0);
}

}  // namespace

TEST_CASE("remove_dc recenters the signal") {
    SUBCASE("constant maps to zero") {
        const auto out = signal::remove_dc(make_signal({5.0, 5.0, 5.0}));
        for (double v : out.samples) CHECK(v == 0.0);
    }
    SUBCASE("mean 2 by inspection") {
        const auto out = signal::remove_dc(make_signal({1.0, 2.0, 3.0}));
        CHECK(out.samples == std::vector<double>{-1.0, 0.0, 1.0});
    }
    SUBCASE("full-session residual mean stays below 1e-9 of full scale") {
        auto session = synthgen::synth_eeg({{5.0, 1.0, 3.0, 0.3}, {10.0, 3.0, 1.0, 1.1}}, 0.5,
                                           256.0, 360.0, 11);
        for (double& v : session.samples) v += 37.25;  // strong DC offset
        const auto out = signal::remove_dc(session);
        REQUIRE(out.samples.size() == session.samples.size());
        double max_abs = 0.0;
        for (double v : session.samples) max_abs = std::max(max_abs, std::abs(v));
        CHECK(std::abs(testsupport::long_double_mean(out.samples)) < 1e-9 * max_abs);
    }
    SUBCASE("empty signal rejected") {
        CHECK_THROWS_AS(signal::remove_dc(make_signal({})), InputError);
    }
    SUBCASE("non-finite sample rejected") {
        CHECK_THROWS_AS(signal::remove_dc(make_signal({1.0, std::nan("")})), InputError);
    }
}

TEST_CASE("design_bandpass meets the Butterworth response spec") {
    SUBCASE("theta passband center within 3 dB of peak") {
        const auto c = signal::design_bandpass(band_definition(Band::Theta), 256.0);
        const double peak = testsupport::grid_peak_magnitude(c, 256.0);
        CHECK(testsupport::grid_magnitude(c, 6.0, 256.0) >= 0.707 * peak);
    }
    SUBCASE("alpha rejects 1 Hz") {
        const auto c = signal::design_bandpass(band_definition(Band::Alpha), 256.0);
        CHECK(testsupport::grid_magnitude(c, 1.0, 256.0) <
              0.1 * testsupport::grid_magnitude(c, 10.5, 256.0));
    }
    SUBCASE("edge beyond Nyquist is a design error") {
        CHECK_THROWS_AS(signal::design_bandpass({Band::Delta, 0.5, 200.0}, 256.0), InputError);
        CHECK_THROWS_AS(signal::design_bandpass({Band::Delta, 0.0, 4.0}, 256.0), InputError);
        CHECK_THROWS_AS(signal::design_bandpass({Band::Delta, 8.0, 4.0}, 256.0), InputError);
    }
    SUBCASE("all canonical bands: stable, order 4, one octave beyond edges at -20 dB") {
        for (const auto& band : canonical_bands()) {
            const auto c = signal::design_bandpass(band, 256.0);
            CHECK(c.order == 4);
            CHECK(c.numerator.size() == 9);
            CHECK(c.denominator.size() == 9);
            CHECK(c.denominator[0] == doctest::Approx(1.0));
            CHECK(signal::is_stable(c));
            const double peak = testsupport::grid_peak_magnitude(c, 256.0);
            const double center = std::sqrt(band.low_hz * band.high_hz);
            CHECK(testsupport::grid_magnitude(c, center, 256.0) >= 0.707 * peak);
            CHECK(testsupport::grid_magnitude(c, band.high_hz * 2.0, 256.0) <= 0.1 * peak);
            CHECK(testsupport::grid_magnitude(c, band.low_hz / 2.0, 256.0) <= 0.1 * peak);
        }
    }
}

TEST_CASE("apply_filter is causal, normalized and selective") {
    const auto theta = signal::design_bandpass(band_definition(Band::Theta), 256.0);
    const auto beta = signal::design_bandpass(band_definition(Band::Beta), 256.0);

    SUBCASE("zero signal passes through unchanged") {
        const auto zeros = make_signal(std::vector<double>(512, 0.0));
        const auto out = signal::apply_filter(theta, zeros);
        CHECK(out.samples == zeros.samples);
    }
    SUBCASE("in-band tone keeps its amplitude") {
        const auto out = signal::apply_filter(theta, tone(6.0, 1.0, 256.0, 20.0));
        double steady = 0.0;
        for (std::size_t i = out.samples.size() - 512; i < out.samples.size(); ++i)
            steady = std::max(steady, std::abs(out.samples[i]));
        CHECK(steady >= 0.7);
        CHECK(steady <= 1.05);
        // and the measured amplitude agrees with the response oracle
        CHECK(steady ==
              doctest::Approx(testsupport::grid_magnitude(theta, 6.0, 256.0)).epsilon(0.03));
    }
    SUBCASE("out-of-band tone is attenuated below 10%") {
        const auto out = signal::apply_filter(beta, tone(6.0, 1.0, 256.0, 20.0));
        double steady = 0.0;
        for (std::size_t i = out.samples.size() - 512; i < out.samples.size(); ++i)
            steady = std::max(steady, std::abs(out.samples[i]));
        CHECK(steady < 0.1);
    }
    SUBCASE("unstable coefficients rejected") {
        FilterCoefficients bad;
        bad.numerator = {1.0};
        bad.denominator = {1.0, -2.0};  // pole at z = 2
        CHECK_THROWS_AS(signal::apply_filter(bad, tone(6.0, 1.0, 256.0, 1.0)), InputError);
        CHECK_FALSE(signal::is_stable(bad));
    }
    SUBCASE("length preserved") {
        const auto in = tone(6.0, 2.0, 256.0, 3.5);
        CHECK(signal::apply_filter(theta, in).samples.size() == in.samples.size());
    }
}

TEST_CASE("hilbert_envelope tracks tone amplitude") {
    SUBCASE("pure tone median within 5% away from window edges") {
        const auto sig = tone(8.0, 2.5, 256.0, 10.0, 0.4);
        const auto env = signal::hilbert_envelope(sig, 256);
        REQUIRE(env.values.size() == sig.samples.size());
        const auto mask = testsupport::interior_mask(env.values.size(), 256, 16);
        std::vector<double> kept;
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask[i]) kept.push_back(env.values[i]);
        const double med = testsupport::sort_median(kept);
        CHECK(med > 0.95 * 2.5);
        CHECK(med < 1.05 * 2.5);
    }
    SUBCASE("zero signal gives zero envelope") {
        const auto env = signal::hilbert_envelope(make_signal(std::vector<double>(300, 0.0)), 256);
        for (double v : env.values) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("length 300 with window 256 preserves length") {
        const auto env = signal::hilbert_envelope(tone(6.0, 1.0, 256.0, 300.0 / 256.0), 256);
        CHECK(env.values.size() == 300);
    }
    SUBCASE("window shorter than 2 rejected") {
        CHECK_THROWS_AS(signal::hilbert_envelope(tone(6.0, 1.0, 256.0, 1.0), 1), InputError);
    }
    SUBCASE("envelope values never negative") {
        const auto noisy = synthgen::synth_eeg({{7.0, 1.0, 2.0, 0.0}}, 1.5, 256.0, 4.0, 99);
        const auto env = signal::hilbert_envelope(noisy, 256);
        for (double v : env.values) CHECK(v >= 0.0);
    }
}

TEST_CASE("classify_trend compares half-session medians") {
    SUBCASE("step up is Increasing") {
        const auto r = signal::classify_trend({{1.0, 1.0, 3.0, 3.0}, 256});
        CHECK(r.trend == Trend::Increasing);
        CHECK(r.median_first_half == 1.0);
        CHECK(r.median_second_half == 3.0);
    }
    SUBCASE("tie resolves to Decreasing") {
        const auto r = signal::classify_trend({{2.0, 2.0, 2.0, 2.0}, 256});
        CHECK(r.trend == Trend::Decreasing);
        CHECK(r.median_first_half == 2.0);
        CHECK(r.median_second_half == 2.0);
    }
    SUBCASE("ramping tone is Increasing through the real chain") {
        const auto sig = synthgen::synth_eeg({{6.0, 1.0, 3.0, 0.0}}, 0.0, 256.0, 60.0, 0);
        const auto env = signal::hilbert_envelope(sig, 256);
        CHECK(signal::classify_trend(env).trend == Trend::Increasing);
    }
    SUBCASE("too short rejected") {
        CHECK_THROWS_AS(signal::classify_trend({{1.0}, 256}), InputError);
    }
    SUBCASE("medians match a sort-based oracle exactly") {
        std::mt19937 rng(7);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = 2 + rng() % 101;  // odd and even lengths
            std::vector<double> values(n);
            for (auto& v : values) v = static_cast<double>(rng() % 1000) / 7.0;
            const Envelope env{values, 256};
            const auto r = signal::classify_trend(env);
            const std::size_t half = n / 2;
            const std::vector<double> first(values.begin(), values.begin() + half);
            const std::vector<double> second(values.begin() + half, values.end());
            CHECK(r.median_first_half == testsupport::sort_median(first));
            CHECK(r.median_second_half == testsupport::sort_median(second));
            CHECK((r.trend == Trend::Increasing) ==
                  (r.median_second_half > r.median_first_half));
        }
    }
}

TEST_CASE("dominant_frequency finds the strongest in-band bin") {
    SUBCASE("pure 6 Hz tone at 8 s resolution") {
        const double f = signal::dominant_frequency(tone(6.0, 1.0, 256.0, 8.0),
                                                    band_definition(Band::Theta));
        CHECK(std::abs(f - 6.0) <= 0.125);
    }
    SUBCASE("larger amplitude wins inside the band") {
        const auto sig = synthgen::synth_eeg({{5.0, 1.0, 1.0, 0.0}, {6.0, 2.0, 2.0, 1.0}}, 0.0,
                                             256.0, 8.0, 0);
        const double f = signal::dominant_frequency(sig, band_definition(Band::Theta));
        CHECK(std::abs(f - 6.0) <= 0.125);
    }
    SUBCASE("result always lies inside the band") {
        std::mt19937 rng(3);
        for (int trial = 0; trial < 10; ++trial) {
            const auto sig = synthgen::synth_eeg(
                {{1.0 + (rng() % 280) / 10.0, 1.0, 2.0, 0.0}}, 1.0, 256.0, 4.0, rng());
            for (const auto& band : canonical_bands()) {
                const double f = signal::dominant_frequency(sig, band);
                CHECK(f >= band.low_hz);
                CHECK(f <= band.high_hz);
            }
        }
    }
    SUBCASE("needs at least one second of signal") {
        CHECK_THROWS_AS(signal::dominant_frequency(make_signal(std::vector<double>(100, 1.0)),
                                                   band_definition(Band::Theta)),
                        InputError);
    }
}

TEST_CASE("analyze and process_eeg compose the full chain") {
    SUBCASE("two ramped tones land in their bands") {
        const auto sig = synthgen::synth_eeg({{5.0, 1.0, 3.0, 0.0}, {10.0, 3.0, 1.0, 0.7}}, 0.0,
                                             256.0, 120.0, 5);
        const auto features = signal::analyze(sig, "mem");
        const auto& theta = features.per_band[1];
        const auto& alpha = features.per_band[2];
        CHECK(theta.band == Band::Theta);
        CHECK(theta.trend == Trend::Increasing);
        CHECK(std::abs(theta.dominant_freq_hz - 5.0) <= 0.125);
        CHECK(alpha.band == Band::Alpha);
        CHECK(alpha.trend == Trend::Decreasing);
        CHECK(std::abs(alpha.dominant_freq_hz - 10.0) <= 0.125);
        CHECK(features.sample_count == sig.samples.size());
    }
    SUBCASE("zero-signal file: ties decrease, flat spectra flagged") {
        TempDir dir;
        EegSignal zeros;
        zeros.samples.assign(1024, 0.0);
        const auto path = dir.file("zeros.csv");
        ingest::write_eeg_log(path, zeros);
        const auto features = signal::process_eeg(path);
        for (const auto& bf : features.per_band) {
            CHECK(bf.trend == Trend::Decreasing);
            CHECK(bf.flat_spectrum);
            const auto& band = band_definition(bf.band);
            CHECK(bf.dominant_freq_hz >= band.low_hz);
            CHECK(bf.dominant_freq_hz <= band.high_hz);
        }
    }
    SUBCASE("missing file names the path") {
        CHECK_THROWS_WITH_AS(signal::process_eeg("/nonexistent/eeg.csv"),
                             doctest::Contains("/nonexistent/eeg.csv"), InputError);
    }
    SUBCASE("amplitude invariance under scaling") {
        const auto base = synthgen::synth_eeg({{5.0, 1.0, 3.0, 0.0}, {21.0, 2.0, 1.0, 0.3}}, 0.4,
                                              256.0, 30.0, 17);
        const auto reference = signal::analyze(base);
        for (double c : {0.01, 1000.0}) {
            EegSignal scaled = base;
            for (double& v : scaled.samples) v *= c;
            const auto result = signal::analyze(scaled);
            for (std::size_t b = 0; b < 4; ++b) {
                CHECK(result.per_band[b].trend == reference.per_band[b].trend);
                CHECK(result.per_band[b].dominant_freq_hz ==
                      reference.per_band[b].dominant_freq_hz);
            }
        }
    }
    SUBCASE("serialization uses the pinned key order") {
        EegFeatureSet features;
        features.per_band = {{{Band::Delta, Trend::Decreasing, 2.0, 1.0, 0.5, false},
                              {Band::Theta, Trend::Increasing, 5.0, 1.0, 2.0, false},
                              {Band::Alpha, Trend::Decreasing, 10.0, 2.0, 1.0, false},
                              {Band::Beta, Trend::Decreasing, 21.0, 0.5, 0.25, false}}};
        const std::string expected =
            R"({"bands":[)"
            R"({"name":"Delta","trend":"Decreasing","dominant_freq_hz":2.0,"median_first_half":1.0,"median_second_half":0.5},)"
            R"({"name":"Theta","trend":"Increasing","dominant_freq_hz":5.0,"median_first_half":1.0,"median_second_half":2.0},)"
            R"({"name":"Alpha","trend":"Decreasing","dominant_freq_hz":10.0,"median_first_half":2.0,"median_second_half":1.0},)"
            R"({"name":"Beta","trend":"Decreasing","dominant_freq_hz":21.0,"median_first_half":0.5,"median_second_half":0.25}]})";
        CHECK(signal::to_json_string(features) == expected);
    }
}

TEST_CASE("windowed envelope agrees with the direct full-signal oracle") {
    // Window-commensurate tones: integer cycles per 256-sample window, length
    // a multiple of the window, so away-from-boundary agreement is tight.
    // Broadband content cannot satisfy the 1% bound because truncating the
    // Hilbert kernel at window edges perturbs interior samples.
    std::mt19937 rng(21);
    for (int trial = 0; trial < 4; ++trial) {
        const std::size_t n = 256 * (3 + rng() % 6);
        std::vector<ToneSpec> tones;
        const int count = 1 + static_cast<int>(rng() % 3);
        for (int t = 0; t < count; ++t)
            tones.push_back({static_cast<double>(2 + rng() % 29), 0.5 + (rng() % 100) / 40.0,
                             0.5 + (rng() % 100) / 40.0, (rng() % 628) / 100.0});
        const auto sig =
            synthgen::synth_eeg(tones, 0.0, 256.0, static_cast<double>(n) / 256.0, rng());
        REQUIRE(sig.samples.size() == n);
        const auto env = signal::hilbert_envelope(sig, 256);
        const auto oracle = testsupport::envelope_direct(sig.samples);
        const auto mask = testsupport::interior_mask(n, 256, 16);
        double diff_sq = 0.0, ref_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!mask[i]) continue;
            diff_sq += (env.values[i] - oracle[i]) * (env.values[i] - oracle[i]);
            ref_sq += oracle[i] * oracle[i];
        }
        CHECK(std::sqrt(diff_sq / ref_sq) < 0.01);
    }
}

TEST_CASE("non-adjacent band filter rejects a theta-center tone") {
    const auto theta_tone = tone(6.0, 1.0, 256.0, 16.0);
    const auto coeffs = signal::design_bandpass(band_definition(Band::Beta), 256.0);
    const auto out = signal::apply_filter(coeffs, theta_tone);
    double steady = 0.0;
    for (std::size_t i = out.samples.size() - 512; i < out.samples.size(); ++i)
        steady = std::max(steady, std::abs(out.samples[i]));
    CHECK(steady < 0.1);
}
