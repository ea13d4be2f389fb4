#pragma once

// Shared test helpers: independent oracles (direct DFT, sort-based median,
// frequency-response grid, brute-force retrieval) and process/tempdir glue.
// Everything here is deliberately written from the operation definitions,
// not by calling the library paths under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "therakit/ingest.hpp"
#include "therakit/recommend.hpp"
#include "therakit/signal.hpp"

namespace testsupport {

// ---------------------------------------------------------------- oracles

// O(n^2) DFT straight from the definition; no FFT library involved.
inline std::vector<std::complex<double>> dft_direct(
    const std::vector<std::complex<double>>& x, bool inverse) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> sum = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k) *
                                 static_cast<double>(t) / static_cast<double>(n);
            sum += x[t] * std::polar(1.0, angle);
        }
        out[k] = inverse ? sum / static_cast<double>(n) : sum;
    }
    return out;
}

// Full-signal amplitude envelope via the direct DFT: the independent route
// against which the windowed implementation is compared.
inline std::vector<double> envelope_direct(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
    auto spec = dft_direct(buf, false);
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < (n % 2 == 0 ? half : half + 1); ++k) spec[k] *= 2.0;
    for (std::size_t k = half + 1; k < n; ++k) spec[k] = 0.0;
    auto z = dft_direct(spec, true);
    std::vector<double> env(n);
    for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(z[i]);
    return env;
}

inline double sort_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Extended-precision mean for the DC-removal check.
inline double long_double_mean(const std::vector<double>& v) {
    long double sum = 0.0L;
    for (double x : v) sum += static_cast<long double>(x);
    return static_cast<double>(sum / static_cast<long double>(v.size()));
}

// |H(e^{j 2 pi f / fs})| evaluated directly from the coefficient definition.
inline double grid_magnitude(const therakit::FilterCoefficients& c, double freq_hz, double fs) {
    const double w = 2.0 * std::numbers::pi * freq_hz / fs;
    std::complex<double> num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < c.numerator.size(); ++k)
        num += c.numerator[k] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(k)));
    for (std::size_t k = 0; k < c.denominator.size(); ++k)
        den += c.denominator[k] * std::exp(std::complex<double>(0.0, -w * static_cast<double>(k)));
    return std::abs(num / den);
}

inline double grid_peak_magnitude(const therakit::FilterCoefficients& c, double fs) {
    double peak = 0.0;
    for (double f = 0.05; f < fs / 2.0; f += 0.05)
        peak = std::max(peak, grid_magnitude(c, f, fs));
    return peak;
}

// Keeps envelope samples at least `edge` positions away from every window
// boundary.
inline std::vector<bool> interior_mask(std::size_t n, std::size_t window, std::size_t edge) {
    std::vector<bool> mask(n, false);
    for (std::size_t start = 0; start < n; start += window) {
        const std::size_t end = std::min(start + window, n);
        const std::size_t lo = start + edge;
        const std::size_t hi = end > edge ? end - edge : 0;
        for (std::size_t i = lo; i < hi; ++i) mask[i] = true;
    }
    return mask;
}

// Brute-force enumerate-and-sort retrieval, written from the ranking prose.
inline std::vector<std::string> brute_force_retrieve(double avg_bpm, therakit::Scenario scenario,
                                                     const therakit::MusicDatabase& db,
                                                     double exercise_offset = 30.0) {
    using Entry = std::pair<double, std::string>;
    std::vector<Entry> entries;
    if (scenario == therakit::Scenario::Relaxation) {
        for (const auto& t : db.tracks)
            if (t.bpm <= avg_bpm) entries.push_back({avg_bpm - t.bpm, t.track_id});
        if (entries.empty()) {
            const therakit::MusicTrack* best = nullptr;
            for (const auto& t : db.tracks)
                if (!best || t.bpm < best->bpm ||
                    (t.bpm == best->bpm && t.track_id < best->track_id))
                    best = &t;
            return {best->track_id};
        }
    } else {
        const double target = std::clamp(avg_bpm + exercise_offset, 40.0, 130.0);
        for (const auto& t : db.tracks)
            entries.push_back({std::abs(t.bpm - target), t.track_id});
    }
    std::sort(entries.begin(), entries.end());
    std::vector<std::string> ids;
    for (const auto& [d, id] : entries) ids.push_back(id);
    return ids;
}

// ------------------------------------------------------------ environment

class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("therakit_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

// Runs the built CLI with output capture.
inline CliResult run_cli(const std::string& args) {
    const TempDir dir;
    const std::string out_path = dir.file("stdout");
    const std::string err_path = dir.file("stderr");
    const std::string cmd =
        std::string(THERAKIT_BIN) + " " + args + " >" + out_path + " 2>" + err_path;
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_file(out_path);
    result.err = read_file(err_path);
    return result;
}

}  // namespace testsupport
