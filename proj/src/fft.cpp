#include "therakit/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace therakit::fft {

namespace {

// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanGuard {
    fftw_plan plan = nullptr;
    ~PlanGuard() {
        if (plan) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

}  // namespace

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> data,
                                            bool inverse) {
    const std::size_t n = data.size();
    if (n == 0) throw std::invalid_argument("fft: empty input");
    std::vector<std::complex<double>> in(data.begin(), data.end());
    std::vector<std::complex<double>> out(n);

    PlanGuard guard;
    {
        std::lock_guard lock(planner_mutex());
        guard.plan = fftw_plan_dft_1d(static_cast<int>(n),
                                      reinterpret_cast<fftw_complex*>(in.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                      FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(guard.plan);

    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : out) v *= scale;
    }
    return out;
}

std::vector<std::complex<double>> analytic_signal(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("fft: empty input");
    if (n == 1) return {std::complex<double>(x[0], 0.0)};

    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = x[i];
    auto spectrum = transform(buf, false);

    // Keep DC (and Nyquist for even n) as-is, double the positive bins,
    // zero the negative ones.
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < (n % 2 == 0 ? half : half + 1); ++k) spectrum[k] *= 2.0;
    for (std::size_t k = half + 1; k < n; ++k) spectrum[k] = 0.0;

    return transform(spectrum, true);
}

std::vector<double> power_spectrum(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("fft: empty input");
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(n / 2 + 1);

    PlanGuard guard;
    {
        std::lock_guard lock(planner_mutex());
        guard.plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE);
    }
    fftw_execute(guard.plan);

    std::vector<double> power(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) power[k] = std::norm(out[k]);
    return power;
}

}  // namespace therakit::fft
