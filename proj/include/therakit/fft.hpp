#pragma once

#include <complex>
#include <span>
#include <vector>

namespace therakit::fft {

// Complex DFT of arbitrary length n >= 1. The inverse is normalized by 1/n.
std::vector<std::complex<double>> transform(std::span<const std::complex<double>> data,
                                            bool inverse = false);

// Analytic signal z of a real signal: one-sided spectrum doubling.
// real(z) reproduces the input; |z| is the instantaneous amplitude envelope.
std::vector<std::complex<double>> analytic_signal(std::span<const double> x);

// |X_k|^2 for k = 0 .. n/2 (one-sided), bin k at frequency k * fs / n.
std::vector<double> power_spectrum(std::span<const double> x);

}  // namespace therakit::fft
