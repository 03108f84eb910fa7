#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "aspm/common.hpp"

namespace aspm {

// Real-to-complex FFT of the first n samples of x (zero-padded as needed).
// Returns n/2 + 1 bins. n must be a power of two.
std::vector<std::complex<double>> rfft(const SampleBuffer& x, std::size_t n);

// Inverse of rfft; returns n real samples.
SampleBuffer irfft(const std::vector<std::complex<double>>& spectrum, std::size_t n);

// Full linear convolution via FFT, length a.size() + b.size() - 1.
SampleBuffer fft_convolve(const SampleBuffer& a, const SampleBuffer& b);

std::size_t next_pow2(std::size_t n);

}  // namespace aspm
