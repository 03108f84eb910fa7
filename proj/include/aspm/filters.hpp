#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aspm/common.hpp"

namespace aspm {

struct FirFilter {
    std::vector<double> taps;
    std::int64_t delay = 0;  // group-delay reference index (samples)
    std::string label;

    double energy() const;
    // Throws std::invalid_argument if taps are empty, non-finite, or all zero.
    void validate() const;
};

// One second-order allpass section with transfer
// (a2 + a1 z^-1 + z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct BiquadAllpass {
    double a1 = 0.0;
    double a2 = 0.0;

    // Poles strictly inside the unit circle (stability triangle).
    bool stable() const { return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2; }

    // Section from a conjugate pole pair at radius r, angle theta.
    static BiquadAllpass from_pole(double radius, double angle);
};

struct AllpassCascade {
    std::vector<BiquadAllpass> sections;
    std::uint64_t seed = 0;
    double pole_radius_min = 0.0;
    double pole_radius_max = 0.0;
};

// Transmit spreading FIR g-hat and its time-reversed matched descrambler g.
struct ShapingPair {
    FirFilter spread;      // g-hat, transmit side
    FirFilter descramble;  // g = reverse(spread), receive side
    FirFilter seed_filter;
    double truncation_tol = 0.0;
};

// Unit-energy root-raised-cosine FIR; support span*n_s + 1 taps
// (span*n_s must be even). Singularities filled by their analytic limits.
FirFilter design_rrc(double beta, int n_s, int span);

// Raised-cosine pulse as the self-convolution of the RRC design,
// normalized to unit peak.
FirFilter design_rc(double beta, int n_s, int span);

// Cascade of n_sections conjugate-pole-pair allpass biquads with radius
// uniform in [r_min, r_max] and angle uniform in (0, pi); deterministic
// per seed. The (seed, n_sections, radius range) triple is the key.
AllpassCascade random_allpass_cascade(int n_sections, double pole_radius_min,
                                      double pole_radius_max, std::uint64_t seed);

// Exact per-section DF2T recursion. The input is extended with zeros until the
// ring-down falls below tail_tol times the running output peak, so the output
// is longer than the input. Zero sections is the identity (no tail).
SampleBuffer apply_cascade(const AllpassCascade& cascade, const SampleBuffer& buffer,
                           double tail_tol = 1e-4);

// Spread the seed with the cascade, truncate when the response has decayed
// (keeps all samples >= tol*peak and at least (1 - tol^2) of the energy),
// time-invert. descramble = reverse(spread).
ShapingPair make_shaping_pair(const FirFilter& seed_filter, const AllpassCascade& cascade,
                              double truncation_tol = 1e-4);

// Full linear convolution, output length n + m - 1. FFT-based for long
// filters, direct otherwise; both paths agree to 1e-10 relative.
SampleBuffer convolve(const SampleBuffer& buffer, const SampleBuffer& taps);
SampleBuffer convolve(const SampleBuffer& buffer, const FirFilter& fir);

// Magnitude response of the cascade at frequency f (cycles/sample); unity at
// every frequency for any stable allpass section.
double cascade_magnitude(const AllpassCascade& cascade, double freq);

// Unit impulse as a FirFilter (seed for pure-allpass shaping pairs).
FirFilter delta_filter();

}  // namespace aspm
