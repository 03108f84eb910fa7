#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aspm/common.hpp"

namespace aspm {

// Streaming quantile tracker, one output value per input sample.
// Q[k+1] = Q[k] + mu * (S_eps(x[k] - Q[k]) + 2q - 1), output[k] = Q[k]
// before x[k] is consumed, so chunk boundaries cannot change the output.
struct QtfState {
    double q = 0.5;
    double mu = 1e-3;
    double eps = 0.0;  // comparator half-width; 0 = hard sign
    double value = 0.0;
    bool initialized = false;  // first sample seeds value when false

    QtfState() = default;
    QtfState(double q, double mu, double eps);
};

// Processes a chunk, appending one output per input; state carries across
// calls bit-exactly.
void qtf_process(QtfState& state, const SampleBuffer& chunk, SampleBuffer& out);

// One-shot convenience over a whole buffer.
SampleBuffer qtf_run(const SampleBuffer& buffer, double q, double mu, double eps = 0.0);

// Robust range [q1 - beta*(q3-q1), q3 + beta*(q3-q1)] per sample.
struct FenceTrack {
    SampleBuffer lower;
    SampleBuffer upper;
    double beta = 0.0;
    std::int64_t violations = 0;  // q3 < q1 samples, clamped to q1
};

FenceTrack tukey_fences(const SampleBuffer& q1_track, const SampleBuffer& q3_track, double beta);

// Constant fences over n samples, for precomputed quartiles.
FenceTrack constant_fences(double q1, double q3, double beta, std::size_t n);

// Fence scale required for false-positive rate eps_fp at pulse rate R when
// the noise crosses zero at rate R_max.
double beta_for_fp(double eps_fp, double rate, double rate_max);

// prime[k] = x[k] inside the fences, else the fence midrange; aux = x - prime.
std::pair<SampleBuffer, SampleBuffer> inf_filter(const SampleBuffer& buffer,
                                                 const FenceTrack& fences);

// Local maxima above the upper fence (strict rise, non-strict fall) and local
// minima below the lower fence (strict fall, non-strict rise). Endpoints are
// never counted.
SparseTrain pulse_count(const SampleBuffer& buffer, const FenceTrack& fences);

// False-negative rate of threshold pulse counting at peak magnitude
// a_over_sigma noise-sigmas.
double fn_rate_theory(double a_over_sigma, double eps_fp, double rate, double rate_max);

}  // namespace aspm
