#pragma once

#include <cstdint>
#include <vector>

#include "aspm/common.hpp"

namespace aspm {

enum class AmplitudeMode {
    FixedPolarityRandom,  // fixed magnitude, i.i.d. random sign
    Fixed,                // fixed magnitude and sign
};

// Equidistant polarity encoding: pulse j (1-based) at index j*n_p with
// amplitude amplitude * (-1)^bits[j-1]. Frame length (|bits|+1)*n_p, so the
// frame starts with a silent prefix of n_p samples.
SparseTrain encode_equidistant(const std::vector<int>& bits, std::int64_t n_p,
                               double amplitude = 1.0);

// Randomized-timing train: interarrival gaps are i.i.d. shifted-geometric
// draws with mean mean_gap and minimum min_gap.
SparseTrain encode_random(std::int64_t n_pulses, double mean_gap, std::int64_t min_gap,
                          AmplitudeMode mode, double amplitude, std::uint64_t seed);

// Dense frame: zero everywhere except buffer[k_j] = A_j.
SampleBuffer render(const SparseTrain& train);

// Inverse of render: collects the nonzero samples.
SparseTrain sparsify(const SampleBuffer& buffer);

// Polarity decision at the given sample indices: bit 0 for buffer[k] >= 0,
// bit 1 for buffer[k] < 0 (exact zero decodes as 0).
std::vector<int> decode_polarity(const SampleBuffer& buffer,
                                 const std::vector<std::int64_t>& indices);

}  // namespace aspm
