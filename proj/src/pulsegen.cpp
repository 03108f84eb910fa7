#include "aspm/pulsegen.hpp"

#include <cmath>

#include "aspm/rng.hpp"

namespace aspm {

SparseTrain encode_equidistant(const std::vector<int>& bits, std::int64_t n_p,
                               double amplitude) {
    if (bits.empty()) throw std::invalid_argument("encode_equidistant: empty bit sequence");
    if (n_p < 1) throw std::invalid_argument("encode_equidistant: n_p must be >= 1");
    if (amplitude <= 0.0) throw std::invalid_argument("encode_equidistant: amplitude must be > 0");

    SparseTrain train;
    train.pulses.reserve(bits.size());
    for (std::size_t j = 0; j < bits.size(); ++j) {
        const double a = (bits[j] & 1) ? -amplitude : amplitude;
        train.pulses.push_back({static_cast<std::int64_t>(j + 1) * n_p, a});
    }
    train.length = static_cast<std::int64_t>(bits.size() + 1) * n_p;
    return train;
}

SparseTrain encode_random(std::int64_t n_pulses, double mean_gap, std::int64_t min_gap,
                          AmplitudeMode mode, double amplitude, std::uint64_t seed) {
    if (n_pulses < 1) throw std::invalid_argument("encode_random: n_pulses must be >= 1");
    if (min_gap < 1) throw std::invalid_argument("encode_random: min_gap must be >= 1");
    if (mean_gap < static_cast<double>(min_gap))
        throw std::invalid_argument("encode_random: mean_gap must be >= min_gap");
    if (amplitude <= 0.0) throw std::invalid_argument("encode_random: amplitude must be > 0");

    Rng rng(seed);
    SparseTrain train;
    train.pulses.reserve(static_cast<std::size_t>(n_pulses));
    std::int64_t k = 0;
    for (std::int64_t j = 0; j < n_pulses; ++j) {
        k += rng.shifted_geometric(mean_gap, min_gap);
        const double a =
            (mode == AmplitudeMode::FixedPolarityRandom) ? amplitude * rng.sign() : amplitude;
        train.pulses.push_back({k, a});
    }
    train.length = k + static_cast<std::int64_t>(std::llround(mean_gap));
    return train;
}

SampleBuffer render(const SparseTrain& train) {
    train.validate();
    SampleBuffer buffer(static_cast<std::size_t>(train.length), 0.0);
    for (const Pulse& p : train.pulses)
        buffer[static_cast<std::size_t>(p.index)] = p.amplitude;
    return buffer;
}

SparseTrain sparsify(const SampleBuffer& buffer) {
    SparseTrain train;
    for (std::size_t k = 0; k < buffer.size(); ++k)
        if (buffer[k] != 0.0) train.pulses.push_back({static_cast<std::int64_t>(k), buffer[k]});
    train.length = static_cast<std::int64_t>(buffer.size());
    return train;
}

std::vector<int> decode_polarity(const SampleBuffer& buffer,
                                 const std::vector<std::int64_t>& indices) {
    std::vector<int> bits;
    bits.reserve(indices.size());
    for (std::int64_t k : indices) {
        if (k < 0 || k >= static_cast<std::int64_t>(buffer.size()))
            throw std::invalid_argument("decode_polarity: index out of range");
        bits.push_back(buffer[static_cast<std::size_t>(k)] < 0.0 ? 1 : 0);
    }
    return bits;
}

}  // namespace aspm
