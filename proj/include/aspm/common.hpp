#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace aspm {

// All waveforms are dense real sample sequences, indexed in samples
// (Fs = 1 cycle/sample, Nyquist = 0.5).
using SampleBuffer = std::vector<double>;

struct Pulse {
    std::int64_t index = 0;
    double amplitude = 0.0;
};

// Sparse pulse train: ordered (sample index, amplitude) pairs plus the
// total sample count of the rendered frame.
struct SparseTrain {
    std::vector<Pulse> pulses;
    std::int64_t length = 0;

    // Throws std::invalid_argument on invariant breach: indices must be
    // strictly increasing, within [0, length), amplitudes nonzero.
    void validate() const;
};

inline void SparseTrain::validate() const {
    std::int64_t prev = -1;
    for (const Pulse& p : pulses) {
        if (p.index <= prev)
            throw std::invalid_argument("SparseTrain: indices not strictly increasing");
        if (p.index >= length)
            throw std::invalid_argument("SparseTrain: index beyond frame length");
        if (p.amplitude == 0.0)
            throw std::invalid_argument("SparseTrain: zero amplitude stored");
        prev = p.index;
    }
}

}  // namespace aspm
