#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aspm/common.hpp"
#include "aspm/filters.hpp"

namespace aspm {

enum class SnrReference {
    ChannelInput,   // mean(signal^2) / sigma_n^2 at the channel
    MatchedOutput,  // signal power measured after descrambling + matched filtering
};

struct ChannelConfig {
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    SnrReference reference = SnrReference::MatchedOutput;
    // Receive chain used for MatchedOutput calibration (descramble then seed
    // matched filter); null taps fall back to ChannelInput behaviour.
    const FirFilter* descramble = nullptr;
    const FirFilter* matched = nullptr;
    bool noiseless = false;  // snr -> +inf flag
};

// Noise standard deviation that realizes the configured SNR for this buffer.
// For MatchedOutput the filters must have unit energy so the noise variance
// is preserved through the chain.
double calibrate_sigma(const SampleBuffer& buffer, const ChannelConfig& config);

// Adds white Gaussian noise; returns the noisy buffer and the sigma_n used.
std::pair<SampleBuffer, double> awgn(const SampleBuffer& buffer, const ChannelConfig& config);

struct MixComponent {
    SampleBuffer buffer;
    double power = 0.0;  // target mean power of this component in the sum
};

// Rescales each component to its target mean power and sums; shorter
// components are zero-padded at the tail.
SampleBuffer mix(const std::vector<MixComponent>& components);

}  // namespace aspm
