#include "aspm/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "aspm/metrics.hpp"
#include "aspm/rng.hpp"

namespace aspm {

double calibrate_sigma(const SampleBuffer& buffer, const ChannelConfig& config) {
    if (config.noiseless) return 0.0;
    double signal_power = mean_power(buffer);
    if (signal_power <= 0.0) throw std::invalid_argument("awgn: zero-power input");

    if (config.reference == SnrReference::MatchedOutput && config.descramble != nullptr) {
        SampleBuffer probe = convolve(buffer, *config.descramble);
        if (config.matched != nullptr) probe = convolve(probe, *config.matched);
        signal_power = mean_power(probe);
    }
    const double snr = std::pow(10.0, config.snr_db / 10.0);
    return std::sqrt(signal_power / snr);
}

std::pair<SampleBuffer, double> awgn(const SampleBuffer& buffer, const ChannelConfig& config) {
    const double sigma = calibrate_sigma(buffer, config);
    SampleBuffer out = buffer;
    if (sigma > 0.0) {
        Rng rng(config.seed);
        for (double& v : out) v += sigma * rng.normal();
    }
    return {std::move(out), sigma};
}

SampleBuffer mix(const std::vector<MixComponent>& components) {
    if (components.empty()) throw std::invalid_argument("mix: empty component list");
    std::size_t n = 0;
    for (const MixComponent& c : components) n = std::max(n, c.buffer.size());
    SampleBuffer out(n, 0.0);
    for (const MixComponent& c : components) {
        if (c.power < 0.0) throw std::invalid_argument("mix: negative power");
        if (c.power == 0.0) continue;
        const double p = mean_power(c.buffer);
        if (p <= 0.0) throw std::invalid_argument("mix: zero-power component with nonzero target");
        const double scale = std::sqrt(c.power / p);
        for (std::size_t k = 0; k < c.buffer.size(); ++k) out[k] += scale * c.buffer[k];
    }
    return out;
}

}  // namespace aspm
