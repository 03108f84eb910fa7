#include "aspm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aspm/fft.hpp"

namespace aspm {

using std::numbers::pi;

double mean_power(const SampleBuffer& buffer) {
    if (buffer.empty()) return 0.0;
    double acc = 0.0;
    for (double v : buffer) acc += v * v;
    return acc / static_cast<double>(buffer.size());
}

CrestReport papr(const SampleBuffer& buffer, std::int64_t begin, std::int64_t end) {
    if (begin < 0 || end > static_cast<std::int64_t>(buffer.size()) || begin >= end)
        throw std::invalid_argument("papr: bad interval");
    double peak = 0.0, acc = 0.0;
    for (std::int64_t k = begin; k < end; ++k) {
        const double p = buffer[static_cast<std::size_t>(k)] * buffer[static_cast<std::size_t>(k)];
        peak = std::max(peak, p);
        acc += p;
    }
    if (acc == 0.0) throw std::invalid_argument("papr: all-zero interval");
    CrestReport r;
    r.papr = peak * static_cast<double>(end - begin) / acc;
    r.papr_db = 10.0 * std::log10(r.papr);
    r.begin = begin;
    r.end = end;
    return r;
}

CrestReport papr(const SampleBuffer& buffer) {
    return papr(buffer, 0, static_cast<std::int64_t>(buffer.size()));
}

namespace {

// Spectral magnitudes on a common power-of-two grid, zero-padded.
std::vector<double> spectrum_mag(const std::vector<double>& taps, std::size_t n) {
    const auto spec = rfft(taps, n);
    std::vector<double> mag(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) mag[i] = std::abs(spec[i]);
    return mag;
}

}  // namespace

double tbp_ratio(const FirFilter& f1, const FirFilter& f2) {
    f1.validate();
    f2.validate();
    const std::size_t n = next_pow2(2 * std::max(f1.taps.size(), f2.taps.size()));
    const auto m1 = spectrum_mag(f1.taps, n);
    const auto m2 = spectrum_mag(f2.taps, n);
    double diff2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 0; i < m1.size(); ++i) {
        diff2 += (m1[i] - m2[i]) * (m1[i] - m2[i]);
        ref2 += m1[i] * m1[i];
    }
    if (diff2 > 1e-4 * ref2)
        throw std::invalid_argument("tbp_ratio: spectral content differs; ratio undefined");
    auto peak_power = [](const std::vector<double>& taps) {
        double p = 0.0;
        for (double t : taps) p = std::max(p, t * t);
        return p;
    };
    return peak_power(f1.taps) / peak_power(f2.taps);
}

double tbp_gabor(const FirFilter& f) {
    f.validate();
    // Time spread from |f|^2 moments, frequency spread from the power spectrum.
    const double e = f.energy();
    double mt = 0.0;
    for (std::size_t k = 0; k < f.taps.size(); ++k)
        mt += static_cast<double>(k) * f.taps[k] * f.taps[k];
    mt /= e;
    double vt = 0.0;
    for (std::size_t k = 0; k < f.taps.size(); ++k) {
        const double d = static_cast<double>(k) - mt;
        vt += d * d * f.taps[k] * f.taps[k];
    }
    vt /= e;

    const std::size_t n = next_pow2(8 * f.taps.size());
    const auto mag = spectrum_mag(f.taps, n);
    double ef = 0.0, vf = 0.0;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        const double freq = static_cast<double>(i) / static_cast<double>(n);
        const double p = mag[i] * mag[i];
        ef += p;
        vf += freq * freq * p;  // symmetric spectrum of a real signal: mean 0
    }
    vf /= ef;
    return 4.0 * pi * std::sqrt(vt) * std::sqrt(vf);
}

std::pair<double, double> exact_quartiles(std::span<const double> samples) {
    if (samples.size() < 4) throw std::invalid_argument("exact_quartiles: need >= 4 samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    auto at = [&](double p) {
        const double h = p * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(h);
        const double frac = h - static_cast<double>(lo);
        if (lo + 1 >= sorted.size()) return sorted.back();
        return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
    };
    return {at(0.25), at(0.75)};
}

double iqr(std::span<const double> samples) {
    const auto [q1, q3] = exact_quartiles(samples);
    return q3 - q1;
}

double excess_kurtosis(std::span<const double> samples) {
    if (samples.size() < 8) throw std::invalid_argument("excess_kurtosis: need >= 8 samples");
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : samples) {
        const double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    if (m2 == 0.0) throw std::invalid_argument("excess_kurtosis: zero variance");
    return m4 / (m2 * m2) - 3.0;
}

GaussianityReport gaussianity(const SampleBuffer& buffer) {
    GaussianityReport r;
    r.excess_kurtosis = excess_kurtosis(buffer);
    r.iqr = iqr(buffer);
    r.sigma_hat = r.iqr / 1.349;
    r.n = buffer.size();
    return r;
}

double upcrossing_rate(const SampleBuffer& buffer, double threshold) {
    if (!std::isfinite(threshold)) throw std::invalid_argument("upcrossing_rate: bad threshold");
    if (buffer.size() < 2) return 0.0;
    std::size_t count = 0;
    for (std::size_t k = 1; k < buffer.size(); ++k)
        if (buffer[k - 1] <= threshold && threshold < buffer[k]) ++count;
    return static_cast<double>(count) / static_cast<double>(buffer.size());
}

std::vector<double> psd_estimate(const SampleBuffer& buffer, std::size_t segment_len) {
    if (segment_len == 0 || (segment_len & (segment_len - 1)) != 0)
        throw std::invalid_argument("psd_estimate: segment_len must be a power of two");
    if (segment_len > buffer.size())
        throw std::invalid_argument("psd_estimate: segment_len exceeds buffer");

    std::vector<double> window(segment_len);
    double wpow = 0.0;
    for (std::size_t i = 0; i < segment_len; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * pi * (static_cast<double>(i) + 0.5) /
                                          static_cast<double>(segment_len)));
        wpow += window[i] * window[i];
    }

    const std::size_t hop = segment_len / 2;
    std::vector<double> psd(segment_len / 2 + 1, 0.0);
    std::vector<double> seg(segment_len);
    std::size_t n_segments = 0;
    for (std::size_t start = 0; start + segment_len <= buffer.size(); start += hop) {
        for (std::size_t i = 0; i < segment_len; ++i) seg[i] = buffer[start + i] * window[i];
        const auto spec = rfft(seg, segment_len);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            // one-sided: double interior bins so the bin sum gives mean power
            const double scale = (i == 0 || i == spec.size() - 1) ? 1.0 : 2.0;
            psd[i] += scale * std::norm(spec[i]);
        }
        ++n_segments;
    }
    const double norm =
        1.0 / (static_cast<double>(n_segments) * wpow * static_cast<double>(segment_len));
    for (double& v : psd) v *= norm;
    return psd;
}

}  // namespace aspm
