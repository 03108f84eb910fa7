#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "aspm/common.hpp"
#include "aspm/filters.hpp"

namespace aspm {

struct CrestReport {
    double papr = 0.0;
    double papr_db = 0.0;
    std::int64_t begin = 0;  // half-open sample interval [begin, end)
    std::int64_t end = 0;
};

struct GaussianityReport {
    double excess_kurtosis = 0.0;
    double iqr = 0.0;
    double sigma_hat = 0.0;  // IQR / 1.349
    std::size_t n = 0;
};

// Peak-to-average power ratio over [begin, end).
CrestReport papr(const SampleBuffer& buffer, std::int64_t begin, std::int64_t end);
CrestReport papr(const SampleBuffer& buffer);

// TBP ratio TBP_f2 / TBP_f1 = PAPR_f1 / PAPR_f2 = max(f1^2)/max(f2^2); valid
// only for filters with matching spectral content (checked, 1% relative L2).
double tbp_ratio(const FirFilter& f1, const FirFilter& f2);

// Gabor time-bandwidth product 4*pi*sigma_t*sigma_f of a single pulse;
// meaningful for seed filters whose moments converge.
double tbp_gabor(const FirFilter& f);

// Order-statistic quartiles with linear interpolation ("type 7").
std::pair<double, double> exact_quartiles(std::span<const double> samples);
double iqr(std::span<const double> samples);

double excess_kurtosis(std::span<const double> samples);

GaussianityReport gaussianity(const SampleBuffer& buffer);

// Fraction of indices k with x[k-1] <= threshold < x[k].
double upcrossing_rate(const SampleBuffer& buffer, double threshold);

// Averaged periodogram (50% overlap, raised-cosine taper), one-sided;
// sum over bins approximates mean power. segment_len must be a power of two.
std::vector<double> psd_estimate(const SampleBuffer& buffer, std::size_t segment_len);

double mean_power(const SampleBuffer& buffer);

}  // namespace aspm
