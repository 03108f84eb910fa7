#pragma once

#include <cstdint>
#include <vector>

#include "aspm/common.hpp"

namespace aspm {

enum class SyncMode { MPA, MMA };

// Per-phase accumulator for periodic-train synchronization. One update per
// pulse period; accum[i] is the exponentially averaged power (MPA) or
// magnitude (MMA) at phase i.
struct SyncState {
    std::vector<double> accum;
    SyncMode mode = SyncMode::MPA;
    int m = 8;            // averaging depth, > 1
    std::int64_t j = 0;   // windows processed
    bool locked = false;  // true after 4*m windows

    // include_extra_point only affects MMA; the MPA window always holds
    // n_p + 1 samples so the endpoint phase is counted twice.
    bool mma_extra_point = false;

    SyncState(std::int64_t n_p, SyncMode mode, int m);

    std::int64_t n_p() const { return static_cast<std::int64_t>(accum.size()); }
};

// Folds the window ending at sample k_j into the accumulator. MPA: sum of
// x^2 over k_j - n_p <= k <= k_j per phase mod n_p. MMA: |x| over
// k_j - n_p < k <= k_j.
void sync_update(SyncState& state, const SampleBuffer& buffer, std::int64_t k_j);

// Argmax phase; ties break to the lowest index.
std::int64_t sync_argmax(const SyncState& state);

// k_{j+1} = i_max + (j+1) * n_p
std::int64_t next_sample_index(const SyncState& state, std::int64_t j);

struct LinkReport {
    double ber = 0.0;
    std::int64_t n_bits = 0;
    std::int64_t n_errors = 0;
    double snr_db_effective = 0.0;
    std::int64_t sync_offset_error = 0;
    double sigma_n = 0.0;
};

// Polarity detection at offset + j*n_p for j = 1..n_bits, compared to truth.
LinkReport detect_synchronous(const SampleBuffer& buffer, std::int64_t offset, std::int64_t n_p,
                              const std::vector<int>& truth);

// Closed-form error rate for antipodal polarity detection.
double ber_theory(double snr, double papr);

// erfc inverse, accurate to 1e-10 on (0, 2).
double erfc_inv(double y);

struct SnrLimit {
    double generic = 0.0;     // 2*[erfc_inv(2 ber)]^2 / papr
    double asymptotic = 0.0;  // 1.75*[erfc_inv(2 ber)]^2 * n_s / n_p
};

// Minimal linear SNR for the target BER at pulse spacing n_p (in samples)
// and n_s samples per symbol.
SnrLimit snr_limit_sync(double n_p, double n_s, double ber_target);

// Asynchronous (pulse-counting) SNR limit at false-positive and
// false-negative rates eps_fp, eps_fn.
double snr_limit_async(double mean_n_p, double n_s, double eps_fp, double eps_fn);

// bits/sample for bandwidth in cycles/sample.
double shannon_limit(double snr, double bandwidth);

}  // namespace aspm
