#include "aspm/receiver.hpp"

#include <cmath>
#include <stdexcept>

namespace aspm {

SyncState::SyncState(std::int64_t n_p, SyncMode mode_, int m_) {
    if (n_p < 1) throw std::invalid_argument("SyncState: n_p must be >= 1");
    if (m_ < 2) throw std::invalid_argument("SyncState: m must be > 1");
    accum.assign(static_cast<std::size_t>(n_p), 0.0);
    mode = mode_;
    m = m_;
}

void sync_update(SyncState& state, const SampleBuffer& buffer, std::int64_t k_j) {
    const std::int64_t n_p = state.n_p();
    const std::int64_t lo =
        (state.mode == SyncMode::MPA || state.mma_extra_point) ? k_j - n_p : k_j - n_p + 1;
    if (lo < 0 || k_j >= static_cast<std::int64_t>(buffer.size()))
        throw std::invalid_argument("sync_update: window exceeds buffer");

    std::vector<double> window(static_cast<std::size_t>(n_p), 0.0);
    for (std::int64_t k = lo; k <= k_j; ++k) {
        const double x = buffer[static_cast<std::size_t>(k)];
        const double v = (state.mode == SyncMode::MPA) ? x * x : std::abs(x);
        window[static_cast<std::size_t>(((k % n_p) + n_p) % n_p)] += v;
    }
    const double keep = static_cast<double>(state.m - 1) / state.m;
    const double take = 1.0 / state.m;
    for (std::int64_t i = 0; i < n_p; ++i)
        state.accum[static_cast<std::size_t>(i)] =
            keep * state.accum[static_cast<std::size_t>(i)] + take * window[static_cast<std::size_t>(i)];
    ++state.j;
    if (state.j >= 4 * static_cast<std::int64_t>(state.m)) state.locked = true;
}

std::int64_t sync_argmax(const SyncState& state) {
    std::int64_t best = 0;
    double best_v = state.accum[0];
    for (std::int64_t i = 1; i < state.n_p(); ++i) {
        const double v = state.accum[static_cast<std::size_t>(i)];
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    return best;
}

std::int64_t next_sample_index(const SyncState& state, std::int64_t j) {
    return sync_argmax(state) + (j + 1) * state.n_p();
}

LinkReport detect_synchronous(const SampleBuffer& buffer, std::int64_t offset, std::int64_t n_p,
                              const std::vector<int>& truth) {
    LinkReport report;
    report.n_bits = static_cast<std::int64_t>(truth.size());
    for (std::size_t j = 0; j < truth.size(); ++j) {
        const std::int64_t k = offset + static_cast<std::int64_t>(j + 1) * n_p;
        if (k < 0 || k >= static_cast<std::int64_t>(buffer.size()))
            throw std::invalid_argument("detect_synchronous: sample index out of range");
        const int bit = buffer[static_cast<std::size_t>(k)] < 0.0 ? 1 : 0;
        if (bit != truth[j]) ++report.n_errors;
    }
    report.ber = truth.empty() ? 0.0
                               : static_cast<double>(report.n_errors) /
                                     static_cast<double>(report.n_bits);
    return report;
}

double ber_theory(double snr, double papr) {
    if (snr <= 0.0 || papr <= 0.0) throw std::invalid_argument("ber_theory: nonpositive argument");
    return 0.5 * std::erfc(std::sqrt(0.5 * snr * papr));
}

double erfc_inv(double y) {
    if (!(y > 0.0 && y < 2.0)) throw std::invalid_argument("erfc_inv: y must be in (0,2)");
    if (y == 1.0) return 0.0;
    // bracket, then Newton with bisection fallback
    double lo = -6.0, hi = 28.0;  // erfc(28) ~ 1e-342, erfc(-6) ~ 2
    double x = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double f = std::erfc(x) - y;
        if (f > 0.0)
            lo = x;
        else
            hi = x;
        const double dfdx = -2.0 / std::sqrt(std::acos(-1.0)) * std::exp(-x * x);
        double step = f / dfdx;
        double next = x - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-15 * std::max(1.0, std::abs(x))) return next;
        x = next;
    }
    return x;
}

SnrLimit snr_limit_sync(double n_p, double n_s, double ber_target) {
    if (!(ber_target > 0.0 && ber_target < 0.5))
        throw std::invalid_argument("snr_limit_sync: ber_target must be in (0, 1/2)");
    if (n_p <= 0.0 || n_s <= 0.0) throw std::invalid_argument("snr_limit_sync: bad geometry");
    const double e = erfc_inv(2.0 * ber_target);
    SnrLimit lim;
    lim.generic = 2.0 * e * e / (1.143 * n_p / n_s);
    lim.asymptotic = 1.75 * e * e * n_s / n_p;
    return lim;
}

double snr_limit_async(double mean_n_p, double n_s, double eps_fp, double eps_fn) {
    if (!(eps_fp > 0.0 && eps_fp < 0.5 && eps_fn > 0.0 && eps_fn < 0.5))
        throw std::invalid_argument("snr_limit_async: rates must be in (0, 1/2)");
    if (mean_n_p <= 0.0 || n_s <= 0.0) throw std::invalid_argument("snr_limit_async: bad geometry");
    const double a = erfc_inv(2.0 * eps_fn) + std::sqrt(std::log(mean_n_p / (3.5 * eps_fp * n_s)));
    return 1.75 * a * a * n_s / mean_n_p;
}

double shannon_limit(double snr, double bandwidth) {
    if (snr <= -1.0) throw std::invalid_argument("shannon_limit: snr must exceed -1");
    return bandwidth * std::log2(1.0 + snr);
}

}  // namespace aspm
