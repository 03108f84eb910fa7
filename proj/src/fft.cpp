#include "aspm/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace aspm {

namespace {

// FFTW's planner is not thread-safe; plans are cached per size under a lock
// and executed via the re-entrant fftw_execute_dft_* entry points.
std::mutex plan_mutex;

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

PlanPair& plans_for(std::size_t n) {
    static std::map<std::size_t, PlanPair> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> re(n);
    std::vector<fftw_complex> cx(n / 2 + 1);
    PlanPair p;
    // FFTW_UNALIGNED: plans are executed later on caller-owned arrays.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), re.data(), cx.data(), flags);
    p.inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), cx.data(), re.data(), flags);
    return cache.emplace(n, p).first->second;
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<std::complex<double>> rfft(const SampleBuffer& x, std::size_t n) {
    if ((n & (n - 1)) != 0 || n == 0)
        throw std::invalid_argument("rfft: length must be a power of two");
    std::vector<double> re(n, 0.0);
    std::memcpy(re.data(), x.data(), std::min(x.size(), n) * sizeof(double));
    std::vector<std::complex<double>> out(n / 2 + 1);

    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_plan plan = plans_for(n).fwd;
    fftw_execute_dft_r2c(plan, re.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

SampleBuffer irfft(const std::vector<std::complex<double>>& spectrum, std::size_t n) {
    if ((n & (n - 1)) != 0 || n == 0)
        throw std::invalid_argument("irfft: length must be a power of two");
    if (spectrum.size() != n / 2 + 1)
        throw std::invalid_argument("irfft: spectrum size mismatch");
    std::vector<std::complex<double>> cx(spectrum);  // c2r destroys its input
    SampleBuffer out(n);

    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_plan plan = plans_for(n).inv;
    fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(cx.data()), out.data());
    for (double& v : out) v /= static_cast<double>(n);
    return out;
}

SampleBuffer fft_convolve(const SampleBuffer& a, const SampleBuffer& b) {
    if (a.empty() || b.empty()) return {};
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(out_len);
    auto fa = rfft(a, n);
    const auto fb = rfft(b, n);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    SampleBuffer full = irfft(fa, n);
    full.resize(out_len);
    return full;
}

}  // namespace aspm
