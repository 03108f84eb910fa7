#include "aspm/inf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aspm {

QtfState::QtfState(double q_, double mu_, double eps_) : q(q_), mu(mu_), eps(eps_) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("QtfState: q must be in (0,1)");
    if (!(mu > 0.0)) throw std::invalid_argument("QtfState: mu must be > 0");
    if (eps < 0.0) throw std::invalid_argument("QtfState: eps must be >= 0");
}

namespace {

inline double comparator(double u, double eps) {
    if (eps == 0.0) return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
    return std::clamp(u / eps, -1.0, 1.0);
}

}  // namespace

void qtf_process(QtfState& state, const SampleBuffer& chunk, SampleBuffer& out) {
    out.reserve(out.size() + chunk.size());
    const double bias = 2.0 * state.q - 1.0;
    for (double x : chunk) {
        if (!state.initialized) {
            state.value = x;
            state.initialized = true;
        }
        out.push_back(state.value);
        state.value += state.mu * (comparator(x - state.value, state.eps) + bias);
    }
}

SampleBuffer qtf_run(const SampleBuffer& buffer, double q, double mu, double eps) {
    QtfState state(q, mu, eps);
    SampleBuffer out;
    qtf_process(state, buffer, out);
    return out;
}

FenceTrack tukey_fences(const SampleBuffer& q1_track, const SampleBuffer& q3_track, double beta) {
    if (q1_track.size() != q3_track.size())
        throw std::invalid_argument("tukey_fences: track length mismatch");
    FenceTrack f;
    f.beta = beta;
    f.lower.resize(q1_track.size());
    f.upper.resize(q1_track.size());
    for (std::size_t k = 0; k < q1_track.size(); ++k) {
        double q1 = q1_track[k], q3 = q3_track[k];
        if (q3 < q1) {
            q3 = q1;
            ++f.violations;
        }
        const double w = beta * (q3 - q1);
        f.lower[k] = q1 - w;
        f.upper[k] = q3 + w;
    }
    return f;
}

FenceTrack constant_fences(double q1, double q3, double beta, std::size_t n) {
    if (q3 < q1) throw std::invalid_argument("constant_fences: q3 < q1");
    FenceTrack f;
    f.beta = beta;
    f.lower.assign(n, q1 - beta * (q3 - q1));
    f.upper.assign(n, q3 + beta * (q3 - q1));
    return f;
}

double beta_for_fp(double eps_fp, double rate, double rate_max) {
    if (!(eps_fp > 0.0 && eps_fp < 1.0)) throw std::invalid_argument("beta_for_fp: bad eps_fp");
    if (!(rate > 0.0 && rate < rate_max)) throw std::invalid_argument("beta_for_fp: need 0 < R < R_max");
    return 1.05 * std::sqrt(std::log(rate_max / (eps_fp * rate))) - 0.5;
}

std::pair<SampleBuffer, SampleBuffer> inf_filter(const SampleBuffer& buffer,
                                                 const FenceTrack& fences) {
    if (fences.lower.size() < buffer.size())
        throw std::invalid_argument("inf_filter: fences shorter than buffer");
    SampleBuffer prime(buffer.size()), aux(buffer.size());
    for (std::size_t k = 0; k < buffer.size(); ++k) {
        const double x = buffer[k];
        if (x >= fences.lower[k] && x <= fences.upper[k]) {
            prime[k] = x;
            aux[k] = 0.0;
        } else {
            // split against the fence midrange so that prime + aux == x holds
            // exactly in doubles (refine until the subtraction is exact)
            double p = 0.5 * (fences.lower[k] + fences.upper[k]);
            double a = x - p;
            for (int it = 0; it < 10 && p + a != x; ++it) {
                p = x - a;
                a = x - p;
            }
            if (p + a != x) {
                p = 0.0;
                a = x;
            }
            prime[k] = p;
            aux[k] = a;
        }
    }
    return {std::move(prime), std::move(aux)};
}

SparseTrain pulse_count(const SampleBuffer& buffer, const FenceTrack& fences) {
    if (fences.lower.size() < buffer.size())
        throw std::invalid_argument("pulse_count: fences shorter than buffer");
    SparseTrain train;
    train.length = static_cast<std::int64_t>(buffer.size());
    for (std::size_t k = 1; k + 1 < buffer.size(); ++k) {
        const double x = buffer[k];
        const bool peak_up = x > fences.upper[k] && x > buffer[k - 1] && x >= buffer[k + 1];
        const bool peak_dn = x < fences.lower[k] && x < buffer[k - 1] && x <= buffer[k + 1];
        if (peak_up || peak_dn)
            train.pulses.push_back({static_cast<std::int64_t>(k), x});
    }
    return train;
}

double fn_rate_theory(double a_over_sigma, double eps_fp, double rate, double rate_max) {
    if (a_over_sigma <= 0.0) throw std::invalid_argument("fn_rate_theory: bad amplitude");
    if (!(eps_fp > 0.0 && rate > 0.0 && rate < rate_max))
        throw std::invalid_argument("fn_rate_theory: bad rates");
    const double arg = a_over_sigma / std::sqrt(2.0) - std::sqrt(std::log(rate_max / (eps_fp * rate)));
    return 0.5 * std::erfc(arg);
}

}  // namespace aspm
