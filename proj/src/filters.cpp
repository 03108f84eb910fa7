#include "aspm/filters.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "aspm/fft.hpp"
#include "aspm/rng.hpp"

namespace aspm {

using std::numbers::pi;

double FirFilter::energy() const {
    return std::inner_product(taps.begin(), taps.end(), taps.begin(), 0.0);
}

void FirFilter::validate() const {
    if (taps.empty()) throw std::invalid_argument("FirFilter: empty taps");
    for (double t : taps)
        if (!std::isfinite(t)) throw std::invalid_argument("FirFilter: non-finite tap");
    if (energy() <= 0.0) throw std::invalid_argument("FirFilter: zero energy");
}

BiquadAllpass BiquadAllpass::from_pole(double radius, double angle) {
    BiquadAllpass s;
    s.a1 = -2.0 * radius * std::cos(angle);
    s.a2 = radius * radius;
    return s;
}

FirFilter design_rrc(double beta, int n_s, int span) {
    if (beta <= 0.0 || beta > 1.0) throw std::invalid_argument("design_rrc: beta must be in (0,1]");
    if (n_s < 1 || span < 1) throw std::invalid_argument("design_rrc: n_s and span must be >= 1");
    const std::int64_t half2 = static_cast<std::int64_t>(span) * n_s;
    if (half2 % 2 != 0)
        throw std::invalid_argument("design_rrc: span*n_s must be even for odd-length support");
    const std::int64_t half = half2 / 2;

    FirFilter fir;
    fir.taps.resize(static_cast<std::size_t>(2 * half + 1));
    fir.delay = half;
    fir.label = "rrc";
    for (std::int64_t i = -half; i <= half; ++i) {
        const double t = static_cast<double>(i) / n_s;  // symbol-period units
        double v;
        if (std::abs(t) < 1e-12) {
            v = 1.0 + beta * (4.0 / pi - 1.0);
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-9) {
            v = (beta / std::sqrt(2.0)) *
                ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * beta)) +
                 (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * beta)));
        } else {
            v = (std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta))) /
                (pi * t * (1.0 - 16.0 * beta * beta * t * t));
        }
        fir.taps[static_cast<std::size_t>(i + half)] = v;
    }
    const double norm = 1.0 / std::sqrt(fir.energy());
    for (double& t : fir.taps) t *= norm;
    return fir;
}

FirFilter design_rc(double beta, int n_s, int span) {
    const FirFilter rrc = design_rrc(beta, n_s, span);
    FirFilter rc;
    rc.taps = convolve(rrc.taps, rrc.taps);
    rc.delay = 2 * rrc.delay;
    rc.label = "rc";
    const double peak = *std::max_element(rc.taps.begin(), rc.taps.end());
    for (double& t : rc.taps) t /= peak;
    return rc;
}

AllpassCascade random_allpass_cascade(int n_sections, double pole_radius_min,
                                      double pole_radius_max, std::uint64_t seed) {
    if (n_sections < 1) throw std::invalid_argument("random_allpass_cascade: n_sections must be >= 1");
    if (!(pole_radius_min > 0.0 && pole_radius_min <= pole_radius_max && pole_radius_max < 1.0))
        throw std::invalid_argument("random_allpass_cascade: radii must satisfy 0 < min <= max < 1");

    Rng rng(seed);
    AllpassCascade cascade;
    cascade.seed = seed;
    cascade.pole_radius_min = pole_radius_min;
    cascade.pole_radius_max = pole_radius_max;
    cascade.sections.reserve(static_cast<std::size_t>(n_sections));
    for (int i = 0; i < n_sections; ++i) {
        const double r = rng.uniform(pole_radius_min, pole_radius_max);
        double u;
        do {
            u = rng.uniform();
        } while (u == 0.0);
        cascade.sections.push_back(BiquadAllpass::from_pole(r, pi * u));
    }
    return cascade;
}

namespace {

struct CascadeState {
    std::vector<double> z1, z2;
    explicit CascadeState(std::size_t n) : z1(n, 0.0), z2(n, 0.0) {}
};

inline double cascade_step(const AllpassCascade& c, CascadeState& st, double x) {
    for (std::size_t s = 0; s < c.sections.size(); ++s) {
        const double a1 = c.sections[s].a1;
        const double a2 = c.sections[s].a2;
        const double y = a2 * x + st.z1[s];
        st.z1[s] = a1 * x - a1 * y + st.z2[s];
        st.z2[s] = x - a2 * y;
        x = y;
    }
    return x;
}

}  // namespace

SampleBuffer apply_cascade(const AllpassCascade& cascade, const SampleBuffer& buffer,
                           double tail_tol) {
    for (const BiquadAllpass& s : cascade.sections)
        if (!s.stable()) throw std::runtime_error("apply_cascade: unstable section");
    if (cascade.sections.empty()) return buffer;
    if (tail_tol <= 0.0) throw std::invalid_argument("apply_cascade: tail_tol must be > 0");

    CascadeState st(cascade.sections.size());
    SampleBuffer out;
    out.reserve(buffer.size() + 1024);
    double peak = 0.0;
    for (double x : buffer) {
        const double y = cascade_step(cascade, st, x);
        peak = std::max(peak, std::abs(y));
        out.push_back(y);
    }
    // Ring-down: feed zeros until a whole chunk stays below tail_tol * peak.
    constexpr std::size_t chunk = 256;
    constexpr std::size_t hard_cap = std::size_t{1} << 24;
    std::size_t fed = 0;
    for (;;) {
        double chunk_max = 0.0;
        for (std::size_t i = 0; i < chunk; ++i) {
            const double y = cascade_step(cascade, st, 0.0);
            peak = std::max(peak, std::abs(y));
            chunk_max = std::max(chunk_max, std::abs(y));
            out.push_back(y);
        }
        fed += chunk;
        if (chunk_max < tail_tol * peak) break;
        if (fed > hard_cap)
            throw std::runtime_error("apply_cascade: ring-down failed to decay below tolerance");
    }
    return out;
}

ShapingPair make_shaping_pair(const FirFilter& seed_filter, const AllpassCascade& cascade,
                              double truncation_tol) {
    seed_filter.validate();
    if (!(truncation_tol > 0.0 && truncation_tol <= 1e-2))
        throw std::invalid_argument("make_shaping_pair: truncation_tol must be in (0, 1e-2]");

    // Resolve the tail well below the truncation threshold so the rule below
    // governs the cut.
    const SampleBuffer resp = apply_cascade(cascade, seed_filter.taps, truncation_tol * 1e-2);

    double peak = 0.0, total_energy = 0.0;
    for (double v : resp) {
        peak = std::max(peak, std::abs(v));
        total_energy += v * v;
    }
    const double amp_floor = truncation_tol * peak;
    std::size_t cut_amp = 0;
    for (std::size_t i = 0; i < resp.size(); ++i)
        if (std::abs(resp[i]) >= amp_floor) cut_amp = i;
    const double energy_goal = (1.0 - truncation_tol * truncation_tol) * total_energy;
    double acc = 0.0;
    std::size_t cut_energy = 0;
    for (std::size_t i = 0; i < resp.size(); ++i) {
        acc += resp[i] * resp[i];
        if (acc >= energy_goal) {
            cut_energy = i;
            break;
        }
    }
    const std::size_t cut = std::max(cut_amp, cut_energy);

    ShapingPair pair;
    pair.truncation_tol = truncation_tol;
    pair.seed_filter = seed_filter;
    pair.descramble.taps.assign(resp.begin(), resp.begin() + static_cast<std::ptrdiff_t>(cut + 1));
    pair.spread.taps.assign(pair.descramble.taps.rbegin(), pair.descramble.taps.rend());
    pair.spread.label = "spread";
    pair.descramble.label = "descramble";
    const auto peak_it =
        std::max_element(pair.spread.taps.begin(), pair.spread.taps.end(),
                         [](double a, double b) { return std::abs(a) < std::abs(b); });
    pair.spread.delay = peak_it - pair.spread.taps.begin();
    pair.descramble.delay =
        static_cast<std::int64_t>(pair.descramble.taps.size()) - 1 - pair.spread.delay;
    return pair;
}

SampleBuffer convolve(const SampleBuffer& buffer, const SampleBuffer& taps) {
    if (buffer.empty() || taps.empty()) return {};
    const std::size_t n = buffer.size(), m = taps.size();
    if (std::min(n, m) > 64) return fft_convolve(buffer, taps);
    SampleBuffer out(n + m - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = buffer[i];
        if (x == 0.0) continue;
        for (std::size_t j = 0; j < m; ++j) out[i + j] += x * taps[j];
    }
    return out;
}

SampleBuffer convolve(const SampleBuffer& buffer, const FirFilter& fir) {
    fir.validate();
    return convolve(buffer, fir.taps);
}

double cascade_magnitude(const AllpassCascade& cascade, double freq) {
    const std::complex<double> z = std::polar(1.0, 2.0 * pi * freq);
    const std::complex<double> zi = 1.0 / z;
    double mag = 1.0;
    for (const BiquadAllpass& s : cascade.sections) {
        const std::complex<double> num = s.a2 + s.a1 * zi + zi * zi;
        const std::complex<double> den = 1.0 + s.a1 * zi + s.a2 * zi * zi;
        mag *= std::abs(num / den);
    }
    return mag;
}

FirFilter delta_filter() {
    FirFilter f;
    f.taps = {1.0};
    f.delay = 0;
    f.label = "delta";
    return f;
}

}  // namespace aspm
