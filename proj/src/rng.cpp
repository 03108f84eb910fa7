#include "aspm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace aspm {

namespace {
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
    // 53 random bits into [0, 1).
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double Rng::sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

std::int64_t Rng::shifted_geometric(double mean_gap, std::int64_t min_gap) {
    if (mean_gap < static_cast<double>(min_gap))
        throw std::invalid_argument("shifted_geometric: mean_gap < min_gap");
    const double tail = mean_gap - static_cast<double>(min_gap);
    if (tail <= 0.0) return min_gap;
    const double p = 1.0 / (tail + 1.0);
    // Inversion: floor(log(1-u) / log(1-p)) has mean (1-p)/p = tail.
    const double u = uniform();
    const double m = std::floor(std::log1p(-u) / std::log1p(-p));
    return min_gap + static_cast<std::int64_t>(m);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view component_id,
                          std::uint64_t index) {
    std::uint64_t x = master ^ fnv1a64(component_id) ^ index;
    return splitmix64(x);
}

}  // namespace aspm
