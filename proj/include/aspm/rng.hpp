#pragma once

#include <cstdint>
#include <string_view>

namespace aspm {

// Deterministic, platform-independent PRNG. All stochastic operations in the
// library draw from this generator so that a fixed 64-bit seed reproduces
// bit-identical results on any build.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform in [0, 1).
    double uniform();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Standard normal via the Marsaglia polar method.
    double normal();

    // Random sign, +1 or -1.
    double sign();

    // min_gap plus a geometric tail with mean (mean_gap - min_gap).
    std::int64_t shifted_geometric(double mean_gap, std::int64_t min_gap);

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// 64-bit FNV-1a, used to fold component ids into seed streams.
std::uint64_t fnv1a64(std::string_view s);

// Documented master-seed splitting rule: the per-component stream seed is
// splitmix64(master ^ fnv1a64(component_id) ^ index).
std::uint64_t derive_seed(std::uint64_t master, std::string_view component_id,
                          std::uint64_t index = 0);

}  // namespace aspm
