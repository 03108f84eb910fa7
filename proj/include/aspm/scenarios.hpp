#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aspm/channel.hpp"
#include "aspm/common.hpp"
#include "aspm/filters.hpp"
#include "aspm/pulsegen.hpp"

namespace aspm {

// Scrambling key: everything needed to regenerate a ShapingPair bit-exactly.
struct ShapingKey {
    std::uint64_t seed = 1;
    int n_sections = 21;
    double pole_radius_min = 0.85;
    double pole_radius_max = 0.98;
    double beta = 0.5;  // seed RRC roll-off
    int n_s = 2;
    int span = 16;
    double truncation_tol = 1e-4;
};

ShapingPair build_pair(const ShapingKey& key);

struct ScenarioReport {
    std::map<std::string, double> metrics;
    std::map<std::string, SampleBuffer> taps;  // filled when dump_taps is set

    double at(const std::string& name) const;
};

struct BasicLinkConfig {
    std::int64_t n_bits = 1000;
    std::int64_t n_p = 32;
    ShapingKey key;
    double snr_db = 0.0;
    bool noiseless = false;
    SnrReference reference = SnrReference::MatchedOutput;
    bool use_inf = false;
    double inf_beta = 3.0;
    int sync_m = 8;
    bool ideal_sync = true;
    std::uint64_t master_seed = 1;
    bool dump_taps = false;
};

// encode -> shape -> AWGN -> [INF] -> descramble -> sync -> detect.
// Metrics: ber, n_errors, sigma_n, tx_papr, tx_kurtosis, sync_offset_error.
ScenarioReport run_basic_link(const BasicLinkConfig& config);

struct StegoConfig {
    int k_components = 6;
    std::int64_t n_bits = 400;
    std::int64_t n_p = 32;
    ShapingKey base_key;  // component i uses seed base_key.seed + i
    double component_power = 1.0;
    double noise_power = 0.0;
    std::uint64_t master_seed = 1;
};

// Equal-power K-component mixture with per-key descrambling.
// Metrics: snr_db_component_<i>, ber_component_<i>, mix_kurtosis.
ScenarioReport run_stego_mixture(const StegoConfig& config);

struct LayeredCoverConfig {
    std::int64_t n_bits = 2000;      // payload bits
    std::int64_t cover_n_p = 64;
    std::int64_t payload_n_p = 8;
    double cover_payload_db = 20.0;  // cover power over payload power
    double noise_payload_db = -4.0;  // noise power over payload power
    ShapingKey cover_key;
    ShapingKey payload_key;
    double eps_fp = 1e-3;
    std::uint64_t master_seed = 1;
};

// Strong cover train (key 1) over a weak payload (key 2): the receiver
// counts the cover pulses after key-1 descrambling, rebuilds and subtracts
// the cover, then detects the payload with key 2.
// Metrics: ber_with_inf, ber_without_inf, ber_baseline, cover_count_ratio.
ScenarioReport run_layered_cover(const LayeredCoverConfig& config);

struct JammingConfig {
    int n_carriers = 16;
    int n_blocks = 64;
    std::int64_t jam_n_p = 64;
    double jam_ofdm_db = 15.0;  // jammer power over OFDM power
    ShapingKey ofdm_key;       // g-hat, applied to the OFDM signal only
    ShapingKey jam_key;        // h-hat, applied to the whole mix
    double eps_fp = 1e-3;
    std::uint64_t master_seed = 1;
};

// OFDM shaped by g-hat then h-hat, jammer train shaped by h-hat; receiver
// descrambles h, splits with the nonlinear filter, then recovers the OFDM
// symbols from the prime path and the jammer train from the aux path.
// Metrics: symbol_error_with_inf, symbol_error_without_inf, evm_with_inf,
// jam_recovered_ratio, mix_kurtosis.
ScenarioReport run_friendly_jamming(const JammingConfig& config);

// Real baseband OFDM: n_blocks blocks of 4*n_carriers samples, antipodal
// symbols on carriers 1..n_carriers, unit mean power. Peak PAPR 2*n_carriers
// when all symbols in a block coincide.
SampleBuffer gen_ofdm(int n_carriers, int n_blocks, std::uint64_t seed);

// One 4*N-sample block with the given ±1 symbols on carriers 1..N.
SampleBuffer ofdm_block(const std::vector<double>& symbols);

// Symbol decisions for gen_ofdm-format signals starting at sample `offset`;
// returns one ±1 per (block, carrier), row-major.
std::vector<int> ofdm_demod(const SampleBuffer& buffer, std::int64_t offset, int n_carriers,
                            int n_blocks);

std::vector<int> random_bits(std::int64_t n, std::uint64_t seed);

}  // namespace aspm
