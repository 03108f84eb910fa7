#include "aspm/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aspm/inf.hpp"
#include "aspm/metrics.hpp"
#include "aspm/receiver.hpp"
#include "aspm/rng.hpp"

namespace aspm {

using std::numbers::pi;

ShapingPair build_pair(const ShapingKey& key) {
    const FirFilter seed = design_rrc(key.beta, key.n_s, key.span);
    const AllpassCascade cascade = random_allpass_cascade(key.n_sections, key.pole_radius_min,
                                                          key.pole_radius_max, key.seed);
    return make_shaping_pair(seed, cascade, key.truncation_tol);
}

double ScenarioReport::at(const std::string& name) const {
    const auto it = metrics.find(name);
    if (it == metrics.end()) throw std::out_of_range("ScenarioReport: no metric " + name);
    return it->second;
}

std::vector<int> random_bits(std::int64_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> bits(static_cast<std::size_t>(n));
    for (int& b : bits) b = static_cast<int>(rng.next_u64() & 1u);
    return bits;
}

namespace {

SampleBuffer gaussian_buffer(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    SampleBuffer out(n);
    for (double& v : out) v = rng.normal();
    return out;
}

// R_max for an RRC-filtered noise floor with n_s samples per symbol.
double crossing_rate_max(double n_s) { return 1.0 / (2.0 * n_s * std::sqrt(3.0)); }

}  // namespace

ScenarioReport run_basic_link(const BasicLinkConfig& config) {
    const ShapingPair pair = build_pair(config.key);
    const std::int64_t delay = static_cast<std::int64_t>(pair.spread.taps.size()) - 1;

    const auto bits = random_bits(config.n_bits, derive_seed(config.master_seed, "bits"));
    const SparseTrain train = encode_equidistant(bits, config.n_p);
    const SampleBuffer tx = convolve(render(train), pair.spread);

    ScenarioReport report;
    report.metrics["tx_papr"] = papr(tx).papr;
    report.metrics["tx_kurtosis"] = excess_kurtosis(tx);

    ChannelConfig channel;
    channel.snr_db = config.snr_db;
    channel.seed = derive_seed(config.master_seed, "noise");
    channel.reference = config.reference;
    channel.descramble = &pair.descramble;
    channel.noiseless = config.noiseless;
    auto [noisy, sigma] = awgn(tx, channel);
    report.metrics["sigma_n"] = sigma;

    if (config.use_inf) {
        const auto [q1, q3] = exact_quartiles(noisy);
        const auto fences = constant_fences(q1, q3, config.inf_beta, noisy.size());
        noisy = inf_filter(noisy, fences).first;
    }
    const SampleBuffer rx = convolve(noisy, pair.descramble);

    std::int64_t offset = delay;
    if (!config.ideal_sync) {
        SyncState sync(config.n_p, SyncMode::MPA, config.sync_m);
        for (std::int64_t j = 1; j <= config.n_bits; ++j)
            sync_update(sync, rx, delay + (j + 1) * config.n_p);
        const std::int64_t i_max = sync_argmax(sync);
        // resolve the phase to the admissible offset nearest the filter delay
        offset = i_max + config.n_p * ((delay - i_max + config.n_p / 2) / config.n_p);
        report.metrics["sync_locked"] = sync.locked ? 1.0 : 0.0;
    }
    report.metrics["sync_offset_error"] = static_cast<double>(offset - delay);

    const LinkReport link = detect_synchronous(rx, offset, config.n_p, bits);
    report.metrics["ber"] = link.ber;
    report.metrics["n_errors"] = static_cast<double>(link.n_errors);
    report.metrics["n_bits"] = static_cast<double>(link.n_bits);

    if (config.dump_taps) {
        report.taps["transmit"] = tx;
        report.taps["channel"] = noisy;
        report.taps["matched"] = rx;
    }
    return report;
}

ScenarioReport run_stego_mixture(const StegoConfig& config) {
    if (config.k_components < 1) throw std::invalid_argument("run_stego_mixture: K must be >= 1");
    const int k = config.k_components;

    std::vector<ShapingPair> pairs;
    std::vector<std::vector<int>> bits(static_cast<std::size_t>(k));
    std::vector<SampleBuffer> shaped(static_cast<std::size_t>(k));
    std::vector<MixComponent> components;
    for (int i = 0; i < k; ++i) {
        ShapingKey key = config.base_key;
        key.seed = config.base_key.seed + static_cast<std::uint64_t>(i);
        pairs.push_back(build_pair(key));
        bits[i] = random_bits(config.n_bits, derive_seed(config.master_seed, "bits", i));
        shaped[i] = convolve(render(encode_equidistant(bits[i], config.n_p)), pairs[i].spread);
        components.push_back({shaped[i], config.component_power});
    }
    std::size_t frame = 0;
    for (const auto& s : shaped) frame = std::max(frame, s.size());
    if (config.noise_power > 0.0)
        components.push_back(
            {gaussian_buffer(frame, derive_seed(config.master_seed, "noise")), config.noise_power});

    const SampleBuffer mixture = mix(components);

    ScenarioReport report;
    report.metrics["mix_kurtosis"] = excess_kurtosis(mixture);
    for (int i = 0; i < k; ++i) {
        const SampleBuffer y = convolve(mixture, pairs[i].descramble);
        const double scale = std::sqrt(config.component_power / mean_power(shaped[i]));
        SampleBuffer s = convolve(shaped[i], pairs[i].descramble);
        for (double& v : s) v *= scale;
        double ps = 0.0, pr = 0.0;
        for (std::size_t n = 0; n < y.size(); ++n) {
            const double sv = n < s.size() ? s[n] : 0.0;
            ps += sv * sv;
            pr += (y[n] - sv) * (y[n] - sv);
        }
        const std::string tag = std::to_string(i);
        report.metrics["snr_db_component_" + tag] =
            pr > 0.0 ? 10.0 * std::log10(ps / pr) : 1e9;
        const std::int64_t delay = static_cast<std::int64_t>(pairs[i].spread.taps.size()) - 1;
        report.metrics["ber_component_" + tag] =
            detect_synchronous(y, delay, config.n_p, bits[i]).ber;
    }
    return report;
}

ScenarioReport run_layered_cover(const LayeredCoverConfig& config) {
    const ShapingPair cover_pair = build_pair(config.cover_key);
    const ShapingPair payload_pair = build_pair(config.payload_key);
    const std::int64_t d1 = static_cast<std::int64_t>(cover_pair.spread.taps.size()) - 1;
    const std::int64_t d2 = static_cast<std::int64_t>(payload_pair.spread.taps.size()) - 1;

    const auto payload_bits = random_bits(config.n_bits, derive_seed(config.master_seed, "payload"));
    const SparseTrain payload_train = encode_equidistant(payload_bits, config.payload_n_p);
    const SampleBuffer payload_tx = convolve(render(payload_train), payload_pair.spread);

    const std::int64_t n_cover = payload_train.length / config.cover_n_p - 1;
    if (n_cover < 1) throw std::invalid_argument("run_layered_cover: frame too short for cover");
    const auto cover_bits =
        random_bits(n_cover, derive_seed(config.master_seed, "cover"));
    const SparseTrain cover_train = encode_equidistant(cover_bits, config.cover_n_p);
    const SampleBuffer cover_tx = convolve(render(cover_train), cover_pair.spread);

    const double p_cover = std::pow(10.0, config.cover_payload_db / 10.0);
    const double p_noise = std::pow(10.0, config.noise_payload_db / 10.0);
    const std::size_t frame = std::max(cover_tx.size(), payload_tx.size());
    const SampleBuffer noise = gaussian_buffer(frame, derive_seed(config.master_seed, "noise"));

    const SampleBuffer mixture =
        mix({{cover_tx, p_cover}, {payload_tx, 1.0}, {noise, p_noise}});
    const SampleBuffer baseline_rx =
        convolve(mix({{payload_tx, 1.0}, {noise, p_noise}}), payload_pair.descramble);

    ScenarioReport report;
    report.metrics["ber_baseline"] =
        detect_synchronous(baseline_rx, d2, config.payload_n_p, payload_bits).ber;
    report.metrics["ber_without_inf"] =
        detect_synchronous(convolve(mixture, payload_pair.descramble), d2, config.payload_n_p,
                           payload_bits)
            .ber;

    // cover removal: descramble with key 1, count protruding matched peaks,
    // rebuild the cover waveform from the counted train, subtract
    const SampleBuffer y1 = convolve(mixture, cover_pair.descramble);
    const auto [q1, q3] = exact_quartiles(y1);
    const double beta = beta_for_fp(config.eps_fp, 1.0 / static_cast<double>(config.cover_n_p),
                                    crossing_rate_max(config.cover_key.n_s));
    const FenceTrack fences = constant_fences(q1, q3, beta, y1.size());
    const SparseTrain counted = pulse_count(y1, fences);

    // The matched pulse shape protrudes past the fences at its first
    // sidelobes too; keep only the strongest extremum per guard window.
    std::vector<Pulse> merged;
    const std::int64_t guard = 4 * config.cover_key.n_s;
    for (const Pulse& p : counted.pulses) {
        if (!merged.empty() && p.index - merged.back().index <= guard) {
            if (std::abs(p.amplitude) > std::abs(merged.back().amplitude)) merged.back() = p;
        } else {
            merged.push_back(p);
        }
    }

    SparseTrain rebuilt;
    const double matched_gain = cover_pair.spread.energy();
    for (const Pulse& p : merged)
        if (p.index >= d1)
            rebuilt.pulses.push_back({p.index - d1, p.amplitude / matched_gain});
    rebuilt.length = static_cast<std::int64_t>(mixture.size());
    report.metrics["cover_count_ratio"] =
        static_cast<double>(rebuilt.pulses.size()) / static_cast<double>(n_cover);

    SampleBuffer cleaned = mixture;
    if (!rebuilt.pulses.empty()) {
        const SampleBuffer estimate = convolve(render(rebuilt), cover_pair.spread);
        for (std::size_t n = 0; n < cleaned.size() && n < estimate.size(); ++n)
            cleaned[n] -= estimate[n];
    }
    report.metrics["ber_with_inf"] =
        detect_synchronous(convolve(cleaned, payload_pair.descramble), d2, config.payload_n_p,
                           payload_bits)
            .ber;
    return report;
}

namespace {

// raw carrier correlations for one gen_ofdm-format signal
std::vector<double> ofdm_correlate(const SampleBuffer& buffer, std::int64_t offset,
                                   int n_carriers, int n_blocks) {
    const int block_len = 4 * n_carriers;
    std::vector<double> corr(static_cast<std::size_t>(n_carriers) * n_blocks, 0.0);
    for (int b = 0; b < n_blocks; ++b) {
        for (int m = 1; m <= n_carriers; ++m) {
            double acc = 0.0;
            for (int k = 0; k < block_len; ++k) {
                const std::int64_t idx = offset + static_cast<std::int64_t>(b) * block_len + k;
                if (idx < 0 || idx >= static_cast<std::int64_t>(buffer.size()))
                    throw std::invalid_argument("ofdm_demod: block exceeds buffer");
                acc += buffer[static_cast<std::size_t>(idx)] *
                       std::cos(2.0 * pi * m * k / static_cast<double>(block_len));
            }
            corr[static_cast<std::size_t>(b) * n_carriers + (m - 1)] = 2.0 * acc / block_len;
        }
    }
    return corr;
}

}  // namespace

SampleBuffer ofdm_block(const std::vector<double>& symbols) {
    const int n_carriers = static_cast<int>(symbols.size());
    if (n_carriers < 2) throw std::invalid_argument("ofdm_block: need >= 2 carriers");
    const int block_len = 4 * n_carriers;
    const double scale = std::sqrt(2.0 / n_carriers);
    SampleBuffer out(static_cast<std::size_t>(block_len), 0.0);
    for (int k = 0; k < block_len; ++k) {
        double acc = 0.0;
        for (int m = 1; m <= n_carriers; ++m)
            acc += symbols[static_cast<std::size_t>(m - 1)] *
                   std::cos(2.0 * pi * m * k / static_cast<double>(block_len));
        out[static_cast<std::size_t>(k)] = scale * acc;
    }
    return out;
}

SampleBuffer gen_ofdm(int n_carriers, int n_blocks, std::uint64_t seed) {
    if (n_carriers < 2) throw std::invalid_argument("gen_ofdm: need >= 2 carriers");
    if (n_blocks < 1) throw std::invalid_argument("gen_ofdm: need >= 1 block");
    Rng rng(seed);
    const int block_len = 4 * n_carriers;
    SampleBuffer out;
    out.reserve(static_cast<std::size_t>(n_blocks) * block_len);
    std::vector<double> symbols(static_cast<std::size_t>(n_carriers));
    for (int b = 0; b < n_blocks; ++b) {
        for (double& s : symbols) s = rng.sign();
        const SampleBuffer block = ofdm_block(symbols);
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

std::vector<int> ofdm_demod(const SampleBuffer& buffer, std::int64_t offset, int n_carriers,
                            int n_blocks) {
    const auto corr = ofdm_correlate(buffer, offset, n_carriers, n_blocks);
    std::vector<int> symbols(corr.size());
    for (std::size_t i = 0; i < corr.size(); ++i) symbols[i] = corr[i] < 0.0 ? -1 : 1;
    return symbols;
}

ScenarioReport run_friendly_jamming(const JammingConfig& config) {
    const ShapingPair pair_g = build_pair(config.ofdm_key);
    const ShapingPair pair_h = build_pair(config.jam_key);
    const std::int64_t dg = static_cast<std::int64_t>(pair_g.spread.taps.size()) - 1;
    const std::int64_t dh = static_cast<std::int64_t>(pair_h.spread.taps.size()) - 1;

    const SampleBuffer ofdm =
        gen_ofdm(config.n_carriers, config.n_blocks, derive_seed(config.master_seed, "ofdm"));
    const std::vector<int> truth =
        ofdm_demod(ofdm, 0, config.n_carriers, config.n_blocks);  // noise-free reference symbols
    const SampleBuffer ofdm_tx = convolve(convolve(ofdm, pair_g.spread), pair_h.spread);

    const std::int64_t n_jam = static_cast<std::int64_t>(ofdm.size()) / config.jam_n_p - 1;
    if (n_jam < 1) throw std::invalid_argument("run_friendly_jamming: frame too short for jammer");
    const auto jam_bits = random_bits(n_jam, derive_seed(config.master_seed, "jam"));
    const SparseTrain jam_train = encode_equidistant(jam_bits, config.jam_n_p);
    const SampleBuffer jam_tx = convolve(render(jam_train), pair_h.spread);

    const double p_jam = std::pow(10.0, config.jam_ofdm_db / 10.0);
    const SampleBuffer mixture = mix({{ofdm_tx, 1.0}, {jam_tx, p_jam}});

    ScenarioReport report;
    report.metrics["mix_kurtosis"] = excess_kurtosis(mixture);

    const SampleBuffer rx1 = convolve(mixture, pair_h.descramble);
    const auto [q1, q3] = exact_quartiles(rx1);
    const double beta = beta_for_fp(config.eps_fp, 1.0 / static_cast<double>(config.jam_n_p),
                                    crossing_rate_max(config.jam_key.n_s));
    const FenceTrack fences = constant_fences(q1, q3, beta, rx1.size());
    const auto [prime, aux] = inf_filter(rx1, fences);

    auto symbol_errors = [&](const SampleBuffer& path) {
        const SampleBuffer y = convolve(path, pair_g.descramble);
        const auto sym = ofdm_demod(y, dg + dh, config.n_carriers, config.n_blocks);
        std::size_t err = 0;
        for (std::size_t i = 0; i < sym.size(); ++i)
            if (sym[i] != truth[i]) ++err;
        return static_cast<double>(err) / static_cast<double>(sym.size());
    };
    report.metrics["symbol_error_with_inf"] = symbol_errors(prime);
    report.metrics["symbol_error_without_inf"] = symbol_errors(rx1);

    {
        const SampleBuffer y = convolve(prime, pair_g.descramble);
        const auto corr =
            ofdm_correlate(y, dg + dh, config.n_carriers, config.n_blocks);
        // per-carrier complex gain folded out with the known symbols
        std::vector<double> gain(static_cast<std::size_t>(config.n_carriers), 0.0);
        for (int b = 0; b < config.n_blocks; ++b)
            for (int m = 0; m < config.n_carriers; ++m)
                gain[static_cast<std::size_t>(m)] +=
                    corr[static_cast<std::size_t>(b) * config.n_carriers + m] *
                    truth[static_cast<std::size_t>(b) * config.n_carriers + m];
        for (double& g : gain) g /= config.n_blocks;
        double num = 0.0, den = 0.0;
        for (int b = 0; b < config.n_blocks; ++b)
            for (int m = 0; m < config.n_carriers; ++m) {
                const double ideal = gain[static_cast<std::size_t>(m)] *
                                     truth[static_cast<std::size_t>(b) * config.n_carriers + m];
                const double d = corr[static_cast<std::size_t>(b) * config.n_carriers + m] - ideal;
                num += d * d;
                den += ideal * ideal;
            }
        report.metrics["evm_with_inf"] = den > 0.0 ? std::sqrt(num / den) : 1e9;
    }

    // jammer recovery from the protruding peaks
    const SparseTrain counted = pulse_count(rx1, fences);
    std::size_t hits = 0;
    for (const Pulse& truth_pulse : jam_train.pulses) {
        const std::int64_t expect = truth_pulse.index + dh;
        for (const Pulse& c : counted.pulses)
            if (std::llabs(c.index - expect) <= 1 &&
                (c.amplitude > 0) == (truth_pulse.amplitude > 0)) {
                ++hits;
                break;
            }
    }
    report.metrics["jam_recovered_ratio"] =
        static_cast<double>(hits) / static_cast<double>(jam_train.pulses.size());
    return report;
}

}  // namespace aspm
