// Batch front-end: experiment configs in, CSV/JSON results out.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "aspm/io.hpp"
#include "aspm/metrics.hpp"
#include "aspm/pulsegen.hpp"
#include "aspm/receiver.hpp"
#include "aspm/rng.hpp"
#include "aspm/scenarios.hpp"

namespace fs = std::filesystem;
using namespace aspm;

namespace {

constexpr const char* kArtifactVersion = "1";

// Written before any result file so a crash never leaves orphan results.
void write_manifest(const fs::path& out_dir, const std::string& command,
                    const std::string& config_path, std::uint64_t seed) {
    fs::create_directories(out_dir);
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
    std::map<std::string, std::string> context{
        {"command", command},
        {"config", config_path},
        {"seed", std::to_string(seed)},
        {"artifact_version", kArtifactVersion},
        {"out_dir", out_dir.string()},
        {"wall_clock_unix", std::to_string(secs.count())},
    };
    write_report_json(out_dir / "manifest.json", {}, context);
}

// consume-and-complain config access: every key must be claimed
class Section {
  public:
    Section(const std::string& name, std::map<std::string, std::string> entries)
        : name_(name), entries_(std::move(entries)) {}

    std::string take(const std::string& key, const std::string& fallback) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::string v = it->second;
        entries_.erase(it);
        return v;
    }
    double take_d(const std::string& key, double fallback) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        const double v = std::stod(it->second);
        entries_.erase(it);
        return v;
    }
    std::int64_t take_i(const std::string& key, std::int64_t fallback) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        const std::int64_t v = std::stoll(it->second);
        entries_.erase(it);
        return v;
    }
    bool take_b(const std::string& key, bool fallback) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        const bool v = it->second == "true" || it->second == "1";
        if (!v && it->second != "false" && it->second != "0")
            throw std::runtime_error("config [" + name_ + "] " + key + ": expected boolean");
        entries_.erase(it);
        return v;
    }
    void done() const {
        if (!entries_.empty())
            throw std::runtime_error("config [" + name_ + "]: unknown key '" +
                                     entries_.begin()->first + "'");
    }

  private:
    std::string name_;
    std::map<std::string, std::string> entries_;
};

Section section(const Config& config, const std::string& name) {
    const auto it = config.find(name);
    return Section(name, it == config.end() ? std::map<std::string, std::string>{} : it->second);
}

ShapingKey parse_key(const Config& config, const std::string& name, std::uint64_t default_seed) {
    ShapingKey key;
    Section s = section(config, name);
    key.seed = static_cast<std::uint64_t>(s.take_i("seed", static_cast<std::int64_t>(default_seed)));
    key.n_sections = static_cast<int>(s.take_i("n_sections", key.n_sections));
    key.pole_radius_min = s.take_d("pole_radius_min", key.pole_radius_min);
    key.pole_radius_max = s.take_d("pole_radius_max", key.pole_radius_max);
    key.beta = s.take_d("beta", key.beta);
    key.n_s = static_cast<int>(s.take_i("n_s", key.n_s));
    key.span = static_cast<int>(s.take_i("span", key.span));
    key.truncation_tol = s.take_d("truncation_tol", key.truncation_tol);
    s.done();
    return key;
}

void check_sections(const Config& config, const std::set<std::string>& known) {
    for (const auto& [name, entries] : config) {
        (void)entries;
        if (!known.contains(name))
            throw std::runtime_error("config: unknown section [" + name + "]");
    }
}

int run_scenario_file(const std::string& config_path, const fs::path& out_dir,
                      std::uint64_t seed, bool dump_taps) {
    const Config config = read_config(config_path);
    Section meta = section(config, "scenario");
    const std::string id = meta.take("id", "");
    meta.done();
    if (id.empty()) throw std::runtime_error("config: [scenario] id is required");

    write_manifest(out_dir, "scenario " + id, config_path, seed);

    ScenarioReport report;
    if (id == "basic") {
        check_sections(config, {"scenario", "link", "key"});
        BasicLinkConfig c;
        Section s = section(config, "link");
        c.n_bits = s.take_i("n_bits", c.n_bits);
        c.n_p = s.take_i("n_p", c.n_p);
        c.snr_db = s.take_d("snr_db", c.snr_db);
        c.noiseless = s.take_b("noiseless", c.noiseless);
        c.use_inf = s.take_b("use_inf", c.use_inf);
        c.inf_beta = s.take_d("inf_beta", c.inf_beta);
        c.sync_m = static_cast<int>(s.take_i("sync_m", c.sync_m));
        c.ideal_sync = s.take_b("ideal_sync", c.ideal_sync);
        s.done();
        c.key = parse_key(config, "key", 1);
        c.master_seed = seed;
        c.dump_taps = dump_taps;
        report = run_basic_link(c);
    } else if (id == "stego") {
        check_sections(config, {"scenario", "stego", "key"});
        StegoConfig c;
        Section s = section(config, "stego");
        c.k_components = static_cast<int>(s.take_i("k", c.k_components));
        c.n_bits = s.take_i("n_bits", c.n_bits);
        c.n_p = s.take_i("n_p", c.n_p);
        c.component_power = s.take_d("component_power", c.component_power);
        c.noise_power = s.take_d("noise_power", c.noise_power);
        s.done();
        c.base_key = parse_key(config, "key", 1);
        c.master_seed = seed;
        report = run_stego_mixture(c);
    } else if (id == "layered") {
        check_sections(config, {"scenario", "layered", "cover_key", "payload_key"});
        LayeredCoverConfig c;
        Section s = section(config, "layered");
        c.n_bits = s.take_i("n_bits", c.n_bits);
        c.cover_n_p = s.take_i("cover_n_p", c.cover_n_p);
        c.payload_n_p = s.take_i("payload_n_p", c.payload_n_p);
        c.cover_payload_db = s.take_d("cover_payload_db", c.cover_payload_db);
        c.noise_payload_db = s.take_d("noise_payload_db", c.noise_payload_db);
        c.eps_fp = s.take_d("eps_fp", c.eps_fp);
        s.done();
        c.cover_key = parse_key(config, "cover_key", 11);
        c.payload_key = parse_key(config, "payload_key", 12);
        c.master_seed = seed;
        report = run_layered_cover(c);
    } else if (id == "jamming") {
        check_sections(config, {"scenario", "jamming", "ofdm_key", "jam_key"});
        JammingConfig c;
        Section s = section(config, "jamming");
        c.n_carriers = static_cast<int>(s.take_i("n_carriers", c.n_carriers));
        c.n_blocks = static_cast<int>(s.take_i("n_blocks", c.n_blocks));
        c.jam_n_p = s.take_i("jam_n_p", c.jam_n_p);
        c.jam_ofdm_db = s.take_d("jam_ofdm_db", c.jam_ofdm_db);
        c.eps_fp = s.take_d("eps_fp", c.eps_fp);
        s.done();
        c.ofdm_key = parse_key(config, "ofdm_key", 21);
        c.jam_key = parse_key(config, "jam_key", 22);
        c.master_seed = seed;
        report = run_friendly_jamming(c);
    } else {
        throw std::runtime_error("config: unknown scenario id '" + id + "'");
    }

    write_report_json(out_dir / "report.json", report.metrics,
                      {{"scenario", id}, {"seed", std::to_string(seed)}});
    for (const auto& [name, buffer] : report.taps)
        write_waveform_csv(out_dir / ("tap_" + name + ".csv"), buffer);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aggregate spread pulse modulation simulator"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int jobs = 1;
    std::string format = "csv";
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--jobs", jobs, "worker count (trials are independent)");
    app.add_option("--format", format, "result format")->check(CLI::IsMember({"csv", "json"}));

    // design
    auto* design = app.add_subcommand("design", "design filters and shaping pairs");
    bool want_rrc = false, want_rc = false, want_pair = false;
    double beta = 0.5;
    int ns = 2, span = 16, sections = 21;
    double pole_min = 0.85, pole_max = 0.98, tol = 1e-4;
    design->add_flag("--rrc", want_rrc, "root-raised-cosine seed");
    design->add_flag("--rc", want_rc, "raised-cosine pulse");
    design->add_flag("--pair", want_pair, "spread/descramble pair");
    design->add_option("--beta", beta, "roll-off");
    design->add_option("--ns", ns, "samples per symbol");
    design->add_option("--span", span, "support in symbol periods");
    design->add_option("--sections", sections, "allpass biquad sections");
    design->add_option("--pole-min", pole_min, "minimum pole radius");
    design->add_option("--pole-max", pole_max, "maximum pole radius");
    design->add_option("--tol", tol, "truncation tolerance");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "parameter sweeps with theory columns");
    std::string axis;
    std::int64_t np = 256, bits = 100000;
    double snr_lo = -22, snr_hi = -8, snr_step = 1;
    std::int64_t np_lo = 4, np_hi = 512;
    sweep->add_option("--axis", axis, "sweep axis")
        ->required()
        ->check(CLI::IsMember({"snr_db", "np"}));
    sweep->add_option("--np", np, "pulse spacing in samples");
    sweep->add_option("--bits", bits, "bits per point (0 = header only)");
    sweep->add_option("--snr-lo", snr_lo, "dB");
    sweep->add_option("--snr-hi", snr_hi, "dB");
    sweep->add_option("--snr-step", snr_step, "dB");
    sweep->add_option("--np-lo", np_lo, "");
    sweep->add_option("--np-hi", np_hi, "");

    // scenario
    auto* scenario = app.add_subcommand("scenario", "run a scenario config file");
    std::string config_path;
    bool dump_taps = false;
    scenario->add_option("config", config_path, "sectioned key-value config")->required();
    scenario->add_flag("--dump-taps", dump_taps, "write per-tap waveform CSVs");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "metrics for a waveform CSV");
    std::string wave_path;
    analyze->add_option("input", wave_path, "CSV with header k,x")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path out(out_dir);
        if (design->parsed()) {
            if (!want_rrc && !want_rc && !want_pair)
                throw std::runtime_error("design: choose --rrc, --rc, or --pair");
            write_manifest(out, "design", "", seed);
            if (want_rrc) write_filter_csv(out / "rrc.csv", design_rrc(beta, ns, span));
            if (want_rc) write_filter_csv(out / "rc.csv", design_rc(beta, ns, span));
            if (want_pair) {
                ShapingKey key{seed, sections, pole_min, pole_max, beta, ns, span, tol};
                const ShapingPair pair = build_pair(key);
                write_filter_csv(out / "spread.csv", pair.spread);
                write_filter_csv(out / "descramble.csv", pair.descramble);
                write_key_json(out / "pair.json", key);
            }
        } else if (sweep->parsed()) {
            write_manifest(out, "sweep " + axis, "", seed);
            std::ofstream csv(out / "sweep.csv");
            csv.precision(12);
            if (axis == "snr_db") {
                csv << "snr_db,np,ber_sim,ber_theory,n_bits,seed\n";
                for (double snr_db = snr_lo; bits > 0 && snr_db <= snr_hi + 1e-9;
                     snr_db += snr_step) {
                    BasicLinkConfig c;
                    c.n_bits = bits;
                    c.n_p = np;
                    c.snr_db = snr_db;
                    c.master_seed = derive_seed(seed, "sweep", static_cast<std::uint64_t>(
                                                                   std::llround(snr_db * 64)));
                    const ScenarioReport r = run_basic_link(c);
                    const double papr_mo = 1.143 * static_cast<double>(np) / 2.0;
                    csv << snr_db << ',' << np << ',' << r.at("ber") << ','
                        << ber_theory(std::pow(10.0, snr_db / 10.0), papr_mo) << ',' << bits << ','
                        << seed << '\n';
                }
            } else {
                csv << "np,papr,papr_over_np_ns\n";
                const FirFilter rc = design_rc(0.5, 2, 16);
                // single pulse centered in a frame wide enough for every window
                SampleBuffer frame(static_cast<std::size_t>(2 * np_hi) + rc.taps.size(), 0.0);
                const std::int64_t center =
                    np_hi + rc.delay;
                std::copy(rc.taps.begin(), rc.taps.end(),
                          frame.begin() + static_cast<std::ptrdiff_t>(np_hi));
                for (std::int64_t n = np_lo; bits > 0 && n <= np_hi; n *= 2) {
                    const auto r = papr(frame, center - n / 2, center + n / 2);
                    csv << n << ',' << r.papr << ',' << r.papr / (static_cast<double>(n) / 2.0)
                        << '\n';
                }
            }
        } else if (scenario->parsed()) {
            return run_scenario_file(config_path, out, seed, dump_taps);
        } else if (analyze->parsed()) {
            const SampleBuffer wave = read_waveform_csv(wave_path);
            write_manifest(out, "analyze", wave_path, seed);
            const GaussianityReport g = gaussianity(wave);
            write_report_json(out / "analysis.json",
                              {{"papr", papr(wave).papr},
                               {"mean_power", mean_power(wave)},
                               {"excess_kurtosis", g.excess_kurtosis},
                               {"iqr", g.iqr},
                               {"sigma_hat", g.sigma_hat},
                               {"n", static_cast<double>(g.n)}},
                              {{"input", wave_path}});
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
