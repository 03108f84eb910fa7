#include "aspm/io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace aspm {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.precision(17);
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

}  // namespace

void write_waveform_csv(const std::filesystem::path& path, const SampleBuffer& buffer) {
    auto out = open_out(path);
    out << "k,x\n";
    for (std::size_t k = 0; k < buffer.size(); ++k) out << k << ',' << buffer[k] << '\n';
}

SampleBuffer read_waveform_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("k,x", 0) != 0)
        throw std::runtime_error("waveform CSV must start with header k,x: " + path.string());
    SampleBuffer buffer;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("malformed waveform CSV line: " + line);
        buffer.push_back(std::stod(line.substr(comma + 1)));
    }
    return buffer;
}

void write_filter_csv(const std::filesystem::path& path, const FirFilter& fir) {
    auto out = open_out(path);
    out << "tap_index,value\n";
    for (std::size_t i = 0; i < fir.taps.size(); ++i) out << i << ',' << fir.taps[i] << '\n';
}

void write_train_csv(const std::filesystem::path& path, const SparseTrain& train) {
    auto out = open_out(path);
    out << "k,A\n";
    for (const Pulse& p : train.pulses) out << p.index << ',' << p.amplitude << '\n';
}

void write_key_json(const std::filesystem::path& path, const ShapingKey& key) {
    nlohmann::json j;
    j["seed"] = key.seed;
    j["n_sections"] = key.n_sections;
    j["pole_radius_min"] = key.pole_radius_min;
    j["pole_radius_max"] = key.pole_radius_max;
    j["beta"] = key.beta;
    j["n_s"] = key.n_s;
    j["span"] = key.span;
    j["truncation_tol"] = key.truncation_tol;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

ShapingKey read_key_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    nlohmann::json j;
    in >> j;
    ShapingKey key;
    key.seed = j.at("seed").get<std::uint64_t>();
    key.n_sections = j.at("n_sections").get<int>();
    key.pole_radius_min = j.at("pole_radius_min").get<double>();
    key.pole_radius_max = j.at("pole_radius_max").get<double>();
    key.beta = j.at("beta").get<double>();
    key.n_s = j.at("n_s").get<int>();
    key.span = j.at("span").get<int>();
    key.truncation_tol = j.at("truncation_tol").get<double>();
    return key;
}

void write_report_json(const std::filesystem::path& path,
                       const std::map<std::string, double>& metrics,
                       const std::map<std::string, std::string>& context) {
    nlohmann::json j;
    j["metrics"] = metrics;
    j["context"] = context;
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

Config read_config(const std::filesystem::path& path) {
    auto in = open_in(path);
    Config config;
    std::string line, section = "global";
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string{};
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            config[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": empty key");
        config[section][key] = value;
    }
    return config;
}

}  // namespace aspm
