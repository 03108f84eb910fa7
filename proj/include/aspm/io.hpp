#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "aspm/common.hpp"
#include "aspm/filters.hpp"
#include "aspm/scenarios.hpp"

namespace aspm {

// Waveform interchange: CSV, one sample per line, header `k,x`.
void write_waveform_csv(const std::filesystem::path& path, const SampleBuffer& buffer);
SampleBuffer read_waveform_csv(const std::filesystem::path& path);

// Filter taps: CSV with header `tap_index,value`.
void write_filter_csv(const std::filesystem::path& path, const FirFilter& fir);

// Pulse trains: CSV with header `k,A`.
void write_train_csv(const std::filesystem::path& path, const SparseTrain& train);

// JSON descriptor sufficient to regenerate a shaping pair bit-exactly.
void write_key_json(const std::filesystem::path& path, const ShapingKey& key);
ShapingKey read_key_json(const std::filesystem::path& path);

void write_report_json(const std::filesystem::path& path,
                       const std::map<std::string, double>& metrics,
                       const std::map<std::string, std::string>& context);

// Sectioned key-value config text: `[section]` headers, `key = value` lines,
// `#` comments. Unknown sections or keys are the caller's problem to reject.
using Config = std::map<std::string, std::map<std::string, std::string>>;
Config read_config(const std::filesystem::path& path);

}  // namespace aspm
