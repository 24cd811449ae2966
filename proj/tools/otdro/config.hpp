#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "otdro/backtest.hpp"
#include "otdro/synthetic.hpp"

namespace otdro::cli {

// Generate the dataset instead of reading files.
struct SyntheticSource {
    std::uint64_t seed = 0;
    std::string preset = "default";  // "default" or "spike_heavy"
    SyntheticConfig config;
};

struct RunConfig {
    std::optional<std::filesystem::path> market;
    std::optional<std::filesystem::path> forecast;
    std::optional<std::size_t> ensemble_size;  // inferred from the forecast header when unset
    std::filesystem::path output_dir = "otdro-out";
    std::optional<SyntheticSource> synthetic;
    BacktestConfig backtest;
};

// Relative paths resolve against base_dir. Unknown keys, wrong types and
// out-of-range values raise ConfigError naming the field; missing input files
// raise DataError naming the path.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

SyntheticConfig synthetic_preset(const std::string& name);

}  // namespace otdro::cli
