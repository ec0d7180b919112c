// config.hpp: experiment configuration, unit parsing and compiled-in presets
//
// A config file is JSON: either a single experiment object or
// {"experiments": [ ... ]}. Frequencies accept a bare number (GHz) or a string
// with a unit suffix ("200 MHz"); times accept a bare number (ns) or a string
// ("1.5 us"). The schema is documented in README.md.

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qcse/oracle.hpp"
#include "qcse/response.hpp"
#include "qcse/spectrum.hpp"

namespace qcse {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kConfigSchema = "qcse.config/1";

enum class ModeSelection { full, rwa, both };

std::vector<Mode> modes_of(ModeSelection m);

struct ScanConfig {
    int points{4001};
    double half_span{0.0};  // 0: default_half_span
    int refine_factor{10};
    double refine_half_width{5.0};
};

struct DynamicsConfig {
    double t_max{200.0};
    double sample_dt{0.1};
    int fft_points{1 << 16};
    double fft_span{0.0};  // 0: default_fft_span
};

struct DensityConfig {
    double lo{1e-3};  // GHz
    double hi{100.0};
    int points{2001};
};

struct OracleConfig {
    int modes{2000};
    double t_max{200.0};
    double dt{0.0};  // 0: automatic
    double sample_dt{0.1};
    double band_max{0.0};  // 0: 5 Delta
};

struct OutputSelection {
    bool spectrum{true};
    bool peaks{true};
    bool dynamics{false};
    bool oracle{false};
    bool densities{false};  // J(w) of both baths on a log grid
};

struct ExperimentConfig {
    std::string name{"experiment"};
    Environment environment;
    ModeSelection mode{ModeSelection::full};
    ScanConfig scan;
    DynamicsConfig dynamics;
    OracleConfig oracle;
    DensityConfig densities;
    OutputSelection outputs;
    ClassificationThresholds thresholds;
    std::string output_dir;  // relative to the run's output root; empty: name
    // Keys the tool filled in, as JSON pointers.
    std::vector<std::string> defaults_filled;
};

// "200 MHz" -> 0.2; bare numbers are GHz. Throws ConfigError naming `path`.
double parse_frequency(const nlohmann::json& value, const std::string& path);
// "1.5 us" -> 1500; bare numbers are ns.
double parse_time(const nlohmann::json& value, const std::string& path);

// Validates and resolves defaults. Unknown keys are rejected with their path.
ExperimentConfig parse_experiment(const nlohmann::json& j, const std::string& path = "");
std::vector<ExperimentConfig> parse_config(const nlohmann::json& j);
std::vector<ExperimentConfig> load_config(const std::filesystem::path& file);

const std::vector<std::string>& preset_ids();
bool is_preset(std::string_view id);
// Throws ConfigError for an unknown id.
std::vector<ExperimentConfig> preset(std::string_view id);

// Fully resolved form, suitable for the manifest and for re-loading.
nlohmann::json to_json(const ExperimentConfig& cfg);

std::string_view to_string(ModeSelection m) noexcept;

} // namespace qcse
