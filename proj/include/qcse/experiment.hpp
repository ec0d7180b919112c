// experiment.hpp: runs configs and writes the CSV/JSON result bundle
//
// Per config, inside <output_root>/<output_dir>/:
//   spectrum.csv         omega_ghz,power,r_shift_ghz,gamma_ghz,mode,source
//   peaks.json           one PeakReport per mode
//   dynamics.csv         t_ns,re_chi,im_chi,population,rho11,mode,source
//   oracle_trace.csv     t_ns,re_chi,im_chi,population,mode,source
//   oracle_spectrum.csv  omega_ghz,power,mode,source
//   densities.csv        omega_ghz,j_intrinsic,j_cavity,source
//   manifest.json        resolved config, eta values, tool version, wall time
// Files are written only after every computation of the config succeeded,
// each one via write-then-rename.

#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qcse/config.hpp"
#include "qcse/dynamics.hpp"
#include "qcse/oracle.hpp"
#include "qcse/spectrum.hpp"

namespace qcse {

inline constexpr std::string_view kResultSchema = "qcse.result/1";

struct RunOptions {
    std::filesystem::path output_root{"out"};
    std::optional<ModeSelection> mode_override;
    int jobs{0};  // 0: hardware concurrency
    // Wall time is the only field that differs between identical runs.
    bool record_wall_time{true};
    std::string origin{"config"};  // e.g. "preset:fig4a"
};

struct ModeResult {
    Mode mode{Mode::full};
    RenormalizationResult renormalization;
    SpectrumSeries spectrum;
    PeakReport peaks;
    std::optional<AmplitudeTrace> dynamics;  // lab frame, sampled at dynamics.sample_dt
    double fft_span{0.0};
    std::optional<OracleTrace> oracle;
    std::optional<SpectrumSeries> oracle_spectrum;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ModeResult> modes;
    double wall_time{0.0};  // s
};

// Pure computation; nothing touches the filesystem.
ExperimentResult compute_experiment(const ExperimentConfig& config);

std::string spectrum_csv(const std::vector<ModeResult>& modes);
std::string dynamics_csv(const std::vector<ModeResult>& modes);
std::string oracle_trace_csv(const std::vector<ModeResult>& modes);
std::string oracle_spectrum_csv(const std::vector<ModeResult>& modes);
std::string densities_csv(const ExperimentConfig& config);
nlohmann::json peaks_json(const PeakReport& report);
nlohmann::json manifest_json(const ExperimentResult& result, const RunOptions& opt);

// Writes to a sibling temporary file and renames it over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Returns the written paths.
std::vector<std::filesystem::path> write_experiment(const ExperimentResult& result, const RunOptions& opt);

// Runs independent configs concurrently. If any config fails, nothing is
// written and the first failure in config order is rethrown.
std::vector<ExperimentResult> run_experiments(const std::vector<ExperimentConfig>& configs, const RunOptions& opt);

struct Table1Cell {
    BathKind bath{BathKind::low_frequency};
    std::string coupling;
    double g{0.0};
    double quality{0.0};
    PeakReport report;
    std::string reference;  // expected label
    bool match{false};
};

// Expected labels per bath and coupling strength, identical for both Q values.
std::string table1_reference(BathKind bath, const std::string& coupling);

// Cells from the results of the table1 preset (full mode), in preset order.
std::vector<Table1Cell> table1_cells(const std::vector<ExperimentResult>& results);
nlohmann::json table1_json(const std::vector<Table1Cell>& cells);

} // namespace qcse
