// qcse: command-line front end.
//
//   qcse spectrum <config.json | preset>     spectrum.csv + peaks.json
//   qcse dynamics <config.json | preset>     dynamics.csv
//   qcse oracle   <config.json | preset>     oracle_trace.csv + oracle_spectrum.csv
//   qcse table1                              table1.json + one bundle per cell
//   qcse preset   <id>                       the preset's own output selection
//   qcse show     <config.json | preset>     resolved configs as JSON
//
// Exit codes: 0 success, 1 empty config list, 2 config error, 3 numeric failure,
// 4 I/O or internal error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "qcse/config.hpp"
#include "qcse/errors.hpp"
#include "qcse/experiment.hpp"

namespace {

using namespace qcse;

enum Exit { ok = 0, empty = 1, config_error = 2, numeric_error = 3, internal_error = 4 };

struct Overrides {
    std::string mode;
    int scan_points{0};
    std::string half_span;
    int fft_points{0};
    std::string dyn_t_max;
    int modes{0};
    std::string oracle_t_max;
    std::string oracle_dt;
};

std::vector<ExperimentConfig> resolve(const std::string& source, std::string& origin) {
    if (std::filesystem::is_regular_file(source)) {
        origin = "config:" + source;
        return load_config(source);
    }
    if (is_preset(source)) {
        origin = "preset:" + source;
        return preset(source);
    }
    throw ConfigError(source + ": neither a readable config file nor a preset id");
}

void apply_overrides(const Overrides& o, std::vector<ExperimentConfig>& configs) {
    for (auto& c : configs) {
        if (o.scan_points > 0) c.scan.points = o.scan_points;
        if (!o.half_span.empty()) c.scan.half_span = parse_frequency(o.half_span, "--half-span");
        if (o.fft_points > 0) c.dynamics.fft_points = o.fft_points;
        if (!o.dyn_t_max.empty()) c.dynamics.t_max = parse_time(o.dyn_t_max, "--t-max");
        if (o.modes > 0) c.oracle.modes = o.modes;
        if (!o.oracle_t_max.empty()) c.oracle.t_max = parse_time(o.oracle_t_max, "--oracle-t-max");
        if (!o.oracle_dt.empty()) c.oracle.dt = parse_time(o.oracle_dt, "--oracle-dt");
        if (c.scan.points < 11) throw ConfigError("--points: must be >= 11");
        if (c.scan.half_span <= 0.0) throw ConfigError("--half-span: must be > 0");
        if (c.dynamics.fft_points < 1024 || c.dynamics.fft_points % 2) throw ConfigError("--fft-points: must be even and >= 1024");
        if (c.dynamics.t_max <= 0.0) throw ConfigError("--t-max: must be > 0");
        if (c.oracle.t_max <= 0.0) throw ConfigError("--oracle-t-max: must be > 0");
        if (c.oracle.dt < 0.0) throw ConfigError("--oracle-dt: must be >= 0");
    }
}

std::optional<ModeSelection> mode_flag(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "full") return ModeSelection::full;
    if (s == "rwa") return ModeSelection::rwa;
    if (s == "both") return ModeSelection::both;
    throw ConfigError("--mode: expected full, rwa or both");
}

void report(const std::vector<ExperimentResult>& results, const RunOptions& opt) {
    for (const auto& r : results) {
        std::printf("%-32s", r.config.name.c_str());
        for (const auto& m : r.modes) {
            std::printf("  %s: eta=%.9f", std::string(to_string(m.mode)).c_str(), m.renormalization.eta);
            if (r.config.outputs.peaks) std::printf(" %s", m.peaks.classification.c_str());
        }
        std::printf("\n");
    }
    std::printf("wrote %zu bundle(s) under %s\n", results.size(), opt.output_root.string().c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qubit-cavity spontaneous-emission spectra beyond the rotating-wave approximation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    RunOptions run;
    std::string out_dir = "out";
    Overrides ov;
    bool no_wall_time = false;
    auto common = [&](CLI::App* s) {
        s->add_option("-o,--output", out_dir, "Output root directory")->capture_default_str();
        s->add_option("--mode", ov.mode, "Override the mode: full, rwa or both");
        s->add_option("--jobs", run.jobs, "Concurrent configs (0: all cores)");
        s->add_option("--points", ov.scan_points, "Spectrum scan points");
        s->add_option("--half-span", ov.half_span, "Spectrum half-span around Delta, e.g. \"300 MHz\"");
        s->add_option("--fft-points", ov.fft_points, "FFT grid points for dynamics");
        s->add_option("--t-max", ov.dyn_t_max, "Dynamics end time, e.g. \"200 ns\"");
        s->add_option("--modes", ov.modes, "Oracle modes per bath");
        s->add_option("--oracle-t-max", ov.oracle_t_max, "Oracle end time");
        s->add_option("--oracle-dt", ov.oracle_dt, "Oracle RK4 step (0: automatic)");
        s->add_flag("--no-wall-time", no_wall_time, "Record null wall time, for byte-identical manifests");
    };

    std::string source;
    auto* spectrum = app.add_subcommand("spectrum", "Emission spectrum and peak report");
    auto* dynamics = app.add_subcommand("dynamics", "Survival amplitude and excited-state population");
    auto* oracle = app.add_subcommand("oracle", "Discretized-bath simulation");
    auto* table1 = app.add_subcommand("table1", "Regime classification table");
    auto* presetc = app.add_subcommand("preset", "Run a compiled-in preset");
    auto* show = app.add_subcommand("show", "Print resolved configs");
    for (auto* s : {spectrum, dynamics, oracle, presetc, show})
        s->add_option("source", source, presetc == s ? "Preset id" : "Config file or preset id")->required();
    for (auto* s : {spectrum, dynamics, oracle, table1, presetc}) common(s);
    show->add_option("--mode", ov.mode, "Override the mode: full, rwa or both");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_error;
    }

    try {
        run.output_root = out_dir;
        run.record_wall_time = !no_wall_time;
        run.mode_override = mode_flag(ov.mode);

        std::vector<ExperimentConfig> configs;
        if (table1->parsed()) {
            configs = preset("table1");
            run.origin = "preset:table1";
        } else if (presetc->parsed()) {
            if (!is_preset(source)) preset(source);  // throws with the list of ids
            configs = preset(source);
            run.origin = "preset:" + source;
        } else {
            configs = resolve(source, run.origin);
        }
        if (configs.empty()) {
            std::fprintf(stderr, "qcse: empty config list, nothing to do\n");
            return empty;
        }
        apply_overrides(ov, configs);

        if (show->parsed()) {
            nlohmann::json list = nlohmann::json::array();
            for (auto& c : configs) {
                if (run.mode_override) c.mode = *run.mode_override;
                list.push_back(to_json(c));
            }
            std::cout << nlohmann::json{{"experiments", list}}.dump(2) << "\n";
            return ok;
        }
        for (auto& c : configs) {
            if (spectrum->parsed()) c.outputs = {.spectrum = true, .peaks = true};
            if (dynamics->parsed()) c.outputs = {.spectrum = false, .peaks = false, .dynamics = true};
            if (oracle->parsed()) c.outputs = {.spectrum = false, .peaks = false, .oracle = true};
            if (table1->parsed()) c.mode = ModeSelection::full;
        }
        if (table1->parsed()) run.mode_override.reset();

        const auto results = run_experiments(configs, run);
        report(results, run);
        if (table1->parsed()) {
            const auto cells = table1_cells(results);
            const auto j = table1_json(cells);
            write_atomic(run.output_root / "table1.json", j.dump(2) + "\n");
            int matched = 0;
            for (const auto& c : cells) {
                matched += c.match;
                std::printf("%-14s %-12s Q=%-6g %-7s (reference %s)%s\n", std::string(to_string(c.bath)).c_str(),
                            c.coupling.c_str(), c.quality, c.report.classification.c_str(), c.reference.c_str(),
                            c.match ? "" : "  MISMATCH");
            }
            std::printf("table1: %d/%zu cells match the reference labels\n", matched, cells.size());
        }
        return ok;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "qcse: config error: %s\n", e.what());
        return config_error;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "qcse: numeric failure in %s\n", e.what());
        return numeric_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "qcse: %s\n", e.what());
        return internal_error;
    }
}
