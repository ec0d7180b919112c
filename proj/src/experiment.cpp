#include "qcse/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include "qcse/errors.hpp"

namespace qcse {

using nlohmann::json;

namespace {

// 17 significant digits so that identical runs give identical bytes.
std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string label(Mode m) { return std::string(to_string(m)); }

AmplitudeTrace sampled_dynamics(const ResponseKernel& kernel, const DynamicsConfig& cfg, double& span) {
    FftGridOptions opt;
    opt.points = cfg.fft_points;
    opt.span = cfg.fft_span > 0.0 ? cfg.fft_span : default_fft_span(kernel);
    span = opt.span;
    const auto trace = survival_amplitude(kernel, opt);
    if (trace.time.empty() || trace.time.back() < cfg.t_max)
        throw ConfigError("dynamics: t_max " + num(cfg.t_max) + " ns exceeds the FFT window of " +
                          num(trace.time.empty() ? 0.0 : trace.time.back()) +
                          " ns; raise fft_points or lower fft_span");
    std::vector<double> times;
    const long n = static_cast<long>(std::floor(cfg.t_max / cfg.sample_dt + 1e-9));
    for (long k = 0; k <= n; ++k) times.push_back(static_cast<double>(k) * cfg.sample_dt);
    return resample(trace, times);
}

std::string describe(const ExperimentConfig& c) {
    const auto& env = c.environment;
    const auto& cav = std::get<LorentzianCavity>(env.cavity);
    double alpha = 0.0;
    std::visit([&](const auto& b) {
        if constexpr (requires { b.alpha; }) alpha = b.alpha;
    }, env.intrinsic);
    return c.name + " (" + std::string(to_string(kind_of(env.intrinsic))) + " alpha=" + num(alpha) +
           ", delta=" + num(env.delta) + " GHz, g=" + num(cav.g) + " GHz, lambda=" + num(cav.lambda) + " GHz)";
}

} // namespace

ExperimentResult compute_experiment(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.config = config;
    const auto& env = config.environment;
    validate(env);

    const bool needs_kernel = config.outputs.spectrum || config.outputs.peaks || config.outputs.dynamics;
    for (Mode mode : modes_of(config.mode)) {
        ModeResult m;
        m.mode = mode;
        m.renormalization = mode == Mode::full ? renormalize(env) : rwa_renormalization();
        if (needs_kernel) {
            const ResponseKernel kernel(env, m.renormalization, mode);
            if (config.outputs.spectrum || config.outputs.peaks) {
                ScanOptions scan;
                scan.points = config.scan.points;
                scan.half_span = config.scan.half_span;
                scan.refine_factor = config.scan.refine_factor;
                scan.refine_half_width = config.scan.refine_half_width;
                m.spectrum = scan_spectrum(kernel, scan);
                m.peaks = find_peaks(m.spectrum, config.thresholds);
            }
            if (config.outputs.dynamics) m.dynamics = sampled_dynamics(kernel, config.dynamics, m.fft_span);
        }
        if (config.outputs.oracle) {
            OracleSettings s;
            s.modes_per_bath = config.oracle.modes;
            s.band_max = config.oracle.band_max;
            s.evolve.t_max = config.oracle.t_max;
            s.evolve.dt = config.oracle.dt;
            s.evolve.sample_dt = config.oracle.sample_dt;
            auto run = run_oracle(env, mode, s);
            OracleSpectrumOptions so;
            so.lo = env.delta - config.scan.half_span;
            so.hi = env.delta + config.scan.half_span;
            m.oracle_spectrum = oracle_spectrum(run.trace, env, mode, so);
            m.oracle = std::move(run.trace);
        }
        result.modes.push_back(std::move(m));
    }
    result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string spectrum_csv(const std::vector<ModeResult>& modes) {
    std::string out = "omega_ghz,power,r_shift_ghz,gamma_ghz,mode,source\n";
    for (const auto& m : modes)
        for (const auto& s : m.spectrum.samples)
            out += num(s.omega) + ',' + num(s.power) + ',' + num(s.r_shift) + ',' + num(s.gamma) + ',' +
                   label(m.mode) + ",analytic\n";
    return out;
}

std::string dynamics_csv(const std::vector<ModeResult>& modes) {
    std::string out = "t_ns,re_chi,im_chi,population,rho11,mode,source\n";
    for (const auto& m : modes) {
        if (!m.dynamics) continue;
        const auto& d = *m.dynamics;
        for (std::size_t k = 0; k < d.time.size(); ++k) {
            const double rho11 =
                evolve_density_matrix(QubitState::excited(), d, m.renormalization.eta, d.time[k])(0, 0).real();
            out += num(d.time[k]) + ',' + num(d.amplitude[k].real()) + ',' + num(d.amplitude[k].imag()) + ',' +
                   num(d.population[k]) + ',' + num(rho11) + ',' + label(m.mode) + ",analytic\n";
        }
    }
    return out;
}

std::string oracle_trace_csv(const std::vector<ModeResult>& modes) {
    std::string out = "t_ns,re_chi,im_chi,population,mode,source\n";
    for (const auto& m : modes) {
        if (!m.oracle) continue;
        const auto& o = *m.oracle;
        for (std::size_t k = 0; k < o.time.size(); ++k)
            out += num(o.time[k]) + ',' + num(o.chi[k].real()) + ',' + num(o.chi[k].imag()) + ',' +
                   num(std::norm(o.chi[k])) + ',' + label(m.mode) + ",oracle\n";
    }
    return out;
}

std::string oracle_spectrum_csv(const std::vector<ModeResult>& modes) {
    std::string out = "omega_ghz,power,mode,source\n";
    for (const auto& m : modes) {
        if (!m.oracle_spectrum) continue;
        for (const auto& s : m.oracle_spectrum->samples)
            out += num(s.omega) + ',' + num(s.power) + ',' + label(m.mode) + ",oracle\n";
    }
    return out;
}

std::string densities_csv(const ExperimentConfig& c) {
    std::string out = "omega_ghz,j_intrinsic,j_cavity,source\n";
    const auto& d = c.densities;
    const double ratio = std::log(d.hi / d.lo) / (d.points - 1);
    for (int k = 0; k < d.points; ++k) {
        const double w = k + 1 == d.points ? d.hi : d.lo * std::exp(ratio * k);
        out += num(w) + ',' + num(eval_density(c.environment.intrinsic, w, c.environment.delta)) + ',' +
               num(eval_density(c.environment.cavity, w, c.environment.delta)) + ",analytic\n";
    }
    return out;
}

json peaks_json(const PeakReport& r) {
    json peaks = json::array();
    for (const auto& p : r.peaks)
        peaks.push_back({{"position", p.position}, {"height", p.height}, {"fwhm", finite_or_null(p.fwhm)}});
    return {
        {"peaks", peaks},
        {"peak_count", r.peak_count},
        {"shift", r.shift},
        {"splitting", r.splitting},
        {"position_asymmetry", r.position_asymmetry},
        {"height_ratio", finite_or_null(r.height_ratio)},
        {"classification", r.classification},
    };
}

json manifest_json(const ExperimentResult& r, const RunOptions& opt) {
    json modes = json::array();
    for (const auto& m : r.modes) {
        json e{{"mode", label(m.mode)},
               {"eta1", m.renormalization.eta1},
               {"eta2", m.renormalization.eta2},
               {"eta", m.renormalization.eta},
               {"eta_iterations", m.renormalization.iterations},
               {"eta_residual", m.renormalization.residual}};
        if (m.dynamics) {
            e["fft_span_ghz"] = m.fft_span;
            e["causality_violation"] = m.dynamics->causality_violation;
        }
        if (m.oracle) {
            e["oracle_dt_ns"] = m.oracle->dt;
            e["oracle_steps"] = m.oracle->steps;
            e["oracle_max_norm_drift"] = m.oracle->max_norm_drift;
        }
        modes.push_back(std::move(e));
    }
    return {
        {"schema", kResultSchema},
        {"tool", "qcse"},
        {"version", kToolVersion},
        {"origin", opt.origin},
        {"config", to_json(r.config)},
        {"defaults_filled", r.config.defaults_filled},
        {"modes", modes},
        {"wall_time_s", opt.record_wall_time ? json(r.wall_time) : json(nullptr)},
    };
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::vector<std::filesystem::path> write_experiment(const ExperimentResult& r, const RunOptions& opt) {
    const auto dir = opt.output_root / r.config.output_dir;
    const auto& o = r.config.outputs;
    // Render everything first so a formatting failure leaves no partial bundle.
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    if (o.spectrum) files.emplace_back(dir / "spectrum.csv", spectrum_csv(r.modes));
    if (o.peaks) {
        json p = json::object();
        for (const auto& m : r.modes) p[label(m.mode)] = peaks_json(m.peaks);
        files.emplace_back(dir / "peaks.json", p.dump(2) + "\n");
    }
    if (o.dynamics) files.emplace_back(dir / "dynamics.csv", dynamics_csv(r.modes));
    if (o.oracle) {
        files.emplace_back(dir / "oracle_trace.csv", oracle_trace_csv(r.modes));
        files.emplace_back(dir / "oracle_spectrum.csv", oracle_spectrum_csv(r.modes));
    }
    if (o.densities) files.emplace_back(dir / "densities.csv", densities_csv(r.config));
    files.emplace_back(dir / "manifest.json", manifest_json(r, opt).dump(2) + "\n");

    std::vector<std::filesystem::path> written;
    for (const auto& [path, content] : files) {
        write_atomic(path, content);
        written.push_back(path);
    }
    return written;
}

std::vector<ExperimentResult> run_experiments(const std::vector<ExperimentConfig>& configs, const RunOptions& opt) {
    std::vector<ExperimentConfig> resolved = configs;
    if (opt.mode_override)
        for (auto& c : resolved) c.mode = *opt.mode_override;

    std::vector<std::optional<ExperimentResult>> results(resolved.size());
    std::vector<std::exception_ptr> errors(resolved.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < resolved.size(); i = next++) {
            try {
                results[i] = compute_experiment(resolved[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    unsigned jobs = opt.jobs > 0 ? static_cast<unsigned>(opt.jobs) : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, resolved.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < resolved.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const NumericError& e) {
            const std::string what = e.what();
            throw NumericError(e.module(), describe(resolved[i]) + ": " + what.substr(e.module().size() + 2));
        } catch (const ConfigError& e) {
            throw ConfigError(resolved[i].name + ": " + e.what());
        }
    }
    std::vector<ExperimentResult> out;
    for (auto& r : results) out.push_back(std::move(*r));
    for (const auto& r : out) write_experiment(r, opt);
    return out;
}

std::string table1_reference(BathKind bath, const std::string& coupling) {
    if (coupling == "weak") return "single";
    if (bath == BathKind::low_frequency) return coupling == "strong" ? "AS" : "VAS";
    return coupling == "strong" ? "AS*" : "AS";
}

std::vector<Table1Cell> table1_cells(const std::vector<ExperimentResult>& results) {
    std::vector<Table1Cell> cells;
    for (const auto& r : results) {
        const auto& c = r.config;
        const auto it = std::find_if(r.modes.begin(), r.modes.end(), [](const ModeResult& m) { return m.mode == Mode::full; });
        if (it == r.modes.end()) throw ConfigError(c.name + ": table1 needs a full-mode result");
        Table1Cell cell;
        cell.bath = kind_of(c.environment.intrinsic);
        cell.coupling = c.name.substr(c.name.rfind('_') + 1);
        cell.g = std::get<LorentzianCavity>(c.environment.cavity).g;
        cell.quality = quality_factor(c.environment.cavity);
        cell.report = it->peaks;
        cell.reference = table1_reference(cell.bath, cell.coupling);
        cell.match = cell.report.classification == cell.reference;
        cells.push_back(std::move(cell));
    }
    return cells;
}

json table1_json(const std::vector<Table1Cell>& cells) {
    json rows = json::array();
    bool all = !cells.empty();
    for (const auto& c : cells) {
        all = all && c.match;
        rows.push_back({{"bath", to_string(c.bath)},
                        {"coupling", c.coupling},
                        {"g_ghz", c.g},
                        {"Q", c.quality},
                        {"classification", c.report.classification},
                        {"reference", c.reference},
                        {"match", c.match},
                        {"peaks", peaks_json(c.report)}});
    }
    return {{"schema", "qcse.table1/1"}, {"cells", rows}, {"all_match", all}};
}

} // namespace qcse
