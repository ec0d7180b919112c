// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "qcse/config.hpp"
#include "qcse/dynamics.hpp"
#include "qcse/experiment.hpp"
#include "qcse/oracle.hpp"
#include "qcse/renormalization.hpp"
#include "qcse/spectrum.hpp"
#include "reference.hpp"

using namespace qcse;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void criterion(const char* id, const std::function<Outcome()>& body, double budget_s = 0.0) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0.0 && s > budget_s) {
        o.pass = false;
        o.detail += fmt(" [runtime %.1f s over %.0f s]", s, budget_s);
    }
    failures += !o.pass;
    std::printf("%s %-26s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), s);
    std::fflush(stdout);
}

std::vector<std::string> figure_presets() {
    return {"fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig5a", "fig5b"};
}

PeakReport analyse(const ExperimentConfig& c, Mode mode = Mode::full) {
    const auto k = ResponseKernel::make(c.environment, mode);
    ScanOptions s;
    s.points = c.scan.points;
    s.half_span = c.scan.half_span;
    return find_peaks(scan_spectrum(k, s), c.thresholds);
}

std::vector<PeakReport> series(const std::string& id) {
    std::vector<PeakReport> out;
    for (const auto& c : preset(id)) out.push_back(analyse(c));
    return out;
}

// weak, strong, ultrastrong orderings for the low-frequency bath
Outcome low_orderings(const std::vector<PeakReport>& r) {
    const auto &w = r[0], &s = r[1], &u = r[2];
    const bool pass = w.peak_count == 1 && w.shift > 0.0 && s.peak_count == 2 && s.height_ratio > 1.0 &&
                      u.peak_count == 2 && u.height_ratio > s.height_ratio &&
                      std::abs(u.position_asymmetry) > std::abs(s.position_asymmetry);
    return {pass, fmt("weak n=%d shift=%+.4g MHz; strong n=%d hr=%.4f pa=%+.4g MHz; ultra n=%d hr=%.4f pa=%+.4g MHz",
                      w.peak_count, 1e3 * w.shift, s.peak_count, s.height_ratio, 1e3 * s.position_asymmetry,
                      u.peak_count, u.height_ratio, 1e3 * u.position_asymmetry)};
}

Outcome ohmic_orderings(const std::vector<PeakReport>& r, const std::vector<PeakReport>& low) {
    const auto &w = r[0], &s = r[1], &u = r[2];
    const bool pass = w.peak_count == 1 && w.shift < 0.0 && std::abs(w.shift) < std::abs(low[0].shift) &&
                      s.peak_count == 2 && s.height_ratio < 1.0 && u.peak_count == 2 && u.height_ratio > 1.0 &&
                      u.height_ratio - 1.0 < low[2].height_ratio - 1.0;
    return {pass, fmt("weak n=%d shift=%+.4g MHz (low %+.4g); strong n=%d hr=%.4f; ultra n=%d hr=%.4f (low %.4f)",
                      w.peak_count, 1e3 * w.shift, 1e3 * low[0].shift, s.peak_count, s.height_ratio, u.peak_count,
                      u.height_ratio, low[2].height_ratio)};
}

bool broader(const PeakReport& wide, const PeakReport& narrow) {
    if (wide.peak_count != narrow.peak_count || wide.peaks.size() != narrow.peaks.size()) return false;
    for (std::size_t i = 0; i < wide.peaks.size(); ++i)
        if (!(wide.peaks[i].fwhm > narrow.peaks[i].fwhm)) return false;
    return true;
}

// Symmetric exclusion around the pole. The excluded piece is
// -2 f'(w) eps - f'''(w) eps^3 / 3 - ..., so Richardson steps remove eps, then eps^3.
double excluded_pv(const ResponseKernel& k, double omega, double eps) {
    auto f = [&](double x) { return k.renormalized_density(x) / (omega - x); };
    auto part = [&](double e) {
        std::vector<double> lo{0.0, omega - e}, hi{omega + e, k.cutoff()};
        for (double b : k.breakpoints()) {
            if (b < omega - e) lo.push_back(b);
            if (b > omega + e) hi.push_back(b);
        }
        return ref::integrate(f, lo) + ref::integrate(f, hi);
    };
    const double r1 = part(eps), r2 = part(eps / 2.0), r4 = part(eps / 4.0);
    const double a = 2.0 * r2 - r1, b = 2.0 * r4 - r2;
    return (8.0 * b - a) / 7.0;
}

} // namespace

int main() {
    criterion("renormalization", [] {
        Environment bare;
        bool pass = renormalize(bare).eta == 1.0;
        double lo = 1.0, worst = 0.0;
        std::vector<std::string> ids = figure_presets();
        ids.push_back("fig2");
        ids.push_back("table1");
        for (const auto& id : ids)
            for (const auto& c : preset(id)) {
                const auto r = renormalize(c.environment);
                lo = std::min(lo, r.eta);
                worst = std::max(worst, r.residual);
                pass = pass && r.eta > 0.9 && r.eta <= 1.0 && r.residual <= 1e-12;
            }
        return Outcome{pass, fmt("uncoupled eta=1; min eta=%.12f, max residual=%.2e (<= 1e-12)", lo, worst)};
    }, 1.0);

    criterion("rwa-splitting", [] {
        ExperimentConfig c;
        c.environment.cavity = LorentzianCavity{0.2, 1e-3, 10.0};
        c.scan.half_span = default_half_span(c.environment);
        const auto r = analyse(c, Mode::rwa);
        const double rel = std::abs(r.splitting / 0.4 - 1.0);
        return Outcome{r.peak_count == 2 && rel <= 0.05 && std::abs(r.height_ratio - 1.0) <= 0.02,
                       fmt("n=%d splitting=%.6f GHz (2g=0.4, dev %.2e <= 0.05), hr=%.6f (1 +- 0.02)", r.peak_count,
                           r.splitting, rel, r.height_ratio)};
    }, 5.0);

    const auto f4a = series("fig4a"), f4b = series("fig4b");
    const auto f5a = series("fig5a"), f5b = series("fig5b");

    criterion("fig4a-orderings", [&] { return low_orderings(f4a); });
    criterion("fig4b-orderings", [&] { return ohmic_orderings(f4b, f4a); });

    criterion("fig5-robustness", [&] {
        const auto a = low_orderings(f5a), b = ohmic_orderings(f5b, f5a);
        bool wide = true;
        for (int i = 0; i < 3; ++i) wide = wide && broader(f5a[i], f4a[i]) && broader(f5b[i], f4b[i]);
        return Outcome{a.pass && b.pass && wide, fmt("low: %s; ohmic: %s; broader fwhm at Q=1e3: %s",
                                                     a.pass ? "ok" : "violated", b.pass ? "ok" : "violated",
                                                     wide ? "yes" : "no")};
    });

    criterion("table1", [] {
        const auto configs = preset("table1");
        std::vector<ExperimentResult> results;
        for (const auto& c : configs) {
            ExperimentResult r;
            r.config = c;
            ModeResult m;
            m.peaks = analyse(c);
            r.modes.push_back(m);
            results.push_back(std::move(r));
        }
        const auto cells = table1_cells(results);
        int matched = 0;
        std::string bad;
        for (const auto& c : cells) {
            matched += c.match;
            if (!c.match)
                bad += fmt(" %s/Q%g/%s=%s(ref %s)", c.bath == BathKind::ohmic ? "ohmic" : "low", c.quality,
                           c.coupling.c_str(), c.report.classification.c_str(), c.reference.c_str());
        }
        return Outcome{matched == static_cast<int>(cells.size()),
                       fmt("%d/%zu cells match;", matched, cells.size()) + bad};
    });

    // Response grids of every figure config, sampled once and shared by the two FFT checks.
    struct Sampled {
        std::string name;
        double t_max;
        ResponseGrid grid;
    };
    std::vector<Sampled> sampled;

    criterion("factorization", [&] {
        double worst = 0.0, slowest = 0.0;
        std::string where, slow_id;
        for (const auto& id : figure_presets()) {
            const auto t0 = std::chrono::steady_clock::now();
            for (const auto& c : preset(id))
                for (Mode m : modes_of(c.mode)) {
                    sampled.push_back({c.name, c.dynamics.t_max, sample_response(ResponseKernel::make(c.environment, m))});
                    const auto rep = factorization_check(sampled.back().grid, c.dynamics.t_max);
                    if (rep.max_deviation > worst) {
                        worst = rep.max_deviation;
                        where = c.name + fmt(" at t=%.1f ns", rep.t_at_max);
                    }
                }
            const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (s > slowest) {
                slowest = s;
                slow_id = id;
            }
        }
        return Outcome{worst <= 1e-4 && slowest < 10.0,
                       fmt("max |K(t) - |chi|^2| = %.3e (<= 1e-4), worst ", worst) + where +
                           fmt("; slowest preset %s %.1f s (< 10 s)", slow_id.c_str(), slowest)};
    });

    criterion("plancherel", [&] {
        double worst = 0.0;
        std::string where;
        for (const auto& s : sampled) {
            const auto p = plancherel_check(s.grid, survival_amplitude(s.grid));
            if (p.relative_difference > worst) {
                worst = p.relative_difference;
                where = s.name;
            }
        }
        return Outcome{!sampled.empty() && worst <= 1e-3,
                       fmt("%zu configs, max relative difference %.3e (<= 1e-3), worst ", sampled.size(), worst) + where};
    });

    criterion("oracle-equivalence", [] {
        const auto cfg = preset("fig3a").at(1);
        const auto& env = cfg.environment;
        OracleSettings s;
        s.modes_per_bath = 2000;
        const auto run = run_oracle(env, Mode::full, s);
        const auto kernel = matched_kernel(env, Mode::full, s);
        OracleSpectrumOptions so;
        so.lo = env.delta - cfg.scan.half_span;
        so.hi = env.delta + cfg.scan.half_span;
        const auto spo = oracle_spectrum(run.trace, env, Mode::full, so);
        std::vector<double> grid;
        for (const auto& x : spo.samples) grid.push_back(x.omega);
        const auto spa = emission_spectrum(kernel, grid);
        double pmax = 0.0;
        for (const auto& x : spa.samples) pmax = std::max(pmax, x.power);
        double shape = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double pa = spa.samples[i].power / pmax;
            if (pa >= 0.1) shape = std::max(shape, std::abs(spo.samples[i].power - pa) / pa);
        }
        const auto ro = find_peaks(spo), ra = find_peaks(spa);
        const double step = grid[1] - grid[0];
        double offset = ro.peak_count == ra.peak_count && ra.peak_count > 0 ? 0.0 : INFINITY;
        for (std::size_t i = 0; std::isfinite(offset) && i < ro.peaks.size(); ++i)
            offset = std::max(offset, std::abs(ro.peaks[i].position - ra.peaks[i].position));
        const auto tr = survival_amplitude(kernel);
        double pop = 0.0;
        for (std::size_t i = 0; i < run.trace.time.size(); ++i)
            pop = std::max(pop, std::abs(std::norm(run.trace.chi[i]) - std::norm(amplitude_at(tr, run.trace.time[i]))));
        return Outcome{offset <= step && shape <= 0.05 && pop <= 0.02,
                       fmt("peaks %d/%d, max offset %.2e GHz (step %.2e); shape dev %.2e (<= 0.05) where P >= 0.1 "
                           "Pmax; |chi|^2 dev %.2e (<= 0.02)",
                           ro.peak_count, ra.peak_count, offset, step, shape, pop)};
    }, 60.0);

    criterion("pv-quadrature", [] {
        QuadratureSettings qs;
        qs.tail_correction = false;
        double worst = 0.0;
        std::string where;
        for (const auto& [id, idx] : std::vector<std::pair<std::string, int>>{
                 {"fig3a", 1}, {"fig4a", 1}, {"fig4b", 2}, {"fig5a", 2}}) {
            const auto c = preset(id).at(idx);
            const auto k = ResponseKernel::make(c.environment, Mode::full, qs);
            const double lambda = std::get<LorentzianCavity>(c.environment.cavity).lambda;
            for (double w : uniform_grid(c.environment.delta - c.scan.half_span, c.environment.delta + c.scan.half_span, 50)) {
                const double r = k.real_shift(w), e = excluded_pv(k, w, 0.05 * lambda);
                const double rel = std::abs(r - e) / std::abs(e);
                if (rel > worst) {
                    worst = rel;
                    where = c.name + fmt(" at %.6f GHz", w);
                }
            }
        }
        return Outcome{worst <= 1e-4, fmt("max relative difference %.3e (<= 1e-4), worst ", worst) + where};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
