#include "qcse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qcse/errors.hpp"
#include "fft.hpp"

namespace qcse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

int side_count(double length, double h0, double r) {
    if (length <= 0.0) return 0;
    if (r == 1.0) return static_cast<int>(std::ceil(length / h0 - 1e-12));
    return static_cast<int>(std::ceil(std::log1p(length * (r - 1.0) / h0) / std::log(r) - 1e-12));
}

// n cells growing by r away from `start`, scaled to cover exactly `length`.
std::vector<double> side_widths(double length, double h0, double r, int n) {
    std::vector<double> w(n);
    double h = h0;
    for (int k = 0; k < n; ++k, h *= r) w[k] = h;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x *= length / total;
    return w;
}

std::vector<double> uniform_edges(double lo, double hi, int n) {
    std::vector<double> e(n + 1);
    for (int k = 0; k <= n; ++k) e[k] = lo + (hi - lo) * k / n;
    e.back() = hi;
    return e;
}

} // namespace

std::vector<double> cell_edges(const DiscretizeOptions& opt) {
    if (opt.modes < 2) throw ConfigError("discretize: need at least 2 modes");
    if (!(opt.hi > opt.lo) || opt.lo < 0.0) throw ConfigError("discretize: need 0 <= lo < hi");
    if (opt.placement == Placement::uniform) return uniform_edges(opt.lo, opt.hi, opt.modes);

    const double core_lo = std::max(opt.lo, opt.core_center - opt.core_half_width);
    const double core_hi = std::min(opt.hi, opt.core_center + opt.core_half_width);
    if (!(core_hi > core_lo) || !(opt.core_half_width > 0.0)) return uniform_edges(opt.lo, opt.hi, opt.modes);

    int n_core = opt.modes / 2;
    const int n_rem = opt.modes - n_core;
    const double h0 = (core_hi - core_lo) / n_core;
    const double left = core_lo - opt.lo, right = opt.hi - core_hi;

    int n_left = 0, n_right = 0;
    double r = 1.0;
    if (side_count(left, h0, 1.0) + side_count(right, h0, 1.0) <= n_rem) {
        // Uniform at the core spacing already fits; share the cells by length.
        const double total = left + right;
        if (total > 0.0) {
            n_left = left > 0.0 ? std::max(1, static_cast<int>(std::lround(n_rem * left / total))) : 0;
            n_right = right > 0.0 ? std::max(1, n_rem - n_left) : 0;
            if (right <= 0.0) n_left = n_rem;
        }
        auto e = uniform_edges(core_lo, core_hi, n_core + (total > 0.0 ? 0 : n_rem));
        std::vector<double> out;
        if (n_left > 0) {
            auto l = uniform_edges(opt.lo, core_lo, n_left);
            out.insert(out.end(), l.begin(), l.end() - 1);
        }
        out.insert(out.end(), e.begin(), e.end());
        if (n_right > 0) {
            auto rr = uniform_edges(core_hi, opt.hi, n_right);
            out.insert(out.end(), rr.begin() + 1, rr.end());
        }
        return out;
    }
    double a = 1.0, b = 2.0;
    while (side_count(left, h0, b) + side_count(right, h0, b) > n_rem) b *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if (side_count(left, h0, m) + side_count(right, h0, m) > n_rem)
            a = m;
        else
            b = m;
    }
    r = b;
    n_left = side_count(left, h0, r);
    n_right = side_count(right, h0, r);
    n_core += n_rem - n_left - n_right;

    std::vector<double> out;
    const auto wl = side_widths(left, h0, r, n_left);
    double x = opt.lo;
    for (int k = n_left - 1; k >= 0; --k) {
        out.push_back(x);
        x += wl[k];
    }
    auto core = uniform_edges(core_lo, core_hi, n_core);
    out.insert(out.end(), core.begin(), core.end());
    const auto wr = side_widths(right, h0, r, n_right);
    x = core_hi;
    for (int k = 0; k < n_right; ++k) {
        x += wr[k];
        out.push_back(k + 1 == n_right ? opt.hi : x);
    }
    return out;
}

DiscretizedBath discretize(const BathSpec& bath, double eta_i, double delta, Mode mode, const DiscretizeOptions& opt) {
    validate(bath, delta);
    const auto edges = cell_edges(opt);
    DiscretizedBath out;
    out.source = kind_of(bath);
    const std::size_t n = edges.size() - 1;
    out.omega.resize(n);
    out.width.resize(n);
    out.coupling.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = 0.5 * (edges[k] + edges[k + 1]);
        const double dw = edges[k + 1] - edges[k];
        const double c = mode == Mode::full ? coupling_renorm_factor(w, eta_i, delta) : 1.0;
        out.omega[k] = w;
        out.width[k] = dw;
        out.coupling[k] = c * std::sqrt(eval_density(bath, w, delta) * dw);
    }
    if (const auto* cav = std::get_if<LorentzianCavity>(&bath)) {
        const auto inside = std::count_if(out.omega.begin(), out.omega.end(), [&](double w) {
            return std::abs(w - cav->omega_cav) <= 5.0 * cav->lambda;
        });
        if (inside < 20)
            throw ConfigError("discretize: only " + std::to_string(inside) +
                              " modes within 5 lambda of the cavity; raise K or narrow the band");
    }
    return out;
}

double coupling_sum(const DiscretizedBath& bath) {
    double s = 0.0;
    for (double g : bath.coupling) s += g * g;
    return s;
}

DiscretizedBath single_mode(double omega, double coupling) {
    DiscretizedBath b;
    b.omega = {omega};
    b.width = {0.0};
    b.coupling = {coupling};
    return b;
}

OracleTrace evolve(std::span<const DiscretizedBath> baths, double qubit_frequency, const EvolveOptions& opt) {
    if (!(opt.t_max > 0.0) || !(opt.sample_dt > 0.0)) throw ConfigError("evolve: t_max and sample_dt must be > 0");
    std::vector<double> g, d;
    for (const auto& b : baths)
        for (std::size_t k = 0; k < b.omega.size(); ++k) {
            g.push_back(b.coupling[k]);
            d.push_back(b.omega[k] - qubit_frequency);
        }
    const std::size_t n = g.size();

    double max_detuning = 0.0;
    for (double x : d) max_detuning = std::max(max_detuning, std::abs(x));
    int sub = 1;
    if (opt.dt > 0.0)
        sub = std::max(1, static_cast<int>(std::lround(opt.sample_dt / opt.dt)));
    else if (max_detuning > 0.0)
        sub = std::max(1, static_cast<int>(std::ceil(opt.sample_dt * max_detuning / 0.1)));
    const double h = opt.sample_dt / sub;
    const long samples = static_cast<long>(std::floor(opt.t_max / opt.sample_dt + 1e-9));

    std::vector<cplx> beta(n), p(n), q(n), q2(n);
    cplx q1_sum{}, g2_sum{};
    for (std::size_t k = 0; k < n; ++k) {
        q[k] = std::polar(1.0, -d[k] * 0.5 * h);
        q2[k] = q[k] * q[k];
        q1_sum += g[k] * g[k] * q[k];
        g2_sum += g[k] * g[k];
    }

    OracleTrace tr;
    tr.frequency = qubit_frequency;
    tr.dt = h;
    cplx chi = opt.chi0;
    const double norm0 = std::norm(opt.chi0);
    tr.time.push_back(0.0);
    tr.chi.push_back(chi);

    for (long s = 0; s < samples; ++s) {
        const double t0 = static_cast<double>(s) * opt.sample_dt;
        for (std::size_t k = 0; k < n; ++k) p[k] = std::polar(1.0, -d[k] * t0);
        for (int step = 0; step < sub; ++step) {
            cplx s0{}, s_mid{}, s_end{};
            for (std::size_t k = 0; k < n; ++k) {
                const cplx x = g[k] * p[k] * beta[k];
                s0 += x;
                s_mid += x * q[k];
                s_end += x * q2[k];
            }
            const cplx k1 = -kI * s0;
            const cplx chi2 = chi + 0.5 * h * k1;
            const cplx k2 = -kI * (s_mid - kI * 0.5 * h * chi * q1_sum);
            const cplx chi3 = chi + 0.5 * h * k2;
            const cplx k3 = -kI * (s_mid - kI * 0.5 * h * chi2 * g2_sum);
            const cplx chi4 = chi + h * k3;
            const cplx k4 = -kI * (s_end - kI * h * chi3 * q1_sum);
            for (std::size_t k = 0; k < n; ++k) {
                const cplx acc = chi + 2.0 * std::conj(q[k]) * (chi2 + chi3) + std::conj(q2[k]) * chi4;
                beta[k] -= kI * (h * g[k] / 6.0) * std::conj(p[k]) * acc;
                p[k] *= q2[k];
            }
            chi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            ++tr.steps;
        }
        double norm = std::norm(chi);
        for (const auto& b : beta) norm += std::norm(b);
        const double drift = norm0 > 0.0 ? std::abs(norm - norm0) / norm0 : norm;
        tr.max_norm_drift = std::max(tr.max_norm_drift, drift);
        if (drift > opt.norm_tolerance)
            throw NumericError("oracle", "norm drift " + std::to_string(drift) + " at t = " +
                                             std::to_string(t0 + opt.sample_dt) + " ns; use a smaller dt");
        tr.time.push_back(static_cast<double>(s + 1) * opt.sample_dt);
        tr.chi.push_back(chi);
    }
    tr.final_state.t = tr.time.back();
    tr.final_state.chi = chi;
    tr.final_state.beta = std::move(beta);
    return tr;
}

DiscretizeOptions discretize_options(const Environment& env, BathKind which, double qubit_frequency,
                                     const OracleSettings& settings) {
    DiscretizeOptions o;
    o.modes = settings.modes_per_bath;
    o.lo = 0.0;
    o.hi = settings.band_max > 0.0 ? settings.band_max : 5.0 * env.delta;
    const auto* cav = std::get_if<LorentzianCavity>(&env.cavity);
    const double lambda = cav ? cav->lambda : 0.0;
    const double g = cav ? cav->g : 0.0;
    if (which == BathKind::lorentzian_cavity) {
        o.placement = Placement::graded;
        o.core_center = cav ? cav->omega_cav : env.delta;
        o.core_half_width = 10.0 * lambda;
    } else {
        o.placement = settings.intrinsic_placement;
        o.core_center = qubit_frequency;
        o.core_half_width = std::max(10.0 * lambda, 2.0 * g);
        if (!(o.core_half_width > 0.0)) o.core_half_width = 0.05 * env.delta;
    }
    return o;
}

ResponseKernel matched_kernel(const Environment& env, Mode mode, const OracleSettings& settings) {
    QuadratureSettings q;
    q.cutoff = settings.band_max > 0.0 ? settings.band_max : 5.0 * env.delta;
    q.tail_correction = false;
    return ResponseKernel::make(env, mode, q);
}

OracleRun run_oracle(const Environment& env, Mode mode, const OracleSettings& settings) {
    validate(env);
    OracleRun run;
    run.renormalization = mode == Mode::full ? renormalize(env) : rwa_renormalization();
    const double wq = run.renormalization.eta * env.delta;
    if (is_coupled(env.intrinsic))
        run.baths.push_back(discretize(env.intrinsic, run.renormalization.eta1, env.delta, mode,
                                       discretize_options(env, kind_of(env.intrinsic), wq, settings)));
    if (is_coupled(env.cavity))
        run.baths.push_back(discretize(env.cavity, run.renormalization.eta2, env.delta, mode,
                                       discretize_options(env, BathKind::lorentzian_cavity, wq, settings)));
    run.trace = evolve(run.baths, wq, settings.evolve);
    return run;
}

SpectrumSeries oracle_spectrum(const OracleTrace& trace, const Environment& env, Mode mode,
                               const OracleSpectrumOptions& opt) {
    const std::size_t n = trace.chi.size();
    if (n < 16) throw ConfigError("oracle_spectrum: trace too short");
    if (std::abs(trace.chi.back()) >= opt.decay_threshold)
        throw NumericError("oracle", "insufficient decay: |chi(t_max)| = " + std::to_string(std::abs(trace.chi.back())) +
                                         "; raise t_max");
    double lo = opt.lo, hi = opt.hi;
    if (!(hi > lo)) {
        const double half = default_half_span(env);
        lo = env.delta - half;
        hi = env.delta + half;
    }
    const double h = trace.time[1] - trace.time[0];
    const double res = opt.resolution > 0.0 ? opt.resolution : (hi - lo) / 4000.0;
    std::size_t m = 1;
    while (m < 2 * n || kTwoPi / (static_cast<double>(m) * h) > res) m *= 2;

    detail::FftBuffer buf(m, FFTW_BACKWARD, "oracle");
    const double t_end = trace.time.back();
    const double taper_start = (1.0 - opt.taper_fraction) * t_end;
    for (std::size_t k = 0; k < m; ++k) {
        if (k >= n) {
            buf[k] = 0.0;
            continue;
        }
        const double t = trace.time[k];
        double w = k == 0 ? 0.5 : 1.0;
        if (opt.taper_fraction > 0.0 && t > taper_start)
            w *= 0.5 * (1.0 + std::cos(std::numbers::pi * (t - taper_start) / (t_end - taper_start)));
        buf[k] = w * trace.chi[k];
    }
    buf.execute();

    const double dnu = kTwoPi / (static_cast<double>(m) * h);
    SpectrumSeries series;
    series.mode = mode;
    series.environment = env;
    series.renormalization.eta = trace.frequency / env.delta;
    const long half = static_cast<long>(m / 2);
    double peak = 0.0;
    for (long k = -half; k < half; ++k) {
        const double omega = trace.frequency + static_cast<double>(k) * dnu;
        if (omega < lo || omega > hi) continue;
        const cplx a = h * buf[k >= 0 ? k : k + static_cast<long>(m)];
        SpectrumSample s;
        s.omega = omega;
        s.power = std::norm(a);
        peak = std::max(peak, s.power);
        series.samples.push_back(s);
    }
    if (series.samples.empty()) throw ConfigError("oracle_spectrum: window contains no frequency bins");
    for (auto& s : series.samples) s.power /= peak;
    return series;
}

} // namespace qcse
