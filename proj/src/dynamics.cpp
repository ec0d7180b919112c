#include "qcse/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qcse/errors.hpp"
#include "fft.hpp"

namespace qcse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

struct CausalInverse {
    std::vector<cplx> values;  // t_n = n dt, n = 0..N/2-1, without the pole terms
    double violation{0.0};
};

// Analytic part of F(nu) = i / (nu - s(nu) + i g(nu)):
//   i / (nu - e + i w) + i c / (nu - e + i ws)^2
// e and w match the outermost grid edges so that the remainder falls off as
// nu^-2 with an odd coefficient only; c removes the even part left by the width floor.
struct PoleTerms {
    double e{0.0};
    double w{0.0};
    cplx c{};
    double ws{1.0};

    // (1/2 pi) int poles(nu) exp(-i nu t) dnu for t >= 0
    cplx inverse(double t) const {
        return std::exp(cplx{-w * t, -e * t}) - kI * c * t * std::exp(cplx{-ws * t, -e * t});
    }
};

PoleTerms fit_poles(double s_lo, double s_hi, double g_lo, double g_hi, double dnu, double span, bool coupled) {
    PoleTerms p;
    p.ws = span / 10.0;
    if (!coupled) return p;
    const double g_edge = 0.5 * (g_lo + g_hi);
    p.e = 0.5 * (s_lo + s_hi);
    p.w = std::max(g_edge, 20.0 * dnu);
    p.c = cplx{0.0, p.w - g_edge};
    return p;
}

// F - poles; identical kernels cancel exactly.
cplx remainder(double nu, double s, double g, const PoleTerms& p) {
    const cplx num{s - p.e, p.w - g};
    cplx r;
    if (!std::isfinite(s))  // log edge of the support, where G vanishes
        r = -kI / cplx{nu - p.e, p.w};
    else if (num != cplx{})
        r = kI * num / (cplx{nu - s, g} * cplx{nu - p.e, p.w});
    if (p.c != cplx{}) {
        const cplx d2 = cplx{nu - p.e, p.ws};
        r -= kI * p.c / (d2 * d2);
    }
    return r;
}

// (1/2 pi) int F(nu) exp(-i nu t) dnu for samples F(nu_j), nu_j = (j - N/2) dnu, j = 0..N.
// Output n holds t = n dt for n < N/2 and t = (n - N) dt above.
std::vector<cplx> fft_inverse(const std::vector<cplx>& f, double dnu) {
    const int n_pts = static_cast<int>(f.size()) - 1;
    detail::FftBuffer buf(static_cast<std::size_t>(n_pts), FFTW_FORWARD, "dynamics");
    // Periodic trapezoid: the two end samples share one slot.
    buf.data[0] = 0.5 * (f.front() + f.back());
    for (int j = 1; j < n_pts; ++j) buf.data[j] = f[j];
    buf.execute();

    const double scale = dnu / kTwoPi;
    std::vector<cplx> out(n_pts);
    for (int n = 0; n < n_pts; ++n) out[n] = ((n % 2 == 0) ? scale : -scale) * buf.data[n];
    return out;
}

bool any_coupling(const ResponseGrid& grid) {
    auto nonzero = [](const std::vector<double>& v) {
        return std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; });
    };
    return nonzero(grid.r_shift) || nonzero(grid.gamma) || nonzero(grid.coarse.r_shift) ||
           nonzero(grid.coarse.gamma);
}

// One kernel F = i / (nu - s + i g) where (s, g) at index j of a sample set
// are produced by `sampler`. Returns the causal inverse on the fine time grid.
template <class Sampler>
CausalInverse invert(const ResponseGrid& grid, Sampler sampler, double tolerance, const char* what) {
    const bool coupled = any_coupling(grid);
    const bool two_level = grid.coarse_ratio > 1;
    const ResponseSamples fine{grid.step, grid.points, grid.r_shift, grid.gamma};
    const ResponseSamples& outer = two_level ? grid.coarse : fine;

    // Edge samples, stepping inward past the log singularities at 0 and at the cutoff.
    int j_lo = 0, j_hi = outer.points;
    while (j_lo < j_hi && !std::isfinite(sampler(outer, j_lo).first)) ++j_lo;
    while (j_hi > j_lo && !std::isfinite(sampler(outer, j_hi).first)) --j_hi;
    const auto lo = sampler(outer, j_lo);
    const auto hi = sampler(outer, j_hi);
    const auto poles = fit_poles(lo.first, hi.first, lo.second, hi.second, grid.step, outer.step * outer.points,
                                 coupled);

    auto sampled = [&](const ResponseSamples& level, bool inner) {
        std::vector<cplx> f(level.points + 1);
        for (int j = 0; j <= level.points; ++j) {
            const double nu = (j - level.points / 2) * level.step;
            const double phi = two_level ? grid.partition(nu) : 1.0;
            const double weight = inner ? phi : 1.0 - phi;
            if (weight == 0.0) continue;
            const auto [sj, gj] = sampler(level, j);
            f[j] = weight * remainder(nu, sj, gj, poles);
        }
        return f;
    };

    auto total = fft_inverse(sampled(fine, true), grid.step);
    const long n_fine = grid.points;
    double tail = 0.0;
    if (two_level) {
        const auto far = fft_inverse(sampled(grid.coarse, false), grid.coarse.step);
        const long n_far = grid.coarse.points;
        const long m = grid.coarse_ratio;
        for (long n = 0; n < n_fine; ++n) {
            const long steps = n < n_fine / 2 ? n : n - n_fine;  // signed time index
            const long k = steps * m;
            if (k >= n_far / 2 || k < -n_far / 2) continue;
            total[n] += far[k >= 0 ? k : k + n_far];
        }
        // The broad part must have decayed by the end of its own window.
        for (long k = 3 * n_far / 8; k < n_far / 2; ++k) tail = std::max(tail, std::abs(far[k]));
    }
    CausalInverse out;
    out.values.assign(total.begin(), total.begin() + n_fine / 2);
    for (long n = n_fine / 2; n < n_fine; ++n) out.violation = std::max(out.violation, std::abs(total[n]));
    out.violation = std::max(out.violation, tail);
    const double dt = grid.time_step();
    for (std::size_t n = 0; n < out.values.size(); ++n) out.values[n] += poles.inverse(static_cast<double>(n) * dt);

    if (std::any_of(total.begin(), total.end(), [](const cplx& z) { return !std::isfinite(std::abs(z)); }))
        throw NumericError("dynamics", std::string(what) + ": non-finite output from the inversion");
    if (out.violation > tolerance)
        throw NumericError("dynamics", std::string(what) + ": t < 0 output " + std::to_string(out.violation) +
                                           " exceeds " + std::to_string(tolerance) +
                                           "; the frequency grid is too coarse or too narrow");
    return out;
}

std::vector<double> sample_r(const ResponseKernel& k, double center, double step, int points) {
    std::vector<double> r(points + 1);
    for (int j = 0; j <= points; ++j) r[j] = k.real_shift(center + (j - points / 2) * step);
    return r;
}

std::vector<double> sample_gamma(const ResponseKernel& k, double center, double step, int points) {
    std::vector<double> g(points + 1);
    for (int j = 0; j <= points; ++j) g[j] = k.gamma(center + (j - points / 2) * step);
    return g;
}

} // namespace

double ResponseGrid::time_step() const noexcept {
    return kTwoPi / (points * step);
}

double ResponseGrid::partition(double nu) const noexcept {
    const double span = points * step;
    const double a = 0.3 * span, b = 0.45 * span;
    const double x = std::abs(nu);
    if (x <= a) return 1.0;
    if (x >= b) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (x - a) / (b - a)));
}

double default_fft_span(const ResponseKernel& kernel) {
    const Environment& env = kernel.environment();
    double scale = 0.0;
    if (const auto* cav = std::get_if<LorentzianCavity>(&env.cavity)) scale = std::max({cav->g, cav->lambda});
    scale = std::max(scale, kernel.channel_gamma(0, kernel.qubit_frequency()));
    // Floor of Delta / 2 keeps dt near 1 ns so that the short transient from
    // the broad part of the bath is resolved in time.
    return std::max(40.0 * scale, 0.5 * env.delta);
}

ResponseGrid sample_response(const ResponseKernel& kernel, const FftGridOptions& opt) {
    if (opt.points < 16 || opt.points % 2 != 0) throw ConfigError("sample_response: points must be even and >= 16");
    if (opt.coarse_points < 16 || opt.coarse_points % 2 != 0)
        throw ConfigError("sample_response: coarse_points must be even and >= 16");
    const double span = opt.span > 0.0 ? opt.span : default_fft_span(kernel);
    ResponseGrid g;
    g.center = kernel.qubit_frequency();
    g.points = opt.points;
    g.step = span / opt.points;
    g.r_shift = sample_r(kernel, g.center, g.step, g.points);
    g.gamma = sample_gamma(kernel, g.center, g.step, g.points);

    const double wide = opt.coarse_span > 0.0 ? opt.coarse_span : 8.0 * kernel.environment().delta;
    const int ratio = static_cast<int>(std::ceil(wide / span));
    if (ratio > 1) {
        g.coarse_ratio = ratio;
        g.coarse.points = opt.coarse_points;
        g.coarse.step = ratio * span / opt.coarse_points;
        g.coarse.r_shift = sample_r(kernel, g.center, g.coarse.step, g.coarse.points);
        g.coarse.gamma = sample_gamma(kernel, g.center, g.coarse.step, g.coarse.points);
    }
    return g;
}

AmplitudeTrace survival_amplitude(const ResponseGrid& grid, double tolerance) {
    auto sampler = [](const ResponseSamples& l, int j) { return std::pair{l.r_shift[j], l.gamma[j]}; };
    const auto inv = invert(grid, sampler, tolerance, "survival_amplitude");

    AmplitudeTrace tr;
    tr.frequency = grid.center;
    tr.causality_violation = inv.violation;
    const double dt = grid.time_step();
    tr.time.resize(inv.values.size());
    tr.amplitude.resize(inv.values.size());
    tr.population.resize(inv.values.size());
    for (std::size_t k = 0; k < inv.values.size(); ++k) {
        const double t = static_cast<double>(k) * dt;
        tr.time[k] = t;
        tr.amplitude[k] = inv.values[k] * std::polar(1.0, -grid.center * t);
        tr.population[k] = std::norm(tr.amplitude[k]);
    }
    return tr;
}

AmplitudeTrace survival_amplitude(const ResponseKernel& kernel, const FftGridOptions& opt) {
    return survival_amplitude(sample_response(kernel, opt), opt.causality_tolerance);
}

cplx amplitude_at(const AmplitudeTrace& trace, double t) {
    if (t < 0.0) return {};
    const auto& x = trace.time;
    const auto& y = trace.amplitude;
    if (x.size() < 4) throw ConfigError("amplitude_at: trace too short");
    const double dt = x[1] - x[0];
    if (t > x.back()) throw ConfigError("amplitude_at: t beyond the trace");
    // Interpolate in the rotating frame, where chi varies slowly.
    auto rot = [&](std::ptrdiff_t k) {
        k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(x.size()) - 1);
        return y[k] * std::polar(1.0, trace.frequency * x[k]);
    };
    const double u = t / dt;
    const auto k = static_cast<std::ptrdiff_t>(std::floor(u));
    const double s = u - static_cast<double>(k);
    const cplx p0 = rot(k - 1), p1 = rot(k), p2 = rot(k + 1), p3 = rot(k + 2);
    // Catmull-Rom
    const cplx v = p1 + 0.5 * s * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + s * (3.0 * (p1 - p2) + p3 - p0)));
    return v * std::polar(1.0, -trace.frequency * t);
}

AmplitudeTrace resample(const AmplitudeTrace& trace, std::span<const double> times) {
    AmplitudeTrace out;
    out.frequency = trace.frequency;
    out.causality_violation = trace.causality_violation;
    for (double t : times) {
        const cplx a = amplitude_at(trace, t);
        out.time.push_back(t);
        out.amplitude.push_back(a);
        out.population.push_back(std::norm(a));
    }
    return out;
}

AmplitudeTrace truncate(const AmplitudeTrace& trace, double t_max) {
    AmplitudeTrace out = trace;
    const auto end = std::upper_bound(out.time.begin(), out.time.end(), t_max) - out.time.begin();
    out.time.resize(end);
    out.amplitude.resize(end);
    out.population.resize(end);
    return out;
}

KernelTraces population_kernel(const ResponseGrid& grid, double tolerance) {
    // nu -> -nu is j -> N - j on either sample set.
    auto plus = [](const ResponseSamples& l, int j) { return std::pair{l.r_shift[j], l.gamma[j]}; };
    auto minus = [](const ResponseSamples& l, int j) {
        return std::pair{-l.r_shift[l.points - j], l.gamma[l.points - j]};
    };
    auto pop = [](const ResponseSamples& l, int j) {
        const int k = l.points - j;
        return std::pair{l.r_shift[j] - l.r_shift[k], l.gamma[j] + l.gamma[k]};
    };
    const auto ip = invert(grid, plus, tolerance, "population_kernel");
    const auto im = invert(grid, minus, tolerance, "population_kernel");
    const auto ik = invert(grid, pop, tolerance, "population_kernel");

    KernelTraces kt;
    kt.causality_violation = std::max({ip.violation, im.violation, ik.violation});
    const double dt = grid.time_step();
    for (std::size_t k = 0; k < ik.values.size(); ++k) kt.time.push_back(static_cast<double>(k) * dt);
    kt.plus = ip.values;
    kt.minus = im.values;
    kt.population.resize(ik.values.size());
    for (std::size_t k = 0; k < ik.values.size(); ++k) kt.population[k] = ik.values[k].real();
    return kt;
}

FactorizationReport factorization_check(const ResponseGrid& grid, double t_max) {
    const auto kt = population_kernel(grid);
    FactorizationReport rep;
    for (std::size_t k = 0; k < kt.time.size(); ++k) {
        if (t_max > 0.0 && kt.time[k] > t_max) break;
        const double dev = std::abs(kt.population[k] - std::norm(kt.plus[k]));
        if (dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.t_at_max = kt.time[k];
        }
        rep.conjugacy_deviation = std::max(rep.conjugacy_deviation, std::abs(kt.plus[k] - std::conj(kt.minus[k])));
    }
    return rep;
}

PlancherelReport plancherel_check(const ResponseGrid& grid, const AmplitudeTrace& trace) {
    const bool two_level = grid.coarse_ratio > 1;
    auto power = [&](const ResponseSamples& l, int j) {
        const double nu = (j - l.points / 2) * l.step;
        const double d = nu - l.r_shift[j];
        return 1.0 / (d * d + l.gamma[j] * l.gamma[j]);
    };
    auto trapezoid = [&](const ResponseSamples& l, bool inner) {
        double sum = 0.0;
        for (int j = 0; j <= l.points; ++j) {
            const double nu = (j - l.points / 2) * l.step;
            const double phi = two_level ? grid.partition(nu) : 1.0;
            const double w = (j == 0 || j == l.points) ? 0.5 : 1.0;
            sum += w * (inner ? phi : 1.0 - phi) * power(l, j);
        }
        return sum * l.step;
    };
    const ResponseSamples fine{grid.step, grid.points, grid.r_shift, grid.gamma};
    const ResponseSamples& outer = two_level ? grid.coarse : fine;
    double total = trapezoid(fine, true);
    if (two_level) total += trapezoid(grid.coarse, false);
    // Beyond the outermost grid P falls off as 1/nu^2.
    total += (power(outer, 0) + power(outer, outer.points)) * 0.5 * outer.points * outer.step;

    PlancherelReport rep;
    rep.spectral = total / kTwoPi;
    const auto& p = trace.population;
    const double dt = trace.time[1] - trace.time[0];
    if (p.size() < 3) throw ConfigError("plancherel_check: trace too short");
    double acc = 0.5 * p.front();
    for (std::size_t k = 1; k < p.size(); ++k) acc += p[k];
    // Euler-Maclaurin end correction at t = 0; the far end has decayed.
    const double slope0 = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * dt);
    rep.temporal = acc * dt + dt * dt * slope0 / 12.0;
    rep.relative_difference = std::abs(rep.spectral - rep.temporal) / std::max(rep.spectral, rep.temporal);
    return rep;
}

std::array<double, 2> QubitState::eigenvalues() const {
    const double a = rho[0].real(), d = rho[3].real();
    const double r = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(rho[1]));
    return {0.5 * (a + d) - r, 0.5 * (a + d) + r};
}

QubitState QubitState::excited() {
    return {};
}

QubitState QubitState::ground() {
    QubitState s;
    s.rho = {cplx{}, cplx{}, cplx{}, cplx{1.0}};
    return s;
}

void validate(const QubitState& s, double tolerance) {
    if (std::abs(s.trace() - 1.0) > tolerance) throw ConfigError("QubitState: trace differs from 1");
    if (std::abs(s.rho[1] - std::conj(s.rho[2])) > tolerance || std::abs(s.rho[0].imag()) > tolerance ||
        std::abs(s.rho[3].imag()) > tolerance)
        throw ConfigError("QubitState: not Hermitian");
    if (s.eigenvalues()[0] < -tolerance) throw ConfigError("QubitState: negative eigenvalue");
}

QubitState evolve_density_matrix(const QubitState& initial, const AmplitudeTrace& trace, double eta, double t) {
    validate(initial);
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("evolve_density_matrix: eta must lie in (0, 1]");
    if (t < 0.0) throw ConfigError("evolve_density_matrix: t must be >= 0");
    cplx chi = t == 0.0 ? cplx{1.0} : amplitude_at(trace, t);
    if (std::abs(chi) > 1.0) chi /= std::abs(chi);

    const double p1 = std::norm(chi) * initial(0, 0).real();
    QubitState r;
    r.rho[0] = p1;
    r.rho[3] = 1.0 - p1;
    r.rho[1] = chi * initial(0, 1);
    r.rho[2] = std::conj(r.rho[1]);

    const double a = 0.5 * (1.0 + eta), b = 0.5 * (1.0 - eta);
    QubitState out;
    out.rho[0] = a * r.rho[0] + b * r.rho[3];
    out.rho[3] = a * r.rho[3] + b * r.rho[0];
    out.rho[1] = a * r.rho[1] + b * r.rho[2];
    out.rho[2] = a * r.rho[2] + b * r.rho[1];
    return out;
}

} // namespace qcse
