#include "qcse/renormalization.hpp"

#include <algorithm>
#include <cmath>

#include "qcse/quadrature.hpp"

namespace qcse {

namespace {

constexpr double kCutoffTolerance = 1e-14;

} // namespace

double self_consistency_integral(const BathSpec& bath, double delta, double eta) {
    if (!is_coupled(bath)) return 0.0;
    const double shift = eta * delta;
    auto integrand = [&](double w) {
        const double s = w + shift;
        return 2.0 * eval_density(bath, w, delta) / (s * s);
    };
    const double cutoff = integrable_cutoff(bath, delta, kCutoffTolerance);

    auto pts = feature_points(bath, delta);
    pts.push_back(shift);
    const TailBound tb = tail_bound(bath, delta);
    for (double w = tb.onset; w < cutoff; w *= 10.0) pts.push_back(w);
    pts = quad::clip_points(std::move(pts), 0.0, cutoff);

    const auto body = quad::integrate(integrand, pts, {1e-14, 0.0, 4000});
    // Asymptotic tail: 2 A w^(-q-2)
    const double q = tb.exponent;
    const double tail = 2.0 * tb.amplitude * std::pow(cutoff, -q - 1.0) / (q + 1.0);
    return body.value + tail;
}

EtaSolution solve_eta(const BathSpec& bath, double delta, const EtaOptions& opt) {
    if (!(delta > 0.0)) throw ConfigError("solve_eta: delta must be > 0");
    if (!(opt.tolerance > 0.0)) throw ConfigError("solve_eta: tolerance must be > 0");
    validate(bath, delta);

    EtaSolution sol;
    if (!is_coupled(bath)) return sol;

    double eta = 1.0;
    double damping = 1.0;
    double last_step = 0.0;
    for (int it = 1; it <= opt.max_iterations; ++it) {
        const double integral = self_consistency_integral(bath, delta, eta);
        const double residual = std::abs(std::log(eta) + integral);
        if (residual <= opt.tolerance) {
            sol.eta = eta;
            sol.iterations = it - 1;
            sol.residual = residual;
            return sol;
        }
        const double target = std::exp(-integral);
        if (it == 1 && target < opt.validity_floor)
            throw RenormalizationError("coupling too strong: first iterate drives eta below " +
                                           std::to_string(opt.validity_floor),
                                       target, residual);
        const double step = target - eta;
        if (last_step != 0.0 && step * last_step < 0.0) damping = 0.5;
        eta += damping * step;
        last_step = step;
        if (!(eta > 0.0 && eta <= 1.0))
            throw RenormalizationError("iterate left (0, 1]", eta, residual);
    }
    const double residual =
        std::abs(std::log(eta) + self_consistency_integral(bath, delta, eta));
    throw RenormalizationError("no convergence after " + std::to_string(opt.max_iterations) +
                                   " iterations",
                               eta, residual);
}

RenormalizationResult renormalize(const Environment& env, const EtaOptions& opt) {
    validate(env);
    const auto s1 = solve_eta(env.intrinsic, env.delta, opt);
    const auto s2 = solve_eta(env.cavity, env.delta, opt);
    RenormalizationResult r;
    r.eta1 = s1.eta;
    r.eta2 = s2.eta;
    r.eta = s1.eta * s2.eta;
    r.iterations = std::max(s1.iterations, s2.iterations);
    r.residual = std::max(s1.residual, s2.residual);
    return r;
}

} // namespace qcse
