#include "qcse/spectral_density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qcse/errors.hpp"
#include "qcse/quadrature.hpp"

namespace qcse {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

} // namespace

BathKind kind_of(const BathSpec& bath) noexcept {
    return std::visit(overloaded{
                          [](const Ohmic&) { return BathKind::ohmic; },
                          [](const LowFrequency&) { return BathKind::low_frequency; },
                          [](const LorentzianCavity&) { return BathKind::lorentzian_cavity; },
                      },
                      bath);
}

std::string_view to_string(BathKind kind) noexcept {
    switch (kind) {
        case BathKind::ohmic: return "ohmic";
        case BathKind::low_frequency: return "low_frequency";
        case BathKind::lorentzian_cavity: return "lorentzian_cavity";
    }
    return "unknown";
}

void validate(const BathSpec& bath, double delta) {
    std::visit(overloaded{
                   [](const Ohmic& b) {
                       require(b.alpha >= 0.0 && std::isfinite(b.alpha), "ohmic: alpha must be >= 0");
                       require(b.omega_c > 0.0 && std::isfinite(b.omega_c), "ohmic: omega_c must be > 0");
                   },
                   [delta](const LowFrequency& b) {
                       require(b.alpha >= 0.0 && std::isfinite(b.alpha), "low_frequency: alpha must be >= 0");
                       require(b.omega_low > 0.0, "low_frequency: omega_low must be > 0");
                       require(b.omega_low < delta, "low_frequency: omega_low must be below delta");
                   },
                   [](const LorentzianCavity& b) {
                       require(b.g >= 0.0 && std::isfinite(b.g), "cavity: g must be >= 0");
                       require(b.lambda > 0.0 && std::isfinite(b.lambda), "cavity: lambda must be > 0");
                       require(b.omega_cav > 0.0 && std::isfinite(b.omega_cav), "cavity: omega_cav must be > 0");
                   },
               },
               bath);
}

void validate(const Environment& env) {
    require(env.delta > 0.0 && std::isfinite(env.delta), "delta must be > 0");
    const auto ik = kind_of(env.intrinsic);
    require(ik == BathKind::ohmic || ik == BathKind::low_frequency,
            "intrinsic bath must be ohmic or low_frequency");
    require(kind_of(env.cavity) == BathKind::lorentzian_cavity, "cavity bath must be lorentzian_cavity");
    validate(env.intrinsic, env.delta);
    validate(env.cavity, env.delta);
}

double eval_density(const BathSpec& bath, double omega, double delta) noexcept {
    if (!(omega >= 0.0)) return 0.0;
    return std::visit(overloaded{
                          [omega](const Ohmic& b) {
                              const double r = omega / b.omega_c;
                              return 2.0 * b.alpha * omega / (1.0 + r * r);
                          },
                          [omega, delta](const LowFrequency& b) {
                              const double x = omega / delta;
                              const double y = b.omega_low / delta;
                              return 2.0 * b.alpha * omega / (x * x + y * y);
                          },
                          [omega](const LorentzianCavity& b) {
                              const double d = omega - b.omega_cav;
                              return b.g * b.g * b.lambda / (std::numbers::pi * (d * d + b.lambda * b.lambda));
                          },
                      },
                      bath);
}

double quality_factor(const BathSpec& bath) {
    const auto* cav = std::get_if<LorentzianCavity>(&bath);
    if (!cav) throw ConfigError("quality_factor: bath is not a Lorentzian cavity");
    return cav->omega_cav / cav->lambda;
}

bool is_coupled(const BathSpec& bath) noexcept {
    return std::visit(overloaded{
                          [](const Ohmic& b) { return b.alpha > 0.0; },
                          [](const LowFrequency& b) { return b.alpha > 0.0; },
                          [](const LorentzianCavity& b) { return b.g > 0.0; },
                      },
                      bath);
}

TailBound tail_bound(const BathSpec& bath, double delta) noexcept {
    return std::visit(
        overloaded{
            // 2 a w wc^2 / (wc^2 + w^2) <= 2 a wc^2 / w
            [delta](const Ohmic& b) {
                return TailBound{2.0 * b.alpha * b.omega_c * b.omega_c, 1.0,
                                 2.0 * std::max(b.omega_c, delta)};
            },
            // 2 a w delta^2 / (w^2 + wl^2) <= 2 a delta^2 / w
            [delta](const LowFrequency& b) {
                return TailBound{2.0 * b.alpha * delta * delta, 1.0, 2.0 * delta};
            },
            // (w - wc) >= w / 2 once w >= 2 wc
            [](const LorentzianCavity& b) {
                return TailBound{4.0 * b.g * b.g * b.lambda / std::numbers::pi, 2.0,
                                 2.0 * b.omega_cav + 100.0 * b.lambda};
            },
        },
        bath);
}

std::vector<double> feature_points(const BathSpec& bath, double delta) {
    std::vector<double> pts;
    std::visit(overloaded{
                   [&](const Ohmic& b) {
                       for (double s : {0.1, 1.0, 10.0}) pts.push_back(s * b.omega_c);
                   },
                   [&](const LowFrequency& b) {
                       for (double s : {0.1, 1.0, 10.0, 100.0}) pts.push_back(s * b.omega_low);
                   },
                   [&](const LorentzianCavity& b) {
                       pts.push_back(b.omega_cav);
                       for (double s : {1.0, 5.0, 20.0, 100.0, 1000.0}) {
                           pts.push_back(b.omega_cav - s * b.lambda);
                           pts.push_back(b.omega_cav + s * b.lambda);
                       }
                   },
               },
               bath);
    pts.push_back(delta);
    std::erase_if(pts, [](double x) { return !(x > 0.0); });
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double integrable_cutoff(const BathSpec& bath, double delta, double tail_tolerance) {
    if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0))
        throw ConfigError("integrable_cutoff: tail_tolerance must lie in (0, 1)");
    const TailBound tb = tail_bound(bath, delta);
    if (!(tb.amplitude > 0.0)) return tb.onset;

    auto integrand = [&](double w) {
        const double s = w + delta;
        return 2.0 * eval_density(bath, w, delta) / (s * s);
    };
    auto pts = quad::clip_points(feature_points(bath, delta), 0.0, tb.onset);
    const double body = quad::integrate(integrand, pts, {1e-8, 0.0, 2000}).value;
    if (!(body > 0.0)) return tb.onset;

    // int_W^inf 2 A w^(-q-2) dw = 2 A W^(-q-1) / (q + 1)
    const double q = tb.exponent;
    const double w = std::pow(2.0 * tb.amplitude / ((q + 1.0) * tail_tolerance * body), 1.0 / (q + 1.0));
    return std::max(tb.onset, w);
}

} // namespace qcse
