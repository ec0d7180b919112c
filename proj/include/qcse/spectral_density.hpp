// spectral_density.hpp: the three bath spectral densities and their bookkeeping
//
// Units: angular frequencies in GHz (hbar = 1), times in ns. Every density is
// supported on omega >= 0 and returns exactly zero for omega < 0.

#pragma once

#include <string_view>
#include <variant>
#include <vector>

namespace qcse {

// J(w) = 2 alpha w / (1 + (w / omega_c)^2)
struct Ohmic {
    double alpha{0.0};
    double omega_c{100.0};
};

// J(w) = 2 alpha w / ((w / Delta)^2 + (omega_low / Delta)^2)
struct LowFrequency {
    double alpha{0.0};
    double omega_low{0.1};
};

// J(w) = g^2 lambda / (pi ((w - omega_cav)^2 + lambda^2))
struct LorentzianCavity {
    double g{0.0};
    double lambda{0.1};
    double omega_cav{10.0};
};

using BathSpec = std::variant<Ohmic, LowFrequency, LorentzianCavity>;

enum class BathKind { ohmic, low_frequency, lorentzian_cavity };

BathKind kind_of(const BathSpec& bath) noexcept;
std::string_view to_string(BathKind kind) noexcept;

// Qubit splitting plus one intrinsic bath (Ohmic or LowFrequency) and one
// cavity bath (LorentzianCavity).
struct Environment {
    double delta{10.0};
    BathSpec intrinsic{Ohmic{}};
    BathSpec cavity{LorentzianCavity{}};
};

// Default characteristic frequencies, relative to the qubit splitting.
inline constexpr double kDefaultOhmicCutoffRatio = 10.0;
inline constexpr double kDefaultLowFrequencyRatio = 0.01;

// Throws ConfigError on a violated invariant. delta is needed for the
// LowFrequency requirement omega_low < delta.
void validate(const BathSpec& bath, double delta);
void validate(const Environment& env);

double eval_density(const BathSpec& bath, double omega, double delta) noexcept;

// omega_cav / lambda; throws ConfigError for non-cavity baths.
double quality_factor(const BathSpec& bath);

// True when the bath couples to the qubit at all (alpha > 0 or g > 0).
bool is_coupled(const BathSpec& bath) noexcept;

// Power-law envelope J(w) <= amplitude * w^(-exponent), valid for w >= onset.
struct TailBound {
    double amplitude{0.0};
    double exponent{1.0};
    double onset{0.0};
};

TailBound tail_bound(const BathSpec& bath, double delta) noexcept;

// Frequencies where the density changes character (peak, width, cutoff);
// used as quadrature breakpoints. Only non-negative values are returned.
std::vector<double> feature_points(const BathSpec& bath, double delta);

// Upper limit Omega such that the part of int 2J/(w + delta)^2 dw above Omega
// is below tail_tolerance times the part on [0, Omega]. The tail is bounded
// analytically from tail_bound().
double integrable_cutoff(const BathSpec& bath, double delta, double tail_tolerance);

} // namespace qcse
