// oracle.hpp: brute-force check of the analytic results
//
// Each bath is replaced by K explicit modes with couplings
//   g_k = c(w_k) sqrt(J(w_k) dw_k)
// and the single-excitation Schroedinger equation of the transformed
// Hamiltonian is integrated with fixed-step RK4 in the interaction picture:
//   d chi / dt    = -i sum_k g_k exp(-i d_k t) beta_k
//   d beta_k / dt = -i g_k exp(+i d_k t) chi,         d_k = w_k - eta Delta

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qcse/response.hpp"
#include "qcse/spectrum.hpp"

namespace qcse {

using cplx = std::complex<double>;

enum class Placement {
    uniform,  // K equal cells over the band
    graded,   // half the cells uniform on a core window, the rest growing geometrically outward
};

struct DiscretizeOptions {
    int modes{2000};
    double lo{0.0};
    double hi{50.0};
    Placement placement{Placement::graded};
    double core_center{10.0};
    double core_half_width{1.0};
};

struct DiscretizedBath {
    BathKind source{BathKind::lorentzian_cavity};
    std::vector<double> omega;     // cell midpoints
    std::vector<double> width;     // cell widths
    std::vector<double> coupling;  // renormalized g_k
};

// Cell edges for the chosen placement; exactly `modes` cells partition [lo, hi].
std::vector<double> cell_edges(const DiscretizeOptions& opt);

// eta_i is the channel's own renormalization; rwa mode drops the factor c.
// Throws ConfigError when a Lorentzian gets fewer than 20 modes within 5 lambda.
DiscretizedBath discretize(const BathSpec& bath, double eta_i, double delta, Mode mode, const DiscretizeOptions& opt);

double coupling_sum(const DiscretizedBath& bath);  // sum_k g_k^2

// A single mode, for Rabi-type checks.
DiscretizedBath single_mode(double omega, double coupling);

struct ExcitationState {
    double t{0.0};
    cplx chi{1.0};
    std::vector<cplx> beta;  // concatenated over baths
};

struct EvolveOptions {
    double t_max{200.0};
    double dt{0.0};         // 0 selects 0.1 / max |d_k|, rounded to divide sample_dt
    double sample_dt{0.1};
    double norm_tolerance{1e-6};
    cplx chi0{1.0};
};

struct OracleTrace {
    std::vector<double> time;
    std::vector<cplx> chi;  // rotating frame
    double frequency{0.0};  // eta Delta of the rotating frame
    double dt{0.0};
    long steps{0};
    double max_norm_drift{0.0};
    ExcitationState final_state;
};

// Throws NumericError("oracle", ...) when the norm drifts beyond the tolerance.
OracleTrace evolve(std::span<const DiscretizedBath> baths, double qubit_frequency, const EvolveOptions& opt);

struct OracleSettings {
    int modes_per_bath{2000};
    double band_max{0.0};  // 0 selects 5 Delta
    Placement intrinsic_placement{Placement::graded};
    EvolveOptions evolve;
};

// Core window used for graded placement: max(10 lambda, 2 g) around the cavity
// for the cavity bath and around eta Delta for the intrinsic bath.
DiscretizeOptions discretize_options(const Environment& env, BathKind which, double qubit_frequency,
                                     const OracleSettings& settings);

// Analytic kernel restricted to the oracle band: same cutoff, no tail term.
ResponseKernel matched_kernel(const Environment& env, Mode mode, const OracleSettings& settings);

struct OracleRun {
    std::vector<DiscretizedBath> baths;
    RenormalizationResult renormalization;
    OracleTrace trace;
};

OracleRun run_oracle(const Environment& env, Mode mode, const OracleSettings& settings = {});

struct OracleSpectrumOptions {
    double lo{0.0};          // lab-frame window; lo >= hi selects Delta +- default_half_span
    double hi{0.0};
    double resolution{0.0};  // target grid step; 0 selects (hi - lo) / 4000
    double taper_fraction{0.1};
    double decay_threshold{1e-2};
};

// |int chi(t) w(t) exp(i (w - eta Delta) t) dt|^2 by zero-padded FFT on [lo, hi],
// normalized to unit peak. r_shift and gamma are left at zero.
// Throws NumericError("oracle", ...) when |chi(t_max)| >= decay_threshold.
SpectrumSeries oracle_spectrum(const OracleTrace& trace, const Environment& env, Mode mode,
                               const OracleSpectrumOptions& opt = {});

} // namespace qcse
