// dynamics.hpp: survival amplitude chi(t), population kernel and the
// dressed-frame qubit density matrix
//
// Causal convention used throughout:
//   G(w)   = 1 / [w - eta Delta - R(w) + i Gamma(w)]      P(w) = |G(w)|^2
//   chi(t) = (i / 2 pi) int G(w) exp(-i w t) dw           chi(t < 0) = 0, chi(0) = 1

#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "qcse/response.hpp"

namespace qcse {

using cplx = std::complex<double>;

struct FftGridOptions {
    int points{1 << 16};    // even; the fine grid carries points + 1 samples
    double span{0.0};       // 0 selects default_fft_span()
    // Broad grid for the far-from-resonance part of the response; 0 selects 8 Delta.
    // No broad grid is built when it would not be at least twice the fine span.
    double coarse_span{0.0};
    int coarse_points{1 << 14};
    double causality_tolerance{1e-3};
};

// max(40 max(g, lambda, Gamma_intrinsic(eta Delta)), Delta / 2)
double default_fft_span(const ResponseKernel& kernel);

struct ResponseSamples {
    double step{0.0};
    int points{0};
    std::vector<double> r_shift;  // at center + (j - points/2) step, j = 0..points
    std::vector<double> gamma;
};

// R and Gamma on a fine grid around eta Delta and, optionally, on a broad grid
// whose span is an integer multiple of the fine one. The inversion splits the
// response with a smooth partition of unity between the two.
struct ResponseGrid {
    double center{0.0};
    double step{0.0};
    int points{0};
    std::vector<double> r_shift;
    std::vector<double> gamma;
    ResponseSamples coarse;
    int coarse_ratio{0};  // coarse span / fine span, 0 without a coarse grid

    double omega(int j) const noexcept { return center + (j - points / 2) * step; }
    double time_step() const noexcept;  // 2 pi / (N dw)
    // 1 on the fine-grid core, 0 outside it, raised cosine in between.
    double partition(double nu) const noexcept;
};

ResponseGrid sample_response(const ResponseKernel& kernel, const FftGridOptions& opt = {});

struct AmplitudeTrace {
    std::vector<double> time;        // ns, uniform from 0
    std::vector<cplx> amplitude;     // chi(t) in the lab frame
    std::vector<double> population;  // |chi(t)|^2
    double frequency{0.0};           // eta Delta, for the rotating frame
    // Max |chi| over the t < 0 half of the inversion, or over the end of the
    // broad-grid window, whichever is larger.
    double causality_violation{0.0};
};

// FFT inversion of G with the pole exp(-i E0 t - g0 t) handled analytically.
// Throws NumericError("dynamics", ...) when the t < 0 output exceeds the tolerance.
AmplitudeTrace survival_amplitude(const ResponseGrid& grid, double tolerance = 1e-3);
AmplitudeTrace survival_amplitude(const ResponseKernel& kernel, const FftGridOptions& opt = {});

// Cubic interpolation of chi at arbitrary t (0 for t < 0).
cplx amplitude_at(const AmplitudeTrace& trace, double t);
AmplitudeTrace resample(const AmplitudeTrace& trace, std::span<const double> times);
// Truncates the trace to t <= t_max.
AmplitudeTrace truncate(const AmplitudeTrace& trace, double t_max);

// Inverse transforms of the rotating-frame kernels 1/(p + A+) and 1/(p + A-),
// and of the population denominator 1/(p + A+ + A-), on the grid times t >= 0.
struct KernelTraces {
    std::vector<double> time;
    std::vector<cplx> plus;        // chi(t) exp(i eta Delta t)
    std::vector<cplx> minus;       // conj of plus for a conjugate pair
    std::vector<double> population;
    double causality_violation{0.0};
};

KernelTraces population_kernel(const ResponseGrid& grid, double tolerance = 1e-3);

struct FactorizationReport {
    double max_deviation{0.0};       // max_t |K(t) - |chi(t)|^2|
    double conjugacy_deviation{0.0}; // max_t |plus(t) - conj(minus(t))|
    double t_at_max{0.0};
};

FactorizationReport factorization_check(const ResponseGrid& grid, double t_max = 0.0);

// Plancherel pair: (1/2 pi) int P dw and int |chi|^2 dt on matched grids.
struct PlancherelReport {
    double spectral{0.0};
    double temporal{0.0};
    double relative_difference{0.0};
};

PlancherelReport plancherel_check(const ResponseGrid& grid, const AmplitudeTrace& trace);

// Entries (rho11, rho12, rho21, rho22); level 1, at (0, 0), is the excited one.
struct QubitState {
    std::array<cplx, 4> rho{cplx{1.0}, cplx{}, cplx{}, cplx{}};

    cplx& operator()(int i, int j) { return rho[2 * i + j]; }
    const cplx& operator()(int i, int j) const { return rho[2 * i + j]; }
    cplx trace() const { return rho[0] + rho[3]; }
    std::array<double, 2> eigenvalues() const;

    static QubitState excited();
    static QubitState ground();
};

void validate(const QubitState& state, double tolerance = 1e-10);

// Evolves a transformed-frame state with the survival amplitude and maps it back
// to the original frame: rho_S = (1+eta)/2 rho' + (1-eta)/2 sx rho' sx.
// Populations use |chi|^2 so that positivity and trace hold exactly.
QubitState evolve_density_matrix(const QubitState& initial, const AmplitudeTrace& trace, double eta, double t);

} // namespace qcse
