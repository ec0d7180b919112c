// spectrum.hpp: spontaneous-emission spectrum, peak analysis, regime labels
//
//   P(w) = 1 / [(w - eta Delta - R(w))^2 + Gamma(w)^2]     (arbitrary units)

#pragma once

#include <span>
#include <string>
#include <vector>

#include "qcse/response.hpp"

namespace qcse {

struct SpectrumSample {
    double omega{0.0};
    double power{0.0};
    double r_shift{0.0};
    double gamma{0.0};
};

struct SpectrumSeries {
    Mode mode{Mode::full};
    Environment environment;
    RenormalizationResult renormalization;
    std::vector<SpectrumSample> samples;  // strictly increasing in omega
};

double emission_power(const ResponseKernel& kernel, double omega);

// Evaluates P, R and Gamma at every grid point. The grid must be strictly increasing.
SpectrumSeries emission_spectrum(const ResponseKernel& kernel, std::span<const double> grid);
SpectrumSeries emission_spectrum(const Environment& env, Mode mode, std::span<const double> grid);

std::vector<double> uniform_grid(double lo, double hi, int points);

struct ScanOptions {
    int points{4001};
    // Half-width of the scan around Delta; 0 selects 3 max(g, 10 lambda).
    double half_span{0.0};
    int refine_factor{10};
    // Refinement window around each provisional peak, in cavity linewidths.
    double refine_half_width{5.0};
};

double default_half_span(const Environment& env);

// Uniform scan around Delta followed by a denser pass near each provisional peak.
SpectrumSeries scan_spectrum(const ResponseKernel& kernel, const ScanOptions& opt = {});

struct Peak {
    double position{0.0};
    double height{0.0};
    double fwhm{0.0};  // NaN when a half-maximum crossing lies outside the series
};

struct PeakReport {
    std::vector<Peak> peaks;  // ordered by position
    int peak_count{0};
    double shift{0.0};                // single peak: position - Delta
    double splitting{0.0};            // doublet: right - left
    double position_asymmetry{0.0};   // (w_right - Delta) - (Delta - w_left)
    double height_ratio{1.0};         // P_right / P_left
    std::string classification;
};

struct ClassificationThresholds {
    double symmetric_tolerance{0.02};
    double vas_height{0.15};
    double vas_position{0.02};  // relative to the splitting
};

// Local maxima by three-point comparison, refined by a parabola through the
// maximum and its neighbours; maxima below 1e-3 of the global maximum are dropped.
// When more than two peaks survive, the doublet metrics use the two highest.
PeakReport find_peaks(const SpectrumSeries& series, const ClassificationThresholds& th = {});

// "single", "S", "AS", "AS*" or "VAS".
std::string classify(const PeakReport& report, const ClassificationThresholds& th = {});

} // namespace qcse
