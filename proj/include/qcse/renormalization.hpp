// renormalization.hpp: self-consistent renormalization factors eta_1, eta_2
//
// Each factor solves  log(eta) + int_0^inf 2 J(w) / (w + eta Delta)^2 dw = 0
// and dresses the qubit splitting (Delta -> eta Delta, eta = eta_1 eta_2) and
// the couplings g_k -> 2 eta_i Delta / (w_k + eta_i Delta) g_k.

#pragma once

#include <string>

#include "qcse/errors.hpp"
#include "qcse/spectral_density.hpp"

namespace qcse {

struct EtaOptions {
    double tolerance{1e-12};
    int max_iterations{200};
    // First-iterate floor: below this the second-order transformation is out of its range.
    double validity_floor{0.5};
};

struct EtaSolution {
    double eta{1.0};
    int iterations{0};
    double residual{0.0};
};

struct RenormalizationResult {
    double eta1{1.0};
    double eta2{1.0};
    double eta{1.0};
    int iterations{0};
    double residual{0.0};
};

// Thrown when the fixed point is not reached; carries the last iterate.
class RenormalizationError : public NumericError {
public:
    RenormalizationError(const std::string& what, double last_eta, double residual)
        : NumericError("renormalization", what), last_eta_(last_eta), residual_(residual) {}

    double last_eta() const noexcept { return last_eta_; }
    double residual() const noexcept { return residual_; }

private:
    double last_eta_;
    double residual_;
};

// int_0^inf 2 J(w) / (w + eta Delta)^2 dw, including the analytic tail above the cutoff.
double self_consistency_integral(const BathSpec& bath, double delta, double eta);

EtaSolution solve_eta(const BathSpec& bath, double delta, const EtaOptions& opt = {});

// Solves both baths of the environment.
RenormalizationResult renormalize(const Environment& env, const EtaOptions& opt = {});

// The identity renormalization used by the rotating-wave treatment.
inline RenormalizationResult rwa_renormalization() { return {}; }

// 2 eta_i Delta / (w + eta_i Delta)
inline double coupling_renorm_factor(double omega, double eta_i, double delta) noexcept {
    return 2.0 * eta_i * delta / (omega + eta_i * delta);
}

} // namespace qcse
