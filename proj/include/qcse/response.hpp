// response.hpp: damping kernel Gamma(w) and principal-value level shift R(w)
//
// With f_i(w) = c_i(w)^2 J_i(w) and c_i(w) = 2 eta_i Delta / (w + eta_i Delta):
//   Gamma(w) = pi sum_i f_i(w)
//   R(w)     = PV int_0^inf sum_i f_i(w') / (w - w') dw'
// In rwa mode every c_i is exactly 1 and eta is exactly 1.

#pragma once

#include <array>
#include <span>
#include <vector>

#include "qcse/renormalization.hpp"
#include "qcse/spectral_density.hpp"

namespace qcse {

enum class Mode { full, rwa };

std::string_view to_string(Mode mode) noexcept;

struct QuadratureSettings {
    // Relative tail tolerance passed to integrable_cutoff().
    double cutoff_tolerance{1e-12};
    // Overrides the automatic cutoff when > 0.
    double cutoff{0.0};
    double rel_tol{1e-11};
    // Absolute floor, in units of the largest peak value of f. Much below 1e-10
    // the G-K error estimate stalls on roundoff and the integrator subdivides
    // to its interval limit without changing the value.
    double abs_tol_scale{1e-10};
    int max_intervals{3000};
    // Adds the asymptotic contribution of w' > cutoff to R.
    bool tail_correction{true};
};

class ResponseKernel {
public:
    ResponseKernel(const Environment& env, const RenormalizationResult& renorm, Mode mode,
                   const QuadratureSettings& settings = {});

    // Builds the kernel for one mode, solving the renormalization when mode is full.
    static ResponseKernel make(const Environment& env, Mode mode, const QuadratureSettings& settings = {});

    Mode mode() const noexcept { return mode_; }
    const Environment& environment() const noexcept { return env_; }
    const RenormalizationResult& renormalization() const noexcept { return renorm_; }
    const QuadratureSettings& settings() const noexcept { return settings_; }

    // Dressed qubit splitting eta * Delta (Delta in rwa mode).
    double qubit_frequency() const noexcept { return renorm_.eta * env_.delta; }
    double cutoff() const noexcept { return cutoff_; }
    std::span<const double> breakpoints() const noexcept { return breakpoints_; }

    // Renormalized density of one channel (0 = intrinsic, 1 = cavity) or of both.
    double channel_density(int channel, double omega) const noexcept;
    double renormalized_density(double omega) const noexcept;

    double gamma(double omega) const noexcept;
    double channel_gamma(int channel, double omega) const noexcept;

    // Principal value by singularity subtraction on (0, cutoff):
    //   int [f(w') - f(w)] / (w - w') dw' + f(w) ln|w / (cutoff - w)|
    // plus the asymptotic tail beyond the cutoff.
    double real_shift(double omega) const;
    double channel_real_shift(int channel, double omega) const;

    // Asymptotic int_cutoff^inf f(w') / (w - w') dw' for one channel.
    double tail_shift(int channel, double omega) const noexcept;

private:
    struct Channel {
        BathSpec bath;
        double eta{1.0};
        bool coupled{false};
        double tail_exponent{1.0};
    };

    double shift_of(int channel, double omega) const;

    Environment env_;
    RenormalizationResult renorm_;
    Mode mode_;
    QuadratureSettings settings_;
    std::array<Channel, 2> channels_;
    double cutoff_{0.0};
    double abs_tol_{0.0};
    std::vector<double> breakpoints_;
};

} // namespace qcse
