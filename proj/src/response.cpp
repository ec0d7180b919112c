#include "qcse/response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qcse/quadrature.hpp"

namespace qcse {

std::string_view to_string(Mode mode) noexcept {
    return mode == Mode::full ? "full" : "rwa";
}

ResponseKernel::ResponseKernel(const Environment& env, const RenormalizationResult& renorm, Mode mode,
                               const QuadratureSettings& settings)
    : env_(env), renorm_(mode == Mode::rwa ? rwa_renormalization() : renorm), mode_(mode),
      settings_(settings) {
    validate(env_);
    channels_[0] = {env_.intrinsic, renorm_.eta1, is_coupled(env_.intrinsic), 1.0};
    channels_[1] = {env_.cavity, renorm_.eta2, is_coupled(env_.cavity), 1.0};

    double cutoff = 0.0;
    std::vector<double> pts{env_.delta, qubit_frequency()};
    double onset = env_.delta;
    for (auto& ch : channels_) {
        const TailBound tb = tail_bound(ch.bath, env_.delta);
        ch.tail_exponent = tb.exponent + (mode_ == Mode::full ? 2.0 : 0.0);
        onset = std::max(onset, tb.onset);
        cutoff = std::max(cutoff, integrable_cutoff(ch.bath, env_.delta, settings_.cutoff_tolerance));
        auto fp = feature_points(ch.bath, env_.delta);
        pts.insert(pts.end(), fp.begin(), fp.end());
    }
    cutoff_ = settings_.cutoff > 0.0 ? settings_.cutoff : cutoff;
    for (double w = onset; w < cutoff_; w *= 10.0) pts.push_back(w);
    breakpoints_ = quad::clip_points(std::move(pts), 0.0, cutoff_);

    double peak = 0.0;
    for (double w : breakpoints_) peak = std::max(peak, renormalized_density(w));
    abs_tol_ = settings_.abs_tol_scale * std::max(peak, 1e-300);
}

ResponseKernel ResponseKernel::make(const Environment& env, Mode mode, const QuadratureSettings& settings) {
    const auto renorm = mode == Mode::full ? renormalize(env) : rwa_renormalization();
    return ResponseKernel(env, renorm, mode, settings);
}

double ResponseKernel::channel_density(int channel, double omega) const noexcept {
    const Channel& ch = channels_[channel];
    if (!ch.coupled) return 0.0;
    const double j = eval_density(ch.bath, omega, env_.delta);
    if (mode_ == Mode::rwa) return j;
    const double c = coupling_renorm_factor(omega, ch.eta, env_.delta);
    return c * c * j;
}

double ResponseKernel::renormalized_density(double omega) const noexcept {
    return channel_density(0, omega) + channel_density(1, omega);
}

double ResponseKernel::gamma(double omega) const noexcept {
    return std::numbers::pi * renormalized_density(omega);
}

double ResponseKernel::channel_gamma(int channel, double omega) const noexcept {
    return std::numbers::pi * channel_density(channel, omega);
}

double ResponseKernel::tail_shift(int channel, double omega) const noexcept {
    if (!settings_.tail_correction || !channels_[channel].coupled) return 0.0;
    // f ~ f(W) (W / w')^p  =>  int_W^inf f / (w - w') ~ -f(W) [1/p + w / ((p + 1) W)]
    const double p = channels_[channel].tail_exponent;
    const double fw = channel_density(channel, cutoff_);
    return -fw * (1.0 / p + omega / ((p + 1.0) * cutoff_));
}

double ResponseKernel::shift_of(int channel, double omega) const {
    auto f = [this, channel](double x) {
        return channel < 0 ? renormalized_density(x) : channel_density(channel, x);
    };
    const quad::Options opt{settings_.rel_tol, abs_tol_, settings_.max_intervals};

    if (omega > 0.0 && omega < cutoff_) {
        const double fw = f(omega);
        auto subtracted = [&](double x) { return x == omega ? 0.0 : (f(x) - fw) / (omega - x); };
        std::vector<double> pts(breakpoints_.begin(), breakpoints_.end());
        const auto at = std::lower_bound(pts.begin(), pts.end(), omega);
        if (at == pts.end() || *at != omega) pts.insert(at, omega);
        const auto r = quad::integrate(subtracted, pts, opt);
        return r.value + fw * std::log(omega / (cutoff_ - omega));
    }
    // Log divergence at an end of the support where f does not vanish.
    if ((omega == 0.0 || omega == cutoff_) && f(omega) != 0.0)
        return omega == 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    auto plain = [&](double x) { return f(x) / (omega - x); };
    return quad::integrate(plain, breakpoints_, opt).value;
}

double ResponseKernel::real_shift(double omega) const {
    if (!channels_[0].coupled && !channels_[1].coupled) return 0.0;
    return shift_of(-1, omega) + tail_shift(0, omega) + tail_shift(1, omega);
}

double ResponseKernel::channel_real_shift(int channel, double omega) const {
    if (!channels_[channel].coupled) return 0.0;
    return shift_of(channel, omega) + tail_shift(channel, omega);
}

} // namespace qcse
