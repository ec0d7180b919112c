// quadrature.hpp: globally adaptive Gauss-Kronrod integration (GSL qagp) over
// a piecewise interval with caller-supplied breakpoints.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace qcse::quad {

struct Options {
    double rel_tol{1e-10};  // raised to GSL's floor of 50 machine epsilons
    double abs_tol{0.0};
    int max_intervals{2000};
};

struct Result {
    double value{0.0};
    double error{0.0};
    bool converged{true};  // false when GSL reports a tolerance or roundoff failure
};

namespace detail {
using Callback = double (*)(double, void*);
Result integrate(Callback f, void* ctx, std::span<const double> points, const Options& opt);
} // namespace detail

// Integrates f over [points.front(), points.back()], splitting first at every
// interior breakpoint. Breakpoints must be sorted ascending; duplicates are skipped.
template <typename F>
Result integrate(F&& f, std::span<const double> points, const Options& opt = {}) {
    auto call = [](double x, void* ctx) { return (*static_cast<std::remove_reference_t<F>*>(ctx))(x); };
    return detail::integrate(call, const_cast<void*>(static_cast<const void*>(&f)), points, opt);
}

template <typename F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    const std::array<double, 2> pts{a, b};
    return integrate(std::forward<F>(f), std::span<const double>(pts), opt);
}

// Sorted, de-duplicated breakpoints clipped to [lo, hi], with lo and hi included.
inline std::vector<double> clip_points(std::vector<double> pts, double lo, double hi) {
    pts.push_back(lo);
    pts.push_back(hi);
    std::erase_if(pts, [&](double x) { return !(x >= lo && x <= hi) || !std::isfinite(x); });
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

} // namespace qcse::quad
