#include "qcse/quadrature.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <limits>
#include <memory>
#include <mutex>

namespace qcse::quad::detail {

Result integrate(Callback f, void* ctx, std::span<const double> points, const Options& opt) {
    // Failures are reported through the return code, never by aborting.
    static std::once_flag once;
    std::call_once(once, [] { gsl_set_error_handler_off(); });

    Result out;
    std::vector<double> pts;
    for (double x : points)
        if (pts.empty() || x > pts.back()) pts.push_back(x);
    if (pts.size() < 2) return out;

    const auto limit = static_cast<std::size_t>(std::max<int>(opt.max_intervals, static_cast<int>(pts.size())));
    std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws(
        gsl_integration_workspace_alloc(limit), &gsl_integration_workspace_free);
    gsl_function fn{f, ctx};
    const double rel = std::max(opt.rel_tol, 50.0 * std::numeric_limits<double>::epsilon() * 1.01);
    const int status =
        gsl_integration_qagp(&fn, pts.data(), pts.size(), opt.abs_tol, rel, limit, ws.get(), &out.value, &out.error);
    out.converged = status == GSL_SUCCESS;
    return out;
}

} // namespace qcse::quad::detail
