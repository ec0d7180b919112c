#include "qcse/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qcse/errors.hpp"

namespace qcse {

namespace {

const LorentzianCavity& cavity_of(const Environment& env) {
    return std::get<LorentzianCavity>(env.cavity);
}

SpectrumSample sample_at(const ResponseKernel& kernel, double omega) {
    SpectrumSample s;
    s.omega = omega;
    s.r_shift = kernel.real_shift(omega);
    s.gamma = kernel.gamma(omega);
    const double d = omega - kernel.qubit_frequency() - s.r_shift;
    s.power = 1.0 / (d * d + s.gamma * s.gamma);
    return s;
}

std::vector<std::size_t> local_maxima(std::span<const SpectrumSample> s) {
    std::vector<std::size_t> idx;
    double global = 0.0;
    for (const auto& x : s) global = std::max(global, x.power);
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        if (s[i].power > s[i - 1].power && s[i].power >= s[i + 1].power &&
            s[i].power >= 1e-3 * global)
            idx.push_back(i);
    }
    return idx;
}

// Vertex of the parabola through three (x, y) points.
Peak parabola_vertex(const SpectrumSample& a, const SpectrumSample& b, const SpectrumSample& c) {
    const double x0 = a.omega, x1 = b.omega, x2 = c.omega;
    const double y0 = a.power, y1 = b.power, y2 = c.power;
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curv = (d12 - d01) / (x2 - x0);
    if (!(curv < 0.0)) return {x1, y1, 0.0};
    // y = y1 + s (x - x1) + curv (x - x1)^2, s the slope at x1
    const double slope = d01 + curv * (x1 - x0);
    double xv = x1 - slope / (2.0 * curv);
    xv = std::clamp(xv, x0, x2);
    const double yv = y1 + slope * (xv - x1) + curv * (xv - x1) * (xv - x1);
    return {xv, yv, 0.0};
}

double half_max_crossing(std::span<const SpectrumSample> s, std::size_t i, double half, int dir) {
    std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i);
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    while (j + dir >= 0 && j + dir < n && s[j + dir].power > half) j += dir;
    const std::ptrdiff_t k = j + dir;
    if (k < 0 || k >= n) return std::numeric_limits<double>::quiet_NaN();
    const auto& in = s[j];
    const auto& out = s[k];
    const double t = (in.power - half) / (in.power - out.power);
    return in.omega + t * (out.omega - in.omega);
}

} // namespace

double emission_power(const ResponseKernel& kernel, double omega) {
    return sample_at(kernel, omega).power;
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw ConfigError("uniform_grid: need hi > lo and at least 2 points");
    std::vector<double> g(points);
    const double h = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[i] = lo + i * h;
    g.back() = hi;
    return g;
}

SpectrumSeries emission_spectrum(const ResponseKernel& kernel, std::span<const double> grid) {
    SpectrumSeries series;
    series.mode = kernel.mode();
    series.environment = kernel.environment();
    series.renormalization = kernel.renormalization();
    series.samples.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw ConfigError("emission_spectrum: grid must be strictly increasing");
        series.samples.push_back(sample_at(kernel, grid[i]));
    }
    return series;
}

SpectrumSeries emission_spectrum(const Environment& env, Mode mode, std::span<const double> grid) {
    return emission_spectrum(ResponseKernel::make(env, mode), grid);
}

double default_half_span(const Environment& env) {
    const auto& cav = cavity_of(env);
    return 3.0 * std::max(cav.g, 10.0 * cav.lambda);
}

SpectrumSeries scan_spectrum(const ResponseKernel& kernel, const ScanOptions& opt) {
    const Environment& env = kernel.environment();
    const double half = opt.half_span > 0.0 ? opt.half_span : default_half_span(env);
    const auto coarse = uniform_grid(env.delta - half, env.delta + half, opt.points);
    SpectrumSeries series = emission_spectrum(kernel, coarse);
    if (opt.refine_factor <= 1) return series;

    const double step = coarse[1] - coarse[0];
    const double fine = step / opt.refine_factor;
    const double width = opt.refine_half_width * cavity_of(env).lambda;
    std::vector<double> extra;
    for (std::size_t i : local_maxima(series.samples)) {
        const double c = series.samples[i].omega;
        const double lo = std::max(c - width, coarse.front());
        const double hi = std::min(c + width, coarse.back());
        const auto n = static_cast<long>(std::floor((hi - lo) / fine));
        for (long k = 0; k <= n; ++k) extra.push_back(lo + k * fine);
    }
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());

    // Merge, dropping fine points that collide with existing samples.
    std::vector<SpectrumSample> merged;
    merged.reserve(series.samples.size() + extra.size());
    const double min_gap = 1e-6 * fine;
    std::size_t j = 0;
    for (const auto& s : series.samples) {
        while (j < extra.size() && extra[j] < s.omega - min_gap) {
            if (merged.empty() || extra[j] > merged.back().omega + min_gap)
                merged.push_back(sample_at(kernel, extra[j]));
            ++j;
        }
        while (j < extra.size() && extra[j] <= s.omega + min_gap) ++j;
        if (merged.empty() || s.omega > merged.back().omega + min_gap) merged.push_back(s);
    }
    series.samples = std::move(merged);
    return series;
}

PeakReport find_peaks(const SpectrumSeries& series, const ClassificationThresholds& th) {
    const auto& s = series.samples;
    if (s.empty()) throw ConfigError("find_peaks: empty series");
    if (s.size() < 16) throw ConfigError("find_peaks: need at least 16 samples");

    PeakReport rep;
    for (std::size_t i : local_maxima(s)) {
        Peak p = parabola_vertex(s[i - 1], s[i], s[i + 1]);
        const double half = 0.5 * p.height;
        const double left = half_max_crossing(s, i, half, -1);
        const double right = half_max_crossing(s, i, half, +1);
        p.fwhm = right - left;
        rep.peaks.push_back(p);
    }
    rep.peak_count = static_cast<int>(rep.peaks.size());

    const double delta = series.environment.delta;
    if (rep.peak_count == 1) {
        rep.shift = rep.peaks.front().position - delta;
    } else if (rep.peak_count >= 2) {
        std::vector<Peak> top = rep.peaks;
        std::partial_sort(top.begin(), top.begin() + 2, top.end(),
                          [](const Peak& a, const Peak& b) { return a.height > b.height; });
        Peak left = top[0], right = top[1];
        if (left.position > right.position) std::swap(left, right);
        rep.splitting = right.position - left.position;
        rep.position_asymmetry = (right.position - delta) - (delta - left.position);
        rep.height_ratio = right.height / left.height;
    }
    rep.classification = classify(rep, th);
    return rep;
}

std::string classify(const PeakReport& report, const ClassificationThresholds& th) {
    if (report.peak_count == 0) return "none";
    if (report.peak_count == 1) return "single";
    const double dh = report.height_ratio - 1.0;
    const bool very_high = std::abs(dh) > th.vas_height;
    const bool very_shifted = std::abs(report.position_asymmetry) > th.vas_position * report.splitting;
    if (very_high && very_shifted) return "VAS";
    if (dh > th.symmetric_tolerance) return "AS";
    if (dh < -th.symmetric_tolerance) return "AS*";
    return "S";
}

} // namespace qcse
