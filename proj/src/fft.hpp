// In-place 1-D complex FFT on an fftw_malloc'd buffer. Planning is serialized
// because the FFTW planner is not thread-safe; execution is.

#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <string>

#include "qcse/errors.hpp"

namespace qcse::detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftBuffer {
    FftBuffer(std::size_t n, int sign, const char* module)
        : size(n), data(static_cast<std::complex<double>*>(fftw_malloc(sizeof(std::complex<double>) * n))) {
        if (!data) throw NumericError(module, "fftw_malloc failed for " + std::to_string(n) + " points");
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(data),
                                reinterpret_cast<fftw_complex*>(data), sign, FFTW_ESTIMATE);
    }
    ~FftBuffer() {
        {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(plan);
        }
        fftw_free(data);
    }
    FftBuffer(const FftBuffer&) = delete;
    FftBuffer& operator=(const FftBuffer&) = delete;

    void execute() { fftw_execute(plan); }
    std::complex<double>& operator[](std::size_t i) { return data[i]; }

    std::size_t size;
    std::complex<double>* data;
    fftw_plan plan;
};

} // namespace qcse::detail
