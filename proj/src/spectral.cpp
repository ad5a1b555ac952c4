#include "perihyp/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace perihyp::spectral {
namespace {

struct Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

// The FFTW planner is not thread-safe; execution with new arrays is.
Plans plans_for(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, Plans> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> real(n);
    std::vector<fftw_complex> cplx(coefficient_count(n));
    const int size = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Plans p;
    p.r2c = fftw_plan_dft_r2c_1d(size, real.data(), cplx.data(), flags);
    p.c2r = fftw_plan_dft_c2r_1d(size, cplx.data(), real.data(), flags);
    cache.emplace(n, p);
    return p;
}

}  // namespace

void forward(std::span<const double> samples, std::span<Complex> coeffs) {
    const std::size_t n = samples.size();
    const Plans p = plans_for(n);
    // r2c does not modify its input, but the FFTW signature is non-const.
    fftw_execute_dft_r2c(p.r2c, const_cast<double*>(samples.data()),
                         reinterpret_cast<fftw_complex*>(coeffs.data()));
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t m = 0; m < coefficient_count(n); ++m) coeffs[m] *= scale;
}

void inverse(std::span<const Complex> coeffs, std::span<double> samples) {
    const std::size_t n = samples.size();
    const Plans p = plans_for(n);
    // c2r overwrites its input.
    thread_local std::vector<Complex> scratch;
    scratch.assign(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(coefficient_count(n)));
    fftw_execute_dft_c2r(p.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), samples.data());
}

void apply_shift(std::span<Complex> coeffs, std::size_t n, double shift) {
    const std::size_t half = coefficient_count(n);
    const bool has_nyquist = n % 2 == 0;
    const std::size_t last = has_nyquist ? half - 1 : half;
    const double base = 2.0 * std::numbers::pi * shift;
    for (std::size_t m = 1; m < last; ++m) coeffs[m] *= std::polar(1.0, base * static_cast<double>(m));
    if (has_nyquist) coeffs[half - 1] *= std::cos(std::numbers::pi * static_cast<double>(n) * shift);
}

void apply_derivative(std::span<Complex> coeffs, std::size_t n) {
    const std::size_t half = coefficient_count(n);
    coeffs[0] = 0.0;
    for (std::size_t m = 1; m < half; ++m) coeffs[m] *= Complex(0.0, 2.0 * std::numbers::pi * static_cast<double>(m));
    if (n % 2 == 0) coeffs[half - 1] = 0.0;
}

double evaluate(std::span<const Complex> coeffs, std::size_t n, double t) {
    const std::size_t half = coefficient_count(n);
    const bool has_nyquist = n % 2 == 0;
    const std::size_t last = has_nyquist ? half - 1 : half;
    double sum = coeffs[0].real();
    const double base = 2.0 * std::numbers::pi * t;
    for (std::size_t m = 1; m < last; ++m) {
        sum += 2.0 * (coeffs[m] * std::polar(1.0, base * static_cast<double>(m))).real();
    }
    if (has_nyquist) sum += coeffs[half - 1].real() * std::cos(std::numbers::pi * static_cast<double>(n) * t);
    return sum;
}

}  // namespace perihyp::spectral
