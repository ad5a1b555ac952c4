#pragma once

#include <complex>
#include <cstddef>
#include <span>

// Real trigonometric interpolation of 1-periodic samples on the uniform grid
// t_i = i/n. Coefficients are normalized so that
//   u(t) = c_0 + 2 Re sum_{0<m<n/2} c_m e^{2 pi i m t} + [n even] c_{n/2} cos(pi n t).
namespace perihyp::spectral {

using Complex = std::complex<double>;

constexpr std::size_t coefficient_count(std::size_t n) { return n / 2 + 1; }

void forward(std::span<const double> samples, std::span<Complex> coeffs);

void inverse(std::span<const Complex> coeffs, std::span<double> samples);

/// Coefficients of the interpolant of t -> u(t + shift) on the same grid.
/// The Nyquist term picks up cos(pi n shift), so shifts form a group only on
/// samples whose Nyquist coefficient vanishes.
void apply_shift(std::span<Complex> coeffs, std::size_t n, double shift);

/// Coefficients of d/dt; the Nyquist term is dropped.
void apply_derivative(std::span<Complex> coeffs, std::size_t n);

double evaluate(std::span<const Complex> coeffs, std::size_t n, double t);

}  // namespace perihyp::spectral
