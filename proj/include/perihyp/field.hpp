#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "perihyp/spectral.hpp"

namespace perihyp {

/// Uniform nodes t_i = i/n on one period [0,1).
class TimeGrid {
public:
    explicit TimeGrid(int n);

    int size() const noexcept { return n_; }
    double node(int i) const noexcept { return static_cast<double>(i) / n_; }
    bool operator==(const TimeGrid&) const = default;

private:
    int n_;
};

/// Uniform nodes x_k = k/n, k = 0..n, on [0,1] (both endpoints included).
class SpaceGrid {
public:
    explicit SpaceGrid(int intervals);

    int intervals() const noexcept { return n_; }
    int nodes() const noexcept { return n_ + 1; }
    double step() const noexcept { return 1.0 / n_; }
    double node(int k) const noexcept { return k == n_ ? 1.0 : static_cast<double>(k) / n_; }
    bool operator==(const SpaceGrid&) const = default;

private:
    int n_;
};

/// Four-point Lagrange stencil for piecewise-cubic interpolation in x.
struct CubicStencil {
    int first = 0;
    std::array<double, 4> weights{};
};

/// Stencil for x in [0,1]; nodes first..first+3 bracket x whenever possible.
CubicStencil cubic_stencil(const SpaceGrid& grid, double x);

/// Samples of a function on R x [0,1], 1-periodic in t, with 1 or 2 components.
/// Immutable: every operation returns a new field.
class PeriodicField {
public:
    using Sampler = std::function<double(int comp, double t, double x)>;

    PeriodicField(int components, TimeGrid tgrid, SpaceGrid xgrid, std::vector<double> values);
    /// Scalar zero field on the smallest grids (placeholder for reports).
    PeriodicField() : PeriodicField(1, TimeGrid(4), SpaceGrid(4), std::vector<double>(20, 0.0)) {}

    static PeriodicField zeros(int components, TimeGrid tgrid, SpaceGrid xgrid);
    static PeriodicField constant(int components, TimeGrid tgrid, SpaceGrid xgrid, double value);
    static PeriodicField sample(int components, TimeGrid tgrid, SpaceGrid xgrid, const Sampler& f);

    int components() const noexcept { return components_; }
    const TimeGrid& time_grid() const noexcept { return tgrid_; }
    const SpaceGrid& space_grid() const noexcept { return xgrid_; }

    double operator()(int comp, int i, int k) const noexcept { return values_[index(comp, i, k)]; }

    /// Time series of one component at x-node k (contiguous, length n_t).
    std::span<const double> row(int comp, int k) const noexcept;

    /// All samples; layout is (component, x-node, t-node) with t fastest.
    std::span<const double> values() const noexcept { return values_; }

    bool same_grids(const PeriodicField& other) const noexcept;

    /// Single component as a 1-component field.
    PeriodicField component(int comp) const;

    double sup_norm() const noexcept;

    PeriodicField operator+(const PeriodicField& rhs) const;
    PeriodicField operator-(const PeriodicField& rhs) const;
    PeriodicField operator*(double s) const;
    PeriodicField operator-() const { return *this * -1.0; }

    /// Pointwise map over all samples: out = f(comp, i, k, value).
    PeriodicField map(const std::function<double(int, int, int, double)>& f) const;

    std::size_t index(int comp, int i, int k) const noexcept {
        return (static_cast<std::size_t>(comp) * xgrid_.nodes() + static_cast<std::size_t>(k)) * tgrid_.size() +
               static_cast<std::size_t>(i);
    }

private:
    int components_;
    TimeGrid tgrid_;
    SpaceGrid xgrid_;
    std::vector<double> values_;
};

PeriodicField operator*(double s, const PeriodicField& f);

/// Two-component field from two one-component fields on common grids.
PeriodicField stack(const PeriodicField& first, const PeriodicField& second);

/// Fourier coefficients of every x-row of a field, for repeated evaluation
/// at shifted times and off-grid x.
class FieldSpectrum {
public:
    explicit FieldSpectrum(const PeriodicField& field);

    const TimeGrid& time_grid() const noexcept { return tgrid_; }
    const SpaceGrid& space_grid() const noexcept { return xgrid_; }

    /// out[i] = u_comp(t_i + shift, x) for all time nodes.
    void shifted_row(int comp, double x, double shift, std::span<double> out) const;

    /// out[i] = u_comp(t_i + shift, x_k) at an x-node.
    void shifted_node_row(int comp, int k, double shift, std::span<double> out) const;

    double eval(int comp, double t, double x) const;

private:
    std::span<const spectral::Complex> coeffs(int comp, int k) const noexcept;

    TimeGrid tgrid_;
    SpaceGrid xgrid_;
    int components_;
    std::size_t stride_;
    std::vector<spectral::Complex> data_;
};

/// Trigonometric interpolation in t (t reduced mod 1), piecewise-cubic in x.
/// Throws DomainError if x lies outside [0,1].
double eval_field(const PeriodicField& field, int comp, double t, double x);

/// [S_phi u](t,x) = u(t + phi, x), resampled on the same grids.
PeriodicField time_shift(const PeriodicField& field, double phi);

/// Spectral derivative in t.
PeriodicField dt_field(const PeriodicField& field);

/// Fourth-order finite differences in x (one-sided five-point stencils at the
/// two nodes nearest each boundary).
PeriodicField dx_field(const PeriodicField& field);

/// Per-row time shift by a node-dependent amount: out(t_i, x_k) = u(t_i + shift[k], x_k).
PeriodicField shift_rows(const PeriodicField& field, std::span<const double> shift_per_node);

/// Boundary trace u_comp(., x_k) as a time series.
std::vector<double> trace(const PeriodicField& field, int comp, int k);

/// Shift of a single periodic time series.
std::vector<double> shift_series(std::span<const double> series, double shift);

/// CSV with header `t,x,comp,value`, rows ordered by (t, x, comp), components
/// numbered from 1, 17 significant digits.
void write_csv(std::ostream& out, const PeriodicField& field);
PeriodicField read_csv(std::istream& in);

}  // namespace perihyp
