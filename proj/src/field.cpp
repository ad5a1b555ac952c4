#include "perihyp/field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "perihyp/error.hpp"
#include "perihyp/parallel.hpp"

namespace perihyp {

TimeGrid::TimeGrid(int n) : n_(n) {
    if (n < 4) throw ConfigError("time grid needs at least 4 nodes, got " + std::to_string(n));
}

SpaceGrid::SpaceGrid(int intervals) : n_(intervals) {
    if (intervals < 4) throw ConfigError("space grid needs at least 4 intervals, got " + std::to_string(intervals));
}

CubicStencil cubic_stencil(const SpaceGrid& grid, double x) {
    const int n = grid.intervals();
    const double s = x * n;
    int cell = static_cast<int>(std::floor(s));
    cell = std::clamp(cell, 0, n - 1);
    CubicStencil st;
    st.first = std::clamp(cell - 1, 0, n - 3);
    const double xi = s - st.first;  // local coordinate, nodes at 0,1,2,3
    st.weights[0] = -(xi - 1.0) * (xi - 2.0) * (xi - 3.0) / 6.0;
    st.weights[1] = xi * (xi - 2.0) * (xi - 3.0) / 2.0;
    st.weights[2] = -xi * (xi - 1.0) * (xi - 3.0) / 2.0;
    st.weights[3] = xi * (xi - 1.0) * (xi - 2.0) / 6.0;
    return st;
}

// ---------------------------------------------------------------------------
// PeriodicField

PeriodicField::PeriodicField(int components, TimeGrid tgrid, SpaceGrid xgrid, std::vector<double> values)
    : components_(components), tgrid_(tgrid), xgrid_(xgrid), values_(std::move(values)) {
    if (components != 1 && components != 2) throw ConfigError("a field has 1 or 2 components");
    const std::size_t expected = static_cast<std::size_t>(components) * tgrid.size() * xgrid.nodes();
    if (values_.size() != expected) throw ConfigError("field sample count does not match its grids");
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("field samples must be finite");
    }
}

PeriodicField PeriodicField::zeros(int components, TimeGrid tgrid, SpaceGrid xgrid) {
    return constant(components, tgrid, xgrid, 0.0);
}

PeriodicField PeriodicField::constant(int components, TimeGrid tgrid, SpaceGrid xgrid, double value) {
    std::vector<double> v(static_cast<std::size_t>(components) * tgrid.size() * xgrid.nodes(), value);
    return PeriodicField(components, tgrid, xgrid, std::move(v));
}

PeriodicField PeriodicField::sample(int components, TimeGrid tgrid, SpaceGrid xgrid, const Sampler& f) {
    std::vector<double> v(static_cast<std::size_t>(components) * tgrid.size() * xgrid.nodes());
    std::size_t idx = 0;
    for (int c = 0; c < components; ++c)
        for (int k = 0; k < xgrid.nodes(); ++k)
            for (int i = 0; i < tgrid.size(); ++i) v[idx++] = f(c, tgrid.node(i), xgrid.node(k));
    return PeriodicField(components, tgrid, xgrid, std::move(v));
}

std::span<const double> PeriodicField::row(int comp, int k) const noexcept {
    return std::span<const double>(values_).subspan(index(comp, 0, k), static_cast<std::size_t>(tgrid_.size()));
}

bool PeriodicField::same_grids(const PeriodicField& other) const noexcept {
    return tgrid_ == other.tgrid_ && xgrid_ == other.xgrid_;
}

PeriodicField PeriodicField::component(int comp) const {
    const std::size_t len = static_cast<std::size_t>(tgrid_.size()) * xgrid_.nodes();
    auto first = values_.begin() + static_cast<std::ptrdiff_t>(comp * len);
    return PeriodicField(1, tgrid_, xgrid_, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(len)));
}

double PeriodicField::sup_norm() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

void require_compatible(const PeriodicField& a, const PeriodicField& b) {
    if (!a.same_grids(b) || a.components() != b.components()) {
        throw ConfigError("fields live on different grids or have different component counts");
    }
}

}  // namespace

PeriodicField PeriodicField::operator+(const PeriodicField& rhs) const {
    require_compatible(*this, rhs);
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + rhs.values_[i];
    return PeriodicField(components_, tgrid_, xgrid_, std::move(v));
}

PeriodicField PeriodicField::operator-(const PeriodicField& rhs) const {
    require_compatible(*this, rhs);
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - rhs.values_[i];
    return PeriodicField(components_, tgrid_, xgrid_, std::move(v));
}

PeriodicField PeriodicField::operator*(double s) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * values_[i];
    return PeriodicField(components_, tgrid_, xgrid_, std::move(v));
}

PeriodicField operator*(double s, const PeriodicField& f) { return f * s; }

PeriodicField PeriodicField::map(const std::function<double(int, int, int, double)>& f) const {
    std::vector<double> v(values_.size());
    for (int c = 0; c < components_; ++c)
        for (int k = 0; k < xgrid_.nodes(); ++k)
            for (int i = 0; i < tgrid_.size(); ++i) {
                const std::size_t idx = index(c, i, k);
                v[idx] = f(c, i, k, values_[idx]);
            }
    return PeriodicField(components_, tgrid_, xgrid_, std::move(v));
}

PeriodicField stack(const PeriodicField& first, const PeriodicField& second) {
    if (first.components() != 1 || second.components() != 1 || !first.same_grids(second)) {
        throw ConfigError("stack expects two 1-component fields on common grids");
    }
    std::vector<double> v(first.values().begin(), first.values().end());
    v.insert(v.end(), second.values().begin(), second.values().end());
    return PeriodicField(2, first.time_grid(), first.space_grid(), std::move(v));
}

// ---------------------------------------------------------------------------
// FieldSpectrum

FieldSpectrum::FieldSpectrum(const PeriodicField& field)
    : tgrid_(field.time_grid()),
      xgrid_(field.space_grid()),
      components_(field.components()),
      stride_(spectral::coefficient_count(static_cast<std::size_t>(field.time_grid().size()))) {
    const int rows = components_ * xgrid_.nodes();
    data_.resize(stride_ * static_cast<std::size_t>(rows));
    parallel_for(0, static_cast<std::size_t>(rows), [&](std::size_t r) {
        const int c = static_cast<int>(r) / xgrid_.nodes();
        const int k = static_cast<int>(r) % xgrid_.nodes();
        spectral::forward(field.row(c, k), std::span(data_).subspan(r * stride_, stride_));
    });
}

std::span<const spectral::Complex> FieldSpectrum::coeffs(int comp, int k) const noexcept {
    const std::size_t r = static_cast<std::size_t>(comp) * xgrid_.nodes() + static_cast<std::size_t>(k);
    return std::span<const spectral::Complex>(data_).subspan(r * stride_, stride_);
}

void FieldSpectrum::shifted_row(int comp, double x, double shift, std::span<double> out) const {
    thread_local std::vector<spectral::Complex> work;
    work.assign(stride_, spectral::Complex{});
    const CubicStencil st = cubic_stencil(xgrid_, x);
    for (int s = 0; s < 4; ++s) {
        const double w = st.weights[s];
        if (w == 0.0) continue;
        auto c = coeffs(comp, st.first + s);
        for (std::size_t m = 0; m < stride_; ++m) work[m] += w * c[m];
    }
    const auto n = static_cast<std::size_t>(tgrid_.size());
    spectral::apply_shift(work, n, shift);
    spectral::inverse(work, out);
}

void FieldSpectrum::shifted_node_row(int comp, int k, double shift, std::span<double> out) const {
    thread_local std::vector<spectral::Complex> work;
    auto c = coeffs(comp, k);
    work.assign(c.begin(), c.end());
    const auto n = static_cast<std::size_t>(tgrid_.size());
    spectral::apply_shift(work, n, shift);
    spectral::inverse(work, out);
}

double FieldSpectrum::eval(int comp, double t, double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x = " + std::to_string(x) + " lies outside [0,1]");
    const auto n = static_cast<std::size_t>(tgrid_.size());
    const double tr = t - std::floor(t);
    const CubicStencil st = cubic_stencil(xgrid_, x);
    double sum = 0.0;
    for (int s = 0; s < 4; ++s) {
        if (st.weights[s] == 0.0) continue;
        sum += st.weights[s] * spectral::evaluate(coeffs(comp, st.first + s), n, tr);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Free operations

double eval_field(const PeriodicField& field, int comp, double t, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("x = " + std::to_string(x) + " lies outside [0,1]");
    const auto n = static_cast<std::size_t>(field.time_grid().size());
    const double tr = t - std::floor(t);
    const CubicStencil st = cubic_stencil(field.space_grid(), x);
    std::vector<spectral::Complex> c(spectral::coefficient_count(n));
    double sum = 0.0;
    for (int s = 0; s < 4; ++s) {
        if (st.weights[s] == 0.0) continue;
        spectral::forward(field.row(comp, st.first + s), c);
        sum += st.weights[s] * spectral::evaluate(c, n, tr);
    }
    return sum;
}

namespace {

template <class RowOp>
PeriodicField transform_rows(const PeriodicField& field, RowOp op) {
    const int nt = field.time_grid().size();
    const int nodes = field.space_grid().nodes();
    std::vector<double> out(field.values().size());
    const std::size_t rows = static_cast<std::size_t>(field.components()) * nodes;
    parallel_for(0, rows, [&](std::size_t r) {
        const int c = static_cast<int>(r) / nodes;
        const int k = static_cast<int>(r) % nodes;
        std::vector<spectral::Complex> coeffs(spectral::coefficient_count(static_cast<std::size_t>(nt)));
        spectral::forward(field.row(c, k), coeffs);
        op(coeffs, k);
        spectral::inverse(coeffs, std::span(out).subspan(field.index(c, 0, k), static_cast<std::size_t>(nt)));
    });
    return PeriodicField(field.components(), field.time_grid(), field.space_grid(), std::move(out));
}

}  // namespace

PeriodicField time_shift(const PeriodicField& field, double phi) {
    const auto n = static_cast<std::size_t>(field.time_grid().size());
    return transform_rows(field, [&](std::span<spectral::Complex> c, int) { spectral::apply_shift(c, n, phi); });
}

PeriodicField shift_rows(const PeriodicField& field, std::span<const double> shift_per_node) {
    if (shift_per_node.size() != static_cast<std::size_t>(field.space_grid().nodes())) {
        throw ConfigError("shift_rows needs one shift per x-node");
    }
    const auto n = static_cast<std::size_t>(field.time_grid().size());
    return transform_rows(field,
                          [&](std::span<spectral::Complex> c, int k) { spectral::apply_shift(c, n, shift_per_node[k]); });
}

PeriodicField dt_field(const PeriodicField& field) {
    const auto n = static_cast<std::size_t>(field.time_grid().size());
    return transform_rows(field, [&](std::span<spectral::Complex> c, int) { spectral::apply_derivative(c, n); });
}

PeriodicField dx_field(const PeriodicField& field) {
    const int nt = field.time_grid().size();
    const int n = field.space_grid().intervals();
    const double inv = 1.0 / (12.0 * field.space_grid().step());
    std::vector<double> out(field.values().size());
    auto at = [&](int c, int i, int k) { return field(c, i, k); };
    for (int c = 0; c < field.components(); ++c) {
        for (int i = 0; i < nt; ++i) {
            for (int k = 0; k <= n; ++k) {
                double d;
                if (k == 0) {
                    d = -25 * at(c, i, 0) + 48 * at(c, i, 1) - 36 * at(c, i, 2) + 16 * at(c, i, 3) - 3 * at(c, i, 4);
                } else if (k == 1) {
                    d = -3 * at(c, i, 0) - 10 * at(c, i, 1) + 18 * at(c, i, 2) - 6 * at(c, i, 3) + at(c, i, 4);
                } else if (k == n - 1) {
                    d = 3 * at(c, i, n) + 10 * at(c, i, n - 1) - 18 * at(c, i, n - 2) + 6 * at(c, i, n - 3) -
                        at(c, i, n - 4);
                } else if (k == n) {
                    d = 25 * at(c, i, n) - 48 * at(c, i, n - 1) + 36 * at(c, i, n - 2) - 16 * at(c, i, n - 3) +
                        3 * at(c, i, n - 4);
                } else {
                    d = at(c, i, k - 2) - 8 * at(c, i, k - 1) + 8 * at(c, i, k + 1) - at(c, i, k + 2);
                }
                out[field.index(c, i, k)] = d * inv;
            }
        }
    }
    return PeriodicField(field.components(), field.time_grid(), field.space_grid(), std::move(out));
}

std::vector<double> trace(const PeriodicField& field, int comp, int k) {
    auto r = field.row(comp, k);
    return std::vector<double>(r.begin(), r.end());
}

std::vector<double> shift_series(std::span<const double> series, double shift) {
    const std::size_t n = series.size();
    std::vector<spectral::Complex> c(spectral::coefficient_count(n));
    spectral::forward(series, c);
    spectral::apply_shift(c, n, shift);
    std::vector<double> out(n);
    spectral::inverse(c, out);
    return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(std::ostream& out, const PeriodicField& field) {
    out << "t,x,comp,value\n";
    const auto& tg = field.time_grid();
    const auto& xg = field.space_grid();
    for (int i = 0; i < tg.size(); ++i)
        for (int k = 0; k < xg.nodes(); ++k)
            for (int c = 0; c < field.components(); ++c) {
                out << format17(tg.node(i)) << ',' << format17(xg.node(k)) << ',' << (c + 1) << ','
                    << format17(field(c, i, k)) << '\n';
            }
}

PeriodicField read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV input");
    if (line.rfind("t,x,comp,value", 0) != 0) throw ConfigError("CSV header must be t,x,comp,value");
    struct Row {
        double t, x;
        int comp;
        double value;
    };
    std::vector<Row> rows;
    std::map<double, int> ts, xs;
    int comps = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        Row r{};
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(ss >> r.t >> c1 >> r.x >> c2 >> r.comp >> c3 >> r.value) || c1 != ',' || c2 != ',' || c3 != ',') {
            throw ConfigError("malformed CSV row at line " + std::to_string(line_no));
        }
        if (r.comp < 1 || r.comp > 2) throw ConfigError("CSV component index must be 1 or 2");
        comps = std::max(comps, r.comp);
        ts.emplace(r.t, 0);
        xs.emplace(r.x, 0);
        rows.push_back(r);
    }
    int idx = 0;
    for (auto& [t, i] : ts) i = idx++;
    idx = 0;
    for (auto& [x, k] : xs) k = idx++;
    const TimeGrid tg(static_cast<int>(ts.size()));
    const SpaceGrid xg(static_cast<int>(xs.size()) - 1);
    for (const auto& [t, i] : ts) {
        if (std::abs(t - tg.node(i)) > 1e-12) throw ConfigError("CSV time nodes are not uniform on [0,1)");
    }
    for (const auto& [x, k] : xs) {
        if (std::abs(x - xg.node(k)) > 1e-12) throw ConfigError("CSV space nodes are not uniform on [0,1]");
    }
    if (rows.size() != static_cast<std::size_t>(comps) * ts.size() * xs.size()) {
        throw ConfigError("CSV does not cover a full tensor grid");
    }
    std::vector<double> values(rows.size());
    PeriodicField layout = PeriodicField::zeros(comps, tg, xg);
    for (const Row& r : rows) values[layout.index(r.comp - 1, ts.at(r.t), xs.at(r.x))] = r.value;
    return PeriodicField(comps, tg, xg, std::move(values));
}

}  // namespace perihyp
