#include "lab/grid1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lab/stats.hpp"

namespace lab {

double GridDensity1D::mass() const {
    KahanSum s;
    for (double v : values) s.add(v);
    return s.value() * h();
}

double GridDensity1D::moment(int k) const {
    KahanSum s;
    for (int i = 0; i < n_cells; ++i) s.add(values[i] * std::pow(center(i), k));
    return s.value() * h();
}

double GridDensity1D::variance() const {
    const double m = mean();
    return second_moment() - m * m;
}

double GridDensity1D::cdf(double x) const {
    if (x <= x_min) return 0.0;
    if (x >= x_max) return 1.0;
    const double step = h();
    const int cell = std::min(n_cells - 1, static_cast<int>((x - x_min) / step));
    KahanSum s;
    for (int i = 0; i < cell; ++i) s.add(values[i]);
    return s.value() * step + values[cell] * (x - edge(cell));
}

double GridDensity1D::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile: u must be in (0,1)");
    const double step = h();
    double cum = 0.0;
    for (int i = 0; i < n_cells; ++i) {
        const double m = values[i] * step;
        if (cum + m >= u && m > 0) return edge(i) + (u - cum) / values[i];
        cum += m;
    }
    return x_max;
}

bool validate(const GridDensity1D& g, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (g.n_cells < 1 || g.values.size() != static_cast<std::size_t>(g.n_cells))
        return fail("cell count mismatch");
    if (!(g.x_max > g.x_min)) return fail("empty domain");
    for (double v : g.values)
        if (!(v >= 0.0)) return fail("negative density value");
    if (std::abs(g.mass() - 1.0) > 1e-8) return fail("mass differs from 1 by more than 1e-8");
    return true;
}

GridDensity1D grid_gaussian(double mean, double sd, double x_min, double x_max, int n_cells) {
    if (!(sd > 0)) throw std::invalid_argument("grid_gaussian: sd must be positive");
    std::vector<double> raw(n_cells);
    const double h = (x_max - x_min) / n_cells;
    for (int i = 0; i < n_cells; ++i) {
        const double z = (x_min + (i + 0.5) * h - mean) / sd;
        raw[i] = std::exp(-0.5 * z * z);
    }
    return grid_from_unnormalized(raw, x_min, x_max);
}

GridDensity1D grid_from_unnormalized(const std::vector<double>& raw, double x_min, double x_max) {
    GridDensity1D g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.n_cells = static_cast<int>(raw.size());
    g.values = raw;
    KahanSum s;
    for (double v : g.values) {
        if (!(v >= 0)) throw std::invalid_argument("grid density: negative input");
        s.add(v);
    }
    const double total = s.value() * g.h();
    if (!(total > 0)) throw std::invalid_argument("grid density: zero mass");
    for (double& v : g.values) v /= total;
    return g;
}

EmpiricalMeasure sample_grid(const GridDensity1D& g, std::size_t n, RngSpec rng) {
    EmpiricalMeasure out;
    out.dim = 1;
    out.points.resize(n);
    RngStream stream(rng);
    // Precompute cumulative masses for O(log n_cells) draws.
    std::vector<double> cum(g.n_cells + 1, 0.0);
    for (int i = 0; i < g.n_cells; ++i) cum[i + 1] = cum[i] + g.values[i] * g.h();
    const double total = cum[g.n_cells];
    for (std::size_t k = 0; k < n; ++k) {
        const double u = stream.uniform_pos() * total;
        const auto it = std::lower_bound(cum.begin() + 1, cum.end(), u);
        const int cell = static_cast<int>(it - cum.begin()) - 1;
        const double inside = g.values[cell] > 0 ? (u - cum[cell]) / g.values[cell] : 0.0;
        out.points[k] = g.edge(cell) + inside;
    }
    return out;
}

}  // namespace lab
