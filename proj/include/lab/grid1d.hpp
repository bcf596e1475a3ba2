#pragma once

#include <vector>

#include "lab/measures.hpp"

namespace lab {

// Probability density on a uniform 1-D cell grid: values[i] is the density
// on cell i (piecewise constant), so the CDF is piecewise linear with knots
// at cell edges. Cell mass sums to 1 within 1e-8.
struct GridDensity1D {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_cells = 0;
    std::vector<double> values;
    double time = 0.0;

    double h() const { return (x_max - x_min) / n_cells; }
    double edge(int i) const { return x_min + i * h(); }
    double center(int i) const { return x_min + (i + 0.5) * h(); }

    double mass() const;
    double moment(int k) const;  // int x^k f(x) dx via midpoint rule
    double mean() const { return moment(1); }
    double second_moment() const { return moment(2); }
    double variance() const;

    double cdf(double x) const;
    double quantile(double u) const;  // u in (0,1)
};

bool validate(const GridDensity1D& g, std::string* why = nullptr);

// Gaussian density evaluated at cell centers and renormalized to unit mass.
GridDensity1D grid_gaussian(double mean, double sd, double x_min, double x_max, int n_cells);

// Density proportional to exp(-phi(x)) on the grid, phi supplied per center.
GridDensity1D grid_from_unnormalized(const std::vector<double>& raw, double x_min, double x_max);

// n i.i.d. inverse-CDF draws from the grid density.
EmpiricalMeasure sample_grid(const GridDensity1D& g, std::size_t n, RngSpec rng);

}  // namespace lab
