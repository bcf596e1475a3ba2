#pragma once

// Independent test oracles. Everything here is deliberately brute force and
// shares no code with the implementation paths it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "lab/measures.hpp"

namespace oracle {

inline double euclid(std::span<const double> x, std::span<const double> y) {
    double s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
    return std::sqrt(s);
}

// Exact W_p between equal-size uniform-weight clouds by enumerating all
// assignments (Birkhoff: some permutation is optimal for uniform weights).
inline double wp_permutation(const lab::EmpiricalMeasure& a, const lab::EmpiricalMeasure& b,
                             double p) {
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0;
        for (std::size_t i = 0; i < n; ++i)
            cost += std::pow(euclid(a.point(i), b.point(perm[i])), p);
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow(best / static_cast<double>(n), 1.0 / p);
}

// Adaptive Simpson quadrature.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int depth = 40) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Central finite difference gradient.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double h = 1e-6) {
    std::vector<double> g(x.size());
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t k = 0; k < x.size(); ++k) {
        y[k] = x[k] + h;
        const double up = f(y);
        y[k] = x[k] - h;
        const double dn = f(y);
        y[k] = x[k];
        g[k] = (up - dn) / (2 * h);
    }
    return g;
}

}  // namespace oracle
