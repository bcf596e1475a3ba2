#include "lab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/beta.hpp>

namespace lab {

double kahan_total(std::span<const double> xs) {
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need two equally sized samples of length >= 2");
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.n = n;
    if (syy == 0.0) {
        f.r_squared = 1.0;  // constant data, perfectly fit by the constant line
    } else {
        double ss_res = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (f.intercept + f.slope * x[i]);
            ss_res += r * r;
        }
        f.r_squared = 1.0 - ss_res / syy;
    }
    return f;
}

BinomialInterval clopper_pearson(std::size_t k, std::size_t n, double confidence) {
    if (n == 0 || k > n) throw std::invalid_argument("clopper_pearson: need 0 <= k <= n, n > 0");
    const double alpha = 1.0 - confidence;
    BinomialInterval ci;
    if (k == 0) {
        ci.lo = 0.0;
    } else {
        boost::math::beta_distribution<double> lo_dist(static_cast<double>(k),
                                                       static_cast<double>(n - k + 1));
        ci.lo = boost::math::quantile(lo_dist, alpha / 2);
    }
    if (k == n) {
        ci.hi = 1.0;
    } else {
        boost::math::beta_distribution<double> hi_dist(static_cast<double>(k + 1),
                                                       static_cast<double>(n - k));
        ci.hi = boost::math::quantile(hi_dist, 1.0 - alpha / 2);
    }
    return ci;
}

double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    return kahan_total(xs) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
    const double m = mean(xs);
    KahanSum s;
    for (double x : xs) s.add((x - m) * (x - m));
    return s.value() / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("median: empty sample");
    const std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
    double hi = xs[mid];
    if (xs.size() % 2 == 1) return hi;
    double lo = *std::max_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

}  // namespace lab
