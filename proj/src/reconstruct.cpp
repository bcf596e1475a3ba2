#include "lab/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lab/stats.hpp"

namespace lab {

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }
double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) * 0.39894228040143267794; }

}  // namespace

double Mixture1D::pdf(double x) const {
    double s = 0;
    for (const auto& c : components) s += c.weight * std_normal_pdf((x - c.mean) / c.sd) / c.sd;
    return s;
}

double Mixture1D::cdf(double x) const {
    double s = 0;
    for (const auto& c : components) s += c.weight * std_normal_cdf((x - c.mean) / c.sd);
    return s;
}

double Mixture1D::cdf_antideriv(double x) const {
    double s = 0;
    for (const auto& c : components) {
        const double z = (x - c.mean) / c.sd;
        s += c.weight * c.sd * (z * std_normal_cdf(z) + std_normal_pdf(z));
    }
    return s;
}

double Mixture1D::quantile(double u) const {
    if (!(u > 0 && u < 1)) throw std::invalid_argument("Mixture1D::quantile: u must be in (0,1)");
    double lo = components.front().mean, hi = lo;
    for (const auto& c : components) {
        lo = std::min(lo, c.mean - 10 * c.sd);
        hi = std::max(hi, c.mean + 10 * c.sd);
    }
    while (cdf(lo) > u) lo -= 5;
    while (cdf(hi) < u) hi += 5;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < u)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * (1 + std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

double Mixture1D::mean() const {
    double s = 0;
    for (const auto& c : components) s += c.weight * c.mean;
    return s;
}

double Mixture1D::lipschitz_constant() const {
    // |f'| <= sum_i w_i max|f_i'| with max|f_i'| = phi(1)/sd^2
    double s = 0;
    for (const auto& c : components) s += c.weight * std_normal_pdf(1.0) / (c.sd * c.sd);
    return s;
}

Cdf1D Mixture1D::as_cdf() const {
    Cdf1D ref;
    ref.cdf = [m = *this](double t) { return m.cdf(t); };
    ref.antideriv = [m = *this](double t) { return m.cdf_antideriv(t); };
    ref.quantile = [m = *this](double u) { return m.quantile(u); };
    ref.mean = mean();
    return ref;
}

EmpiricalMeasure Mixture1D::sample(std::size_t n, RngSpec rng) const {
    EmpiricalMeasure out;
    out.dim = 1;
    out.points.resize(n);
    RngStream g(rng);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = g.uniform();
        double acc = 0;
        const Component* pick = &components.back();
        for (const auto& c : components) {
            acc += c.weight;
            if (u < acc) {
                pick = &c;
                break;
            }
        }
        out.points[i] = pick->mean + pick->sd * g.normal();
    }
    return out;
}

Mixture1D single_gaussian(double mean, double sd) {
    return Mixture1D{{{1.0, mean, sd}}};
}

// ---------------------------------------------------------------------------

MollifiedDensity::MollifiedDensity(const EmpiricalMeasure& base, const Kernel& kernel,
                                   double alpha)
    : sorted_points_(base.points), kernel_(kernel), alpha_(alpha), dim_(base.dim) {
    if (!(alpha > 0)) throw std::invalid_argument("mollify: alpha must be positive");
    if (dim_ != 1) throw std::invalid_argument("mollify: evaluation implemented for d = 1");
    std::sort(sorted_points_.begin(), sorted_points_.end());
}

double MollifiedDensity::value(double x) const {
    // only atoms with |x - X_i| < alpha contribute
    const auto lo = std::lower_bound(sorted_points_.begin(), sorted_points_.end(), x - alpha_);
    const auto hi = std::upper_bound(sorted_points_.begin(), sorted_points_.end(), x + alpha_);
    double s = 0;
    for (auto it = lo; it != hi; ++it) s += kernel_.value((x - *it) / alpha_);
    return s / (alpha_ * static_cast<double>(sorted_points_.size()));
}

double MollifiedDensity::lipschitz_bound() const {
    return kernel_.lipschitz_norm() / std::pow(alpha_, dim_ + 1);
}

double MollifiedDensity::integral(int points_per_bandwidth) const {
    const double lo = sorted_points_.front() - alpha_;
    const double hi = sorted_points_.back() + alpha_;
    const std::size_t n =
        static_cast<std::size_t>((hi - lo) / alpha_ * points_per_bandwidth) + 2;
    const double h = (hi - lo) / static_cast<double>(n);
    KahanSum s;  // midpoint rule
    for (std::size_t i = 0; i < n; ++i) s.add(value(lo + (i + 0.5) * h));
    return s.value() * h;
}

MollifiedDensity mollify(const EmpiricalMeasure& mu, const Kernel& kernel, double alpha) {
    return MollifiedDensity(mu, kernel, alpha);
}

double sup_error_bound(double w1, double alpha, double kernel_lipschitz, int dim,
                       double delta_alpha) {
    if (!(alpha > 0)) throw std::invalid_argument("sup_error_bound: alpha must be positive");
    return kernel_lipschitz / std::pow(alpha, dim + 1) * w1 + delta_alpha;
}

namespace {

// Shared sup-error machinery: target given by a density callable, its exact
// W1 against the sample, and a certified Lipschitz constant.
template <typename Density>
ReconstructionReport check_impl(const EmpiricalMeasure& sample, const Density& pdf, double L_f,
                                double w1_exact, double lo, double hi, const Kernel& kernel,
                                double epsilon) {
    if (!(epsilon > 0)) throw std::invalid_argument("reconstruction_check: epsilon must be > 0");
    ReconstructionReport rep;
    rep.epsilon = epsilon;
    rep.L = std::max(L_f, kernel.lipschitz_norm());
    rep.alpha = epsilon / (2 * rep.L);
    rep.K = std::pow(2 * rep.L, -3.0);  // (2L)^{-(d+2)}, d = 1
    rep.w1 = w1_exact;

    const MollifiedDensity ft(sample, kernel, rep.alpha);
    // dense grid of pitch alpha/10 over the union support plus a margin
    const double pitch = rep.alpha / 10;
    const double glo = std::min(lo, *std::min_element(sample.points.begin(), sample.points.end())) -
                       rep.alpha;
    const double ghi = std::max(hi, *std::max_element(sample.points.begin(), sample.points.end())) +
                       rep.alpha;
    double grid_max = 0;
    for (double x = glo; x <= ghi; x += pitch)
        grid_max = std::max(grid_max, std::abs(ft.value(x) - pdf(x)));
    // upper-bound the true supremum: a Lipschitz function can exceed its
    // grid maximum by at most Lip * pitch / 2
    const double lip_total = ft.lipschitz_bound() + L_f;
    rep.sup_error = grid_max + lip_total * pitch / 2;

    rep.bound = sup_error_bound(rep.w1, rep.alpha, kernel.lipschitz_norm(), 1, L_f * rep.alpha);
    rep.inequality_ok = rep.sup_error <= rep.bound + 1e-12;
    rep.deviation_event = rep.sup_error > epsilon;
    rep.budget_event = rep.w1 > rep.K * std::pow(epsilon, 3.0);
    rep.implication_ok = !rep.deviation_event || rep.budget_event;
    return rep;
}

}  // namespace

ReconstructionReport reconstruction_check(const EmpiricalMeasure& sample, const Mixture1D& target,
                                          const Kernel& kernel, double epsilon) {
    if (sample.dim != 1) throw std::invalid_argument("reconstruction_check: requires dim == 1");
    double lo = target.components.front().mean, hi = lo;
    for (const auto& c : target.components) {
        lo = std::min(lo, c.mean - 8 * c.sd);
        hi = std::max(hi, c.mean + 8 * c.sd);
    }
    const double w1 = w1_exact_1d(sample.as_measure(), target.as_cdf());
    return check_impl(
        sample, [&](double x) { return target.pdf(x); }, target.lipschitz_constant(), w1, lo, hi,
        kernel, epsilon);
}

namespace {

// Piecewise-linear interpolant through cell-center values (clamped to 0
// outside); its Lipschitz constant is the largest slope.
struct GridInterp {
    const GridDensity1D& g;
    double operator()(double x) const {
        const double h = g.h();
        const double s = (x - g.x_min) / h - 0.5;
        if (s <= -1.0 || s >= g.n_cells) return 0.0;
        const int i0 = static_cast<int>(std::floor(s));
        const double w = s - i0;
        const double v0 = (i0 >= 0 && i0 < g.n_cells) ? g.values[static_cast<std::size_t>(i0)] : 0.0;
        const int i1 = i0 + 1;
        const double v1 = (i1 >= 0 && i1 < g.n_cells) ? g.values[static_cast<std::size_t>(i1)] : 0.0;
        return v0 + (v1 - v0) * w;
    }
    double lipschitz() const {
        double best = g.values.front() / g.h();
        for (int i = 0; i + 1 < g.n_cells; ++i)
            best = std::max(best, std::abs(g.values[static_cast<std::size_t>(i + 1)] -
                                           g.values[static_cast<std::size_t>(i)]) /
                                      g.h());
        best = std::max(best, g.values.back() / g.h());
        return best;
    }
};

}  // namespace

ReconstructionReport reconstruction_check_grid(const EmpiricalMeasure& sample,
                                               const GridDensity1D& target, const Kernel& kernel,
                                               double epsilon) {
    if (sample.dim != 1) throw std::invalid_argument("reconstruction_check: requires dim == 1");
    const GridInterp f{target};
    const double w1 = w1_exact_1d(sample, target);
    return check_impl(sample, f, f.lipschitz(), w1, target.x_min, target.x_max, kernel, epsilon);
}

EquilibriumReconstructionReport equilibrium_reconstruction(const TrajectoryBundle& bundle,
                                                           const GridDensity1D& mu_inf,
                                                           double epsilon,
                                                           const PotentialSpec& potential,
                                                           const Kernel& kernel, double burn_in) {
    if (!(potential.beta > 0) || !(potential.beta + 2 * potential.gamma > 0))
        throw std::invalid_argument(
            "equilibrium_reconstruction: refused outside the uniformly convex case");
    EquilibriumReconstructionReport rep;
    for (std::size_t k = 0; k < bundle.times.size(); ++k) {
        if (bundle.times[k] < burn_in) continue;
        const auto slice = EmpiricalMeasure{bundle.dim, bundle.X[k]};
        const auto r = reconstruction_check_grid(slice, mu_inf, kernel, epsilon);
        ++rep.times_checked;
        rep.deviations += r.deviation_event ? 1 : 0;
        rep.max_sup_error = std::max(rep.max_sup_error, r.sup_error);
        rep.all_inequalities_ok = rep.all_inequalities_ok && r.inequality_ok;
    }
    if (rep.times_checked == 0)
        throw std::invalid_argument("equilibrium_reconstruction: no saved times past burn_in");
    rep.deviation_frequency =
        static_cast<double>(rep.deviations) / static_cast<double>(rep.times_checked);
    return rep;
}

}  // namespace lab
