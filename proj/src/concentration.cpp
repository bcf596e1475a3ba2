#include "lab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "lab/laws1d.hpp"
#include "lab/parallel.hpp"
#include "lab/stats.hpp"
#include "lab/transport.hpp"

namespace lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

bool validate(const TpParams& c, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (!(c.p >= 1)) return fail("p must be >= 1");
    if (!(c.lambda > 0)) return fail("lambda must be positive");
    if (!(c.lambda_prime > 0 && c.lambda_prime < c.lambda))
        return fail("need 0 < lambda' < lambda");
    if (!(c.d_prime > c.d)) return fail("need d' > d");
    if (!(c.alpha > 0 && c.alpha < c.lambda / 2)) return fail("need 0 < alpha < lambda/2");
    if (!(c.E_alpha >= 1)) return fail("E_alpha must be >= 1");
    if (!(c.N0 >= 1)) return fail("N0 must be >= 1");
    return true;
}

double gamma_p(double p) {
    if (!(p >= 1.0 && p <= 2.0)) throw std::invalid_argument("gamma_p: p must lie in [1, 2]");
    return p == 2.0 ? 3.0 - 2.0 * std::sqrt(2.0) : 1.0;
}

TpBound bound_tp(const TpParams& params, std::size_t N, double epsilon) {
    std::string why;
    if (!validate(params, &why)) throw std::invalid_argument("bound_tp: " + why);
    if (!(epsilon > 0) || N < 1) throw std::invalid_argument("bound_tp: need epsilon > 0, N >= 1");
    TpBound out;
    out.bound_raw = std::exp(-gamma_p(params.p) * (params.lambda_prime / 2.0) *
                             static_cast<double>(N) * epsilon * epsilon);
    out.bound = clamp01(out.bound_raw);
    out.admissible = static_cast<double>(N) >=
                     params.N0 * std::max(std::pow(epsilon, -(params.d_prime + 2.0)), 1.0);
    return out;
}

MqBound bound_mq(double q, double p, double delta, std::size_t N, double epsilon, double d,
                 double d_prime, double N0) {
    if (!(q >= 1) || !(p >= 1) || !(p < q))
        throw std::invalid_argument("bound_mq: need q >= 1 and 1 <= p < q");
    if (!(epsilon > 0) || N < 1)
        throw std::invalid_argument("bound_mq: need epsilon > 0, N >= 1");
    if (!(d_prime > d)) throw std::invalid_argument("bound_mq: need d' > d");
    MqBound out;
    const double n = static_cast<double>(N);
    if (p < q / 2) {
        if (!(delta > 0 && delta < q / p - 2))
            throw std::invalid_argument("bound_mq: regime (i) needs delta in (0, q/p - 2)");
        out.regime = 1;
        out.bound_raw = std::pow(epsilon, -q) * std::pow(n, -q / (2 * p) + delta / 2);
    } else {
        if (!(delta > 0 && delta < q / p - 1))
            throw std::invalid_argument("bound_mq: regime (ii) needs delta in (0, q/p - 1)");
        out.regime = 2;
        out.bound_raw = std::pow(epsilon, -q) * std::pow(n, 1 - q / p + delta);
    }
    out.bound = clamp01(out.bound_raw);
    out.n_threshold =
        N0 * std::max(std::pow(epsilon, -q * (2 * p + d_prime) / (q - p)),
                      std::pow(epsilon, d_prime - d));
    out.admissible = n >= out.n_threshold;
    return out;
}

double bound_var(VarVariant variant, const VarParams& params, std::size_t N, double epsilon) {
    if (!(epsilon > 0) || N < 1)
        throw std::invalid_argument("bound_var: need epsilon > 0, N >= 1");
    const double n = static_cast<double>(N);
    const double e2 = epsilon * epsilon;
    switch (variant) {
        case VarVariant::i: {
            if (!(params.p >= 1) || !(params.K > 0))
                throw std::invalid_argument("bound_var(i): need p >= 1, K > 0");
            return clamp01(std::exp(-params.K * std::pow(n, 1.0 / params.p) *
                                    std::min(epsilon, e2)));
        }
        case VarVariant::ii: {
            if (!(params.a < 2) || !(params.K > 0))
                throw std::invalid_argument("bound_var(ii): need a < 2, K > 0");
            return clamp01(std::exp(-params.K * n * std::min(e2, std::pow(epsilon, params.a))));
        }
        case VarVariant::iii: {
            if (!(params.p > 2))
                throw std::invalid_argument("bound_var(iii): needs p > 2");
            if (!(params.lambda_prime > 0) || !(params.d_prime > 0))
                throw std::invalid_argument("bound_var(iii): need lambda' > 0, d' > 0");
            const double first =
                std::exp(-params.lambda_prime / 2.0 * n * e2) +
                std::exp(-std::pow(n * std::pow(epsilon, params.d_prime + 2.0),
                                   2.0 / params.d_prime));
            const double second =
                2.0 * std::exp(-params.lambda_prime / 4.0 * std::pow(n, 2.0 / params.p) * e2);
            return clamp01(std::min(first, second));
        }
    }
    return 1.0;
}

TruncationBound truncation_bound(double E_alpha, double alpha, double R, double p) {
    if (!(E_alpha >= 1) || !(alpha > 0) || !(R > 0) || !(p >= 1))
        throw std::invalid_argument("truncation_bound: need E_alpha >= 1, alpha > 0, R > 0, p >= 1");
    TruncationBound out;
    out.value = std::pow(2.0, p) * E_alpha * std::pow(R, p) * std::exp(-alpha * R * R);
    out.admissible = R >= std::sqrt(p / (2.0 * alpha));
    return out;
}

double relative_entropy_gaussian(double m1, double s1, double m2, double s2) {
    if (!(s1 > 0) || !(s2 > 0))
        throw std::invalid_argument("relative_entropy_gaussian: scales must be positive");
    const double dm = m1 - m2;
    return std::log(s2 / s1) + (s1 * s1 + dm * dm) / (2 * s2 * s2) - 0.5;
}

double tp_residual_gaussian(double m, double lambda, double p) {
    if (p != 1.0 && p != 2.0)
        throw std::invalid_argument("tp_residual_gaussian: p must be 1 or 2");
    if (!(lambda > 0)) throw std::invalid_argument("tp_residual_gaussian: lambda must be positive");
    // nu = N(m,1), mu = N(0,1): H = m^2/2 and W_p = |m| (translation).
    const double H = relative_entropy_gaussian(m, 1.0, 0.0, 1.0);
    return std::sqrt(2.0 * H / lambda) - std::abs(m);
}

// ---------------------------------------------------------------------------
// Monte Carlo

std::vector<double> mc_distances(const LawSpec& law, double p, std::size_t N, std::size_t trials,
                                 RngSpec rng, unsigned jobs, const EmpiricalMeasure* reference) {
    if (N < 1 || trials < 1)
        throw std::invalid_argument("mc_distances: need N >= 1, trials >= 1");
    const bool analytic = reference == nullptr;
    if (analytic && !(law.dim == 1 && p == 1.0))
        throw std::invalid_argument(
            "mc_distances: analytic reference only for d = 1, p = 1; supply a reference sample");
    DiscreteMeasure ref_measure;
    if (!analytic) ref_measure = reference->as_measure();
    std::vector<double> dist(trials);
    parallel_for(trials, jobs, [&](std::size_t t) {
        const auto sample = sample_iid(law, N, rng.sub(t));
        if (analytic) {
            dist[t] = w1_exact_1d(sample, law);
        } else if (law.dim == 1) {
            dist[t] = wp_quantile_1d(sample.as_measure(), ref_measure, p);
        } else {
            dist[t] = wp_discrete(sample.as_measure(), ref_measure, p).distance;
        }
    });
    return dist;
}

namespace {

BoundReport build_report(double p, std::size_t N, double epsilon, std::size_t hits,
                         std::size_t trials, const std::optional<TpParams>& params) {
    BoundReport rep;
    rep.theorem = "tp-square-exponential";
    rep.p = p;
    rep.N = N;
    rep.epsilon = epsilon;
    rep.trials = trials;
    rep.mc_estimate = static_cast<double>(hits) / static_cast<double>(trials);
    const auto ci = clopper_pearson(hits, trials);
    rep.ci_lo = ci.lo;
    rep.ci_hi = ci.hi;
    if (params) {
        const auto b = bound_tp(*params, N, epsilon);
        rep.bound = b.bound;
        rep.bound_raw = b.bound_raw;
        rep.admissible = b.admissible;
    }
    return rep;
}

}  // namespace

BoundReport mc_deviation(const LawSpec& law, double p, std::size_t N, double epsilon,
                         std::size_t trials, RngSpec rng, const std::optional<TpParams>& params,
                         unsigned jobs, const EmpiricalMeasure* reference) {
    if (!(epsilon >= 0)) throw std::invalid_argument("mc_deviation: epsilon must be >= 0");
    const auto dist = mc_distances(law, p, N, trials, rng, jobs, reference);
    std::size_t hits = 0;
    for (double w : dist) hits += (w > epsilon);
    return build_report(p, N, epsilon, hits, trials, params);
}

std::vector<BoundReport> mc_deviation_curve(const LawSpec& law, double p, std::size_t N,
                                            const std::vector<double>& epsilons,
                                            std::size_t trials, RngSpec rng,
                                            const std::optional<TpParams>& params, unsigned jobs,
                                            const EmpiricalMeasure* reference) {
    const auto dist = mc_distances(law, p, N, trials, rng, jobs, reference);
    std::vector<BoundReport> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) {
        std::size_t hits = 0;
        for (double w : dist) hits += (w > eps);
        out.push_back(build_report(p, N, eps, hits, trials, params));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Heaviside identity and the CLT integrability condition

namespace {

// Adaptive Simpson, non-recursive interface.
double simpson_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth);

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15;
    return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double simpson_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth = 36) {
    if (!(b > a)) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace

double condclt_integral(const LawSpec& law) {
    const auto integrand = [&](double t) {
        const double F = law_cdf(law, t);
        return std::sqrt(std::max(0.0, F * (1.0 - F)));
    };
    const double lo = std::max(law_support_lo(law), -1.0);
    const double hi = std::min(law_support_hi(law), 1.0);
    double total = simpson_adaptive(integrand, lo, hi, 1e-12);
    // Expanding dyadic windows. A convergent tail has geometrically decaying
    // increments, so once the ratio stabilizes below 1 the remainder is
    // summed as a geometric series; ratios near or above 1 flag divergence.
    // (Laws with nu barely above 2 decay too slowly to resolve and are
    // reported as the +inf sentinel as well.)
    for (int side = 0; side < 2; ++side) {
        if (side == 0 && law_support_hi(law) <= 1.0) continue;
        if (side == 1 && law_support_lo(law) >= -1.0) continue;
        double prev = kInf;
        double a = 1.0;
        for (int k = 0;; ++k) {
            const double b = std::min(a * 2, side == 0 ? law_support_hi(law) : -law_support_lo(law));
            const double inc = side == 0 ? simpson_adaptive(integrand, a, b, 1e-13)
                                         : simpson_adaptive(integrand, -b, -a, 1e-13);
            total += inc;
            if (inc < 1e-12 || b < a * 2) break;
            if (k >= 6) {
                const double ratio = inc / prev;
                if (ratio >= 0.97 || k > 200) return kInf;
                const double tail_estimate = inc * ratio / (1.0 - ratio);
                if (tail_estimate < 1e-7) {
                    total += tail_estimate;
                    break;
                }
            }
            prev = inc;
            a = b;
        }
    }
    return total;
}

HeavisideIdentityReport mq_identity_check(const EmpiricalMeasure& sample, const LawSpec& law) {
    if (sample.dim != 1 || law.dim != 1)
        throw std::invalid_argument("mq_identity_check: requires dim == 1");
    HeavisideIdentityReport rep;
    rep.w1_exact = w1_exact_1d(sample, law);

    // Independent route: adaptive quadrature of |Fhat - F| on panels split at
    // the sample points, plus far-tail cutoffs where the remainder is below
    // the acceptance tolerance.
    std::vector<double> xs(sample.points);
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    const auto fhat = [&](double t) {
        return static_cast<double>(std::upper_bound(xs.begin(), xs.end(), t) - xs.begin()) / n;
    };
    const auto integrand = [&](double t) { return std::abs(fhat(t) - law_cdf(law, t)); };
    const double lo = std::max(law_support_lo(law), std::min(xs.front(), law_quantile(law, 1e-12)));
    const double hi = std::max(xs.back(), std::min(law_support_hi(law), law_quantile(law, 1 - 1e-12)));
    std::vector<double> panels = {lo};
    for (double x : xs)
        if (x > lo && x < hi) panels.push_back(x);
    panels.push_back(hi);
    KahanSum quad;
    for (std::size_t i = 0; i + 1 < panels.size(); ++i) {
        const double a = panels[i], b = panels[i + 1];
        if (b - a > 1e-300) quad.add(simpson_adaptive(integrand, a + 1e-12 * (b - a),
                                                      b - 1e-12 * (b - a), 1e-12));
    }
    rep.w1_quadrature = quad.value();
    rep.residual = std::abs(rep.w1_exact - rep.w1_quadrature);
    rep.condclt_integral = condclt_integral(law);
    return rep;
}

}  // namespace lab
