#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lab/measures.hpp"

namespace lab {

// Parameters of the square-exponential concentration regime: a T_p(lambda)
// reference with the slack constants every explicit bound carries.
struct TpParams {
    double p = 1.0;
    double lambda = 1.0;
    double lambda_prime = 0.9;  // < lambda
    double d = 1.0;
    double d_prime = 2.0;       // > d
    double alpha = 0.4;         // < lambda / 2
    double E_alpha = 1.0;       // square-exponential moment at alpha
    double N0 = 1.0;            // sample-size constant (not computable from theory)
    bool n0_is_default = true;  // true when N0 was never calibrated by the caller
};

bool validate(const TpParams& params, std::string* why = nullptr);

// Deviation-probability report: evaluated bound next to a Monte Carlo
// estimate with an exact binomial confidence interval.
struct BoundReport {
    std::string theorem;
    double p = 1.0;
    std::size_t N = 0;
    double epsilon = 0.0;
    double bound = 1.0;      // clamped to [0, 1]
    double bound_raw = 1.0;  // unclamped value
    double mc_estimate = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    std::size_t trials = 0;
    bool admissible = false;
};

// gamma_p from the order-p deviation bound: 1 on [1,2), 3 - 2 sqrt(2) at 2.
double gamma_p(double p);

struct TpBound {
    double bound = 1.0;      // clamped
    double bound_raw = 1.0;
    bool admissible = false;  // N >= N0 max(eps^-(d'+2), 1)
};

// exp(-gamma_p (lambda'/2) N eps^2) with its admissibility flag.
TpBound bound_tp(const TpParams& params, std::size_t N, double epsilon);

struct MqBound {
    double bound = 1.0;
    double bound_raw = 1.0;
    int regime = 0;            // 1: p < q/2, 2: q/2 <= p < q
    double n_threshold = 0.0;  // N0 max(eps^{-q(2p+d')/(q-p)}, eps^{d'-d})
    bool admissible = false;
};

// Polynomial-moment deviation bound; q-th moment finite, order p < q.
MqBound bound_mq(double q, double p, double delta, std::size_t N, double epsilon, double d = 1.0,
                 double d_prime = 2.0, double N0 = 1.0);

// Variant bounds under alternative integrability assumptions.
//   i  : exp(-K N^{1/p} min(eps, eps^2))          (finite exp(alpha |x|) moment)
//   ii : exp(-K N min(eps^2, eps^a)), a < 2       (T_1 + Poincare)
//   iii: min of the two displayed order-p > 2 expressions
enum class VarVariant { i, ii, iii };
struct VarParams {
    double p = 1.0;
    double K = 1.0;
    double a = 1.0;            // variant ii only
    double lambda_prime = 1.0; // variant iii only
    double d_prime = 2.0;      // variant iii only
};
double bound_var(VarVariant variant, const VarParams& params, std::size_t N, double epsilon);

struct TruncationBound {
    double value = 0.0;   // bound on W_p^p(mu, mu_R)
    bool admissible = false;  // R >= sqrt(p / (2 alpha))
};
// 2^p E_alpha R^p exp(-alpha R^2).
TruncationBound truncation_bound(double E_alpha, double alpha, double R, double p);

// Closed-form relative entropy H(N(m1,s1^2) | N(m2,s2^2)).
double relative_entropy_gaussian(double m1, double s1, double m2, double s2);

// Residual sqrt(2 H / lambda) - W_p for nu = N(m,1) against mu = N(0,1);
// zero iff the T_p(lambda) inequality is tight for this pair, negative when
// it fails. p in {1, 2}.
double tp_residual_gaussian(double m, double lambda, double p);

// --- Monte Carlo ------------------------------------------------------------

// W_p(mu_hat^N, mu) for `trials` independent samples. For p = 1 in 1-D the
// distance against the analytic law is exact via the CDF formula; for any
// other case a reference representation must be supplied (1-D uses the
// exact quantile coupling against it, d > 1 the flow solver). Trials draw
// from rng.sub(trial), so results do not depend on the number of jobs.
std::vector<double> mc_distances(const LawSpec& law, double p, std::size_t N, std::size_t trials,
                                 RngSpec rng, unsigned jobs = 0,
                                 const EmpiricalMeasure* reference = nullptr);

// Deviation-probability estimate at one epsilon; when `params` is given the
// theoretical bound and admissibility flag are filled in.
BoundReport mc_deviation(const LawSpec& law, double p, std::size_t N, double epsilon,
                         std::size_t trials, RngSpec rng,
                         const std::optional<TpParams>& params = std::nullopt, unsigned jobs = 0,
                         const EmpiricalMeasure* reference = nullptr);

// Same trial set evaluated at several thresholds (monotone by construction).
std::vector<BoundReport> mc_deviation_curve(const LawSpec& law, double p, std::size_t N,
                                            const std::vector<double>& epsilons,
                                            std::size_t trials, RngSpec rng,
                                            const std::optional<TpParams>& params = std::nullopt,
                                            unsigned jobs = 0,
                                            const EmpiricalMeasure* reference = nullptr);

// --- The d = p = 1 Heaviside identity ---------------------------------------

struct HeavisideIdentityReport {
    double w1_exact = 0.0;       // closed-form piecewise route
    double w1_quadrature = 0.0;  // adaptive quadrature of |F_hat - F|
    double residual = 0.0;       // absolute difference of the two routes
    double condclt_integral = 0.0;  // int sqrt(F (1-F)); +inf when divergent
};

HeavisideIdentityReport mq_identity_check(const EmpiricalMeasure& sample, const LawSpec& law);

// int sqrt(F (1 - F)) for the law alone (+inf sentinel when divergent).
double condclt_integral(const LawSpec& law);

}  // namespace lab
