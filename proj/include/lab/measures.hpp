#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lab/rng.hpp"

namespace lab {

// Weighted point cloud in R^d. Weights are nonnegative and sum to one.
// Immutable by convention once built; all operations return new measures.
struct DiscreteMeasure {
    int dim = 1;
    std::vector<double> weights;
    std::vector<double> points;  // row-major, size() * dim entries

    std::size_t size() const { return weights.size(); }
    std::span<const double> point(std::size_t i) const {
        return {points.data() + static_cast<std::ptrdiff_t>(i) * dim, static_cast<std::size_t>(dim)};
    }
    double norm_of(std::size_t i) const;
};

// Checks the type invariants: matching sizes, nonnegative weights,
// total mass 1 within 1e-12. Returns false and fills `why` on failure.
bool validate(const DiscreteMeasure& mu, std::string* why = nullptr);

// Uniform-weight empirical measure; weights are 1/N by construction and
// never stored.
struct EmpiricalMeasure {
    int dim = 1;
    std::vector<double> points;

    std::size_t size() const { return points.size() / static_cast<std::size_t>(dim); }
    std::span<const double> point(std::size_t i) const {
        return {points.data() + static_cast<std::ptrdiff_t>(i) * dim, static_cast<std::size_t>(dim)};
    }
    DiscreteMeasure as_measure() const;
};

enum class PotentialFamily { quadratic, quartic_confinement, custom_polynomial };

// Confinement potential V and interaction potential W with certified
// convexity bounds: D^2 V >= beta I and gamma I <= D^2 W <= gamma' I.
//
// V(x) = sum_k v[k] |x|^{2k}  + tilt . x      (even radial part plus a linear term)
// W(z) = w0 + w1 |z|^2                        (even; quadratic so the Hessian is bounded)
//
// Interaction polynomials of degree > 2 are rejected: they have no finite
// upper Hessian bound, which every estimate here requires.
struct PotentialSpec {
    PotentialFamily family = PotentialFamily::quadratic;
    std::vector<double> v_even;       // coefficients of |x|^{2k}, k = 0..deg
    std::vector<double> tilt;         // linear term of V; empty means zero
    std::vector<double> w_even;       // {w0, w1}
    double beta = 0.0;                // lower Hessian bound of V
    double gamma = 0.0;               // lower Hessian bound of W
    double gamma_prime = 0.0;         // upper Hessian bound of W
    double Gamma = 0.0;               // max(|gamma|, |gamma'|)

    double v_value(std::span<const double> x) const;
    void v_gradient(std::span<const double> x, std::span<double> out) const;
    double w_value(std::span<const double> z) const;
    void w_gradient(std::span<const double> z, std::span<double> out) const;
    // 1-D conveniences.
    double v_value1(double x) const;
    double v_grad1(double x) const;
    double w_grad1(double z) const;
    double grad_v_at_zero_norm() const;
};

// V = (beta/2)|x|^2, W = (gamma/2)|z|^2; the workhorse test family.
PotentialSpec make_quadratic_potential(double beta, double gamma);
// V = c4 |x|^4 + (beta/2)|x|^2 (c4 >= 0), W = (gamma/2)|z|^2.
PotentialSpec make_quartic_potential(double c4, double beta, double gamma);
// 1-D polynomial V (ascending coefficients, even powers plus optional
// linear term), quadratic W. Certifies beta from the closed-form minimum
// of V''.
PotentialSpec make_custom_potential(std::vector<double> v_even, double v_tilt, double gamma);

bool validate(const PotentialSpec& pot, std::string* why = nullptr);

// Mollification kernel on the unit ball: nonnegative, unit integral,
// radial. `triangular` is (1-|x|)+ up to normalization; `smooth_bump` is
// the C^infinity bump exp(-1/(1-|x|^2)).
struct Kernel {
    enum class Shape { triangular, smooth_bump };
    Shape shape = Shape::triangular;
    int dim = 1;

    double value(double r) const;      // at radius r >= 0; 0 for r >= 1
    double lipschitz_norm() const;
    double support_radius() const { return 1.0; }
};

Kernel make_kernel(Kernel::Shape shape, int dim);
bool validate(const Kernel& k, std::string* why = nullptr);

// i.i.d. sampling laws.
struct LawSpec {
    enum class Kind { gaussian, uniform_ball, student_t };
    Kind kind = Kind::gaussian;
    int dim = 1;
    double mean = 0.0;    // gaussian: per-coordinate mean
    double scale = 1.0;   // gaussian: sd; student_t: scale
    double radius = 1.0;  // uniform_ball
    double dof = 3.0;     // student_t: degrees of freedom (> 1)
};

LawSpec gaussian_law(double mean, double sd, int dim = 1);
LawSpec uniform_ball_law(double radius, int dim = 1);
LawSpec student_t_law(double dof, double scale = 1.0, int dim = 1);
bool validate(const LawSpec& law, std::string* why = nullptr);

// Draws one point of `law` into out[0..dim); advances the stream.
void sample_point(const LawSpec& law, RngStream& rng, std::span<double> out);

// N i.i.d. draws as a uniform-weight empirical measure.
EmpiricalMeasure sample_iid(const LawSpec& law, std::size_t n, RngSpec rng);

// Restriction of mu to the closed ball B_R, renormalized. Throws
// std::domain_error if no mass is inside.
DiscreteMeasure truncate(const DiscreteMeasure& mu, double R);

// Square-exponential moment  sum_i w_i exp(alpha |x_i|^2). Returns +inf
// on overflow.
double sq_exp_moment(const DiscreteMeasure& mu, double alpha);

// Polynomial moment  sum_i w_i |x_i|^q, q >= 1.
double poly_moment(const DiscreteMeasure& mu, double q);

}  // namespace lab
