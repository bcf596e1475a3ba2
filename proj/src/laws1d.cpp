#include "lab/laws1d.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_1d(const LawSpec& law) {
    if (law.dim != 1) throw std::invalid_argument("analytic law functions require dim == 1");
}

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }
double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) * 0.39894228040143267794; }
// A(z) = z Phi(z) + phi(z), the antiderivative of Phi vanishing at -inf.
double std_normal_cdf_antideriv(double z) { return z * std_normal_cdf(z) + std_normal_pdf(z); }

double student_t_density_norm(double nu) {
    return std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) /
           std::sqrt(nu * 3.14159265358979323846);
}

}  // namespace

double law_cdf(const LawSpec& law, double t) {
    require_1d(law);
    switch (law.kind) {
        case LawSpec::Kind::gaussian:
            return std_normal_cdf((t - law.mean) / law.scale);
        case LawSpec::Kind::uniform_ball: {
            const double R = law.radius;
            if (t <= -R) return 0.0;
            if (t >= R) return 1.0;
            return (t + R) / (2 * R);
        }
        case LawSpec::Kind::student_t: {
            boost::math::students_t dist(law.dof);
            return boost::math::cdf(dist, t / law.scale);
        }
    }
    return 0.0;
}

double law_pdf(const LawSpec& law, double t) {
    require_1d(law);
    switch (law.kind) {
        case LawSpec::Kind::gaussian:
            return std_normal_pdf((t - law.mean) / law.scale) / law.scale;
        case LawSpec::Kind::uniform_ball:
            return std::abs(t) <= law.radius ? 1.0 / (2 * law.radius) : 0.0;
        case LawSpec::Kind::student_t: {
            boost::math::students_t dist(law.dof);
            return boost::math::pdf(dist, t / law.scale) / law.scale;
        }
    }
    return 0.0;
}

double law_cdf_antideriv(const LawSpec& law, double t) {
    require_1d(law);
    switch (law.kind) {
        case LawSpec::Kind::gaussian:
            return law.scale * std_normal_cdf_antideriv((t - law.mean) / law.scale);
        case LawSpec::Kind::uniform_ball: {
            const double R = law.radius;
            if (t <= -R) return 0.0;
            if (t >= R) return t;
            return (t + R) * (t + R) / (4 * R);
        }
        case LawSpec::Kind::student_t: {
            const double nu = law.dof;
            const double z = t / law.scale;
            const double c = student_t_density_norm(nu);
            const double a =
                z * law_cdf(law, t) +
                c * (nu / (nu - 1)) * std::pow(1.0 + z * z / nu, -(nu - 1) / 2);
            return law.scale * a;
        }
    }
    return 0.0;
}

double law_quantile(const LawSpec& law, double u) {
    require_1d(law);
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("law_quantile: u must be in (0,1)");
    switch (law.kind) {
        case LawSpec::Kind::gaussian: {
            boost::math::normal dist(law.mean, law.scale);
            return boost::math::quantile(dist, u);
        }
        case LawSpec::Kind::uniform_ball:
            return -law.radius + 2 * law.radius * u;
        case LawSpec::Kind::student_t: {
            boost::math::students_t dist(law.dof);
            return law.scale * boost::math::quantile(dist, u);
        }
    }
    return 0.0;
}

double law_mean1d(const LawSpec& law) {
    require_1d(law);
    return law.kind == LawSpec::Kind::gaussian ? law.mean : 0.0;
}

double law_upper_tail_integral(const LawSpec& law, double t) {
    return law_mean1d(law) - t + law_cdf_antideriv(law, t);
}

double law_support_lo(const LawSpec& law) {
    require_1d(law);
    return law.kind == LawSpec::Kind::uniform_ball ? -law.radius : -kInf;
}

double law_support_hi(const LawSpec& law) {
    require_1d(law);
    return law.kind == LawSpec::Kind::uniform_ball ? law.radius : kInf;
}

}  // namespace lab
