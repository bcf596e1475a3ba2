#include "lab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lab/stats.hpp"

namespace lab {

namespace {

double sq_norm(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

}  // namespace

double DiscreteMeasure::norm_of(std::size_t i) const {
    return std::sqrt(sq_norm(point(i)));
}

bool validate(const DiscreteMeasure& mu, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (mu.dim < 1) return fail("dim must be positive");
    if (mu.points.size() != mu.weights.size() * static_cast<std::size_t>(mu.dim))
        return fail("points/weights size mismatch");
    if (mu.weights.empty()) return fail("empty measure");
    KahanSum total;
    for (double w : mu.weights) {
        if (!(w >= 0.0)) return fail("negative or NaN weight");
        total.add(w);
    }
    if (std::abs(total.value() - 1.0) > 1e-12) return fail("weights do not sum to 1 within 1e-12");
    for (double x : mu.points)
        if (!std::isfinite(x)) return fail("non-finite point coordinate");
    return true;
}

DiscreteMeasure EmpiricalMeasure::as_measure() const {
    DiscreteMeasure m;
    m.dim = dim;
    m.points = points;
    const std::size_t n = size();
    m.weights.assign(n, 1.0 / static_cast<double>(n));
    return m;
}

// ---------------------------------------------------------------------------
// Potentials

namespace {

// p(s) = sum_k c[k] s^k evaluated with Horner.
double horner(std::span<const double> c, double s) {
    double acc = 0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * s + c[k];
    return acc;
}

// d/ds of the polynomial above.
double horner_deriv(std::span<const double> c, double s) {
    double acc = 0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * c[k];
    return acc;
}

}  // namespace

double PotentialSpec::v_value(std::span<const double> x) const {
    double val = horner(v_even, sq_norm(x));
    if (!tilt.empty())
        for (std::size_t k = 0; k < x.size(); ++k) val += tilt[k] * x[k];
    return val;
}

void PotentialSpec::v_gradient(std::span<const double> x, std::span<double> out) const {
    // grad of p(|x|^2) is 2 p'(|x|^2) x
    const double dp = 2.0 * horner_deriv(v_even, sq_norm(x));
    for (std::size_t k = 0; k < x.size(); ++k)
        out[k] = dp * x[k] + (tilt.empty() ? 0.0 : tilt[k]);
}

double PotentialSpec::w_value(std::span<const double> z) const {
    return horner(w_even, sq_norm(z));
}

void PotentialSpec::w_gradient(std::span<const double> z, std::span<double> out) const {
    const double dp = 2.0 * horner_deriv(w_even, sq_norm(z));
    for (std::size_t k = 0; k < z.size(); ++k) out[k] = dp * z[k];
}

double PotentialSpec::v_value1(double x) const { return v_value({&x, 1}); }
double PotentialSpec::v_grad1(double x) const {
    double g;
    v_gradient({&x, 1}, {&g, 1});
    return g;
}
double PotentialSpec::w_grad1(double z) const {
    double g;
    w_gradient({&z, 1}, {&g, 1});
    return g;
}

double PotentialSpec::grad_v_at_zero_norm() const {
    if (tilt.empty()) return 0.0;
    double s = 0;
    for (double t : tilt) s += t * t;
    return std::sqrt(s);
}

namespace {

PotentialSpec finish_spec(PotentialSpec p, double gamma) {
    p.w_even = {0.0, gamma / 2.0};
    p.gamma = gamma;
    p.gamma_prime = gamma;
    p.Gamma = std::max(std::abs(p.gamma), std::abs(p.gamma_prime));
    return p;
}

}  // namespace

PotentialSpec make_quadratic_potential(double beta, double gamma) {
    PotentialSpec p;
    p.family = PotentialFamily::quadratic;
    p.v_even = {0.0, beta / 2.0};
    p.beta = beta;
    return finish_spec(p, gamma);
}

PotentialSpec make_quartic_potential(double c4, double beta, double gamma) {
    if (c4 < 0) throw std::invalid_argument("quartic potential needs c4 >= 0");
    PotentialSpec p;
    p.family = PotentialFamily::quartic_confinement;
    p.v_even = {0.0, beta / 2.0, c4};
    // D^2(|x|^4) = 4|x|^2 I + 8 x x^T >= 0, so V'' >= beta everywhere.
    p.beta = beta;
    return finish_spec(p, gamma);
}

PotentialSpec make_custom_potential(std::vector<double> v_even, double v_tilt, double gamma) {
    if (v_even.size() > 3)
        throw std::invalid_argument("custom potential: only even degree <= 4 supported");
    PotentialSpec p;
    p.family = PotentialFamily::custom_polynomial;
    p.v_even = std::move(v_even);
    if (v_tilt != 0.0) p.tilt = {v_tilt};
    // 1-D: V = a s + b s^2 with s = x^2 (ignoring the constant and tilt),
    // so V'' = 2a + 12 b x^2; with b >= 0 the infimum is 2a.
    const double a = p.v_even.size() > 1 ? p.v_even[1] : 0.0;
    const double b = p.v_even.size() > 2 ? p.v_even[2] : 0.0;
    if (b < 0) throw std::invalid_argument("custom potential: leading coefficient must be >= 0");
    p.beta = 2.0 * a;
    return finish_spec(p, gamma);
}

bool validate(const PotentialSpec& pot, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (pot.w_even.size() > 2) return fail("interaction potential must be quadratic (bounded Hessian)");
    if (pot.gamma > pot.gamma_prime) return fail("gamma > gamma'");
    if (pot.Gamma != std::max(std::abs(pot.gamma), std::abs(pot.gamma_prime)))
        return fail("Gamma != max(|gamma|,|gamma'|)");
    // W even: by construction (polynomial in |z|^2), nothing to check.
    return true;
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

// Normalization constants for the unit-ball kernels, d = 1 only where a
// closed form is not worth carrying. Triangular in d dims integrates to
// vol(S^{d-1}) * int_0^1 (1-r) r^{d-1} dr; we only need d = 1 and d = 2.
double triangular_norm(int dim) {
    switch (dim) {
        case 1: return 1.0;                       // int_{-1}^{1} (1-|x|) = 1
        case 2: return 3.1415926535897932 / 3.0;  // 2 pi (1/2 - 1/3)
        default: throw std::invalid_argument("triangular kernel: dim must be 1 or 2");
    }
}

// int of exp(-1/(1-x^2)) over its support, computed to 1e-14 once with
// high-order quadrature (d = 1).
constexpr double kBumpMass1D = 0.44399381616807937;

}  // namespace

double Kernel::value(double r) const {
    r = std::abs(r);
    if (r >= 1.0) return 0.0;
    switch (shape) {
        case Shape::triangular:
            return (1.0 - r) / triangular_norm(dim);
        case Shape::smooth_bump: {
            if (dim != 1) throw std::invalid_argument("smooth bump kernel implemented for d = 1");
            return std::exp(-1.0 / (1.0 - r * r)) / kBumpMass1D;
        }
    }
    return 0.0;
}

double Kernel::lipschitz_norm() const {
    switch (shape) {
        case Shape::triangular:
            return 1.0 / triangular_norm(dim);
        case Shape::smooth_bump: {
            // max |d/dr exp(-1/(1-r^2))| over [0,1); attained near r = 0.76
            double best = 0;
            for (int i = 1; i < 4096; ++i) {
                const double r = i / 4096.0;
                const double u = 1.0 - r * r;
                const double g = std::exp(-1.0 / u) * 2.0 * r / (u * u);
                best = std::max(best, g);
            }
            return best / kBumpMass1D;
        }
    }
    return 0.0;
}

Kernel make_kernel(Kernel::Shape shape, int dim) {
    Kernel k{shape, dim};
    std::string why;
    if (!validate(k, &why)) throw std::invalid_argument("kernel: " + why);
    return k;
}

bool validate(const Kernel& k, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (k.dim < 1) return fail("dim must be positive");
    if (k.shape == Kernel::Shape::smooth_bump && k.dim != 1)
        return fail("smooth bump kernel implemented for d = 1");
    if (k.shape == Kernel::Shape::triangular && k.dim > 2)
        return fail("triangular kernel implemented for d <= 2");
    return true;
}

// ---------------------------------------------------------------------------
// Laws and sampling

LawSpec gaussian_law(double mean, double sd, int dim) {
    LawSpec l;
    l.kind = LawSpec::Kind::gaussian;
    l.mean = mean;
    l.scale = sd;
    l.dim = dim;
    return l;
}

LawSpec uniform_ball_law(double radius, int dim) {
    LawSpec l;
    l.kind = LawSpec::Kind::uniform_ball;
    l.radius = radius;
    l.dim = dim;
    return l;
}

LawSpec student_t_law(double dof, double scale, int dim) {
    LawSpec l;
    l.kind = LawSpec::Kind::student_t;
    l.dof = dof;
    l.scale = scale;
    l.dim = dim;
    return l;
}

bool validate(const LawSpec& law, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (law.dim < 1) return fail("dim must be positive");
    switch (law.kind) {
        case LawSpec::Kind::gaussian:
            if (!(law.scale > 0)) return fail("gaussian sd must be positive");
            break;
        case LawSpec::Kind::uniform_ball:
            if (!(law.radius > 0)) return fail("ball radius must be positive");
            break;
        case LawSpec::Kind::student_t:
            if (!(law.scale > 0)) return fail("student-t scale must be positive");
            if (!(law.dof > 1)) return fail("student-t needs dof > 1 for a finite mean");
            break;
    }
    return true;
}

namespace {

// Chi-square with k degrees of freedom as a sum of squared normals for
// integer k, otherwise via Gamma(k/2, 2) using Marsaglia-Tsang.
double sample_gamma(double shape, RngStream& rng) {
    if (shape < 1.0) {
        const double u = rng.uniform_pos();
        return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = rng.normal();
        double v = 1.0 + c * x;
        if (v <= 0) continue;
        v = v * v * v;
        const double u = rng.uniform_pos();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

}  // namespace

void sample_point(const LawSpec& law, RngStream& rng, std::span<double> out) {
    const int d = law.dim;
    switch (law.kind) {
        case LawSpec::Kind::gaussian:
            for (int k = 0; k < d; ++k) out[k] = law.mean + law.scale * rng.normal();
            return;
        case LawSpec::Kind::uniform_ball: {
            // direction from normals, radius R U^{1/d}
            double nrm2 = 0;
            for (int k = 0; k < d; ++k) {
                out[k] = rng.normal();
                nrm2 += out[k] * out[k];
            }
            const double r = law.radius * std::pow(rng.uniform_pos(), 1.0 / d);
            const double s = nrm2 > 0 ? r / std::sqrt(nrm2) : 0.0;
            for (int k = 0; k < d; ++k) out[k] *= s;
            return;
        }
        case LawSpec::Kind::student_t: {
            // independent coordinates: Z * sqrt(nu / chi2_nu)
            for (int k = 0; k < d; ++k) {
                const double z = rng.normal();
                const double chi2 = 2.0 * sample_gamma(law.dof / 2.0, rng);
                out[k] = law.scale * z * std::sqrt(law.dof / chi2);
            }
            return;
        }
    }
}

EmpiricalMeasure sample_iid(const LawSpec& law, std::size_t n, RngSpec rng) {
    std::string why;
    if (!validate(law, &why)) throw std::invalid_argument("sample_iid: " + why);
    if (n == 0) throw std::invalid_argument("sample_iid: n must be >= 1");
    EmpiricalMeasure out;
    out.dim = law.dim;
    out.points.resize(n * static_cast<std::size_t>(law.dim));
    RngStream stream(rng);
    for (std::size_t i = 0; i < n; ++i)
        sample_point(law, stream, {out.points.data() + i * static_cast<std::size_t>(law.dim),
                                   static_cast<std::size_t>(law.dim)});
    return out;
}

// ---------------------------------------------------------------------------
// Measure operations

DiscreteMeasure truncate(const DiscreteMeasure& mu, double R) {
    if (!(R > 0)) throw std::invalid_argument("truncate: R must be positive");
    DiscreteMeasure out;
    out.dim = mu.dim;
    KahanSum kept;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu.norm_of(i) <= R) {
            out.weights.push_back(mu.weights[i]);
            const auto p = mu.point(i);
            out.points.insert(out.points.end(), p.begin(), p.end());
            kept.add(mu.weights[i]);
        }
    }
    const double mass = kept.value();
    if (!(mass > 0)) throw std::domain_error("truncate: no mass inside B_R");
    for (double& w : out.weights) w /= mass;
    return out;
}

double sq_exp_moment(const DiscreteMeasure& mu, double alpha) {
    if (!(alpha > 0)) throw std::invalid_argument("sq_exp_moment: alpha must be positive");
    KahanSum s;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double r = mu.norm_of(i);
        const double term = mu.weights[i] * std::exp(alpha * r * r);
        if (!std::isfinite(term)) return std::numeric_limits<double>::infinity();
        s.add(term);
    }
    return s.value();
}

double poly_moment(const DiscreteMeasure& mu, double q) {
    if (!(q >= 1)) throw std::invalid_argument("poly_moment: q must be >= 1");
    KahanSum s;
    for (std::size_t i = 0; i < mu.size(); ++i) s.add(mu.weights[i] * std::pow(mu.norm_of(i), q));
    return s.value();
}

}  // namespace lab
