#pragma once

#include <cstddef>
#include <vector>

#include "lab/grid1d.hpp"
#include "lab/measures.hpp"
#include "lab/mckean.hpp"
#include "lab/transport.hpp"

namespace lab {

// 1-D gaussian mixture: the reconstruction test target. Carries closed-form
// density, CDF, CDF antiderivative and a certified Lipschitz constant.
struct Mixture1D {
    struct Component {
        double weight;
        double mean;
        double sd;
    };
    std::vector<Component> components;

    double pdf(double x) const;
    double cdf(double x) const;
    double cdf_antideriv(double x) const;
    double quantile(double u) const;  // bisection on the cdf
    double mean() const;
    double lipschitz_constant() const;  // sum_i w_i max|f_i'| (upper bound)
    Cdf1D as_cdf() const;

    EmpiricalMeasure sample(std::size_t n, RngSpec rng) const;
};

Mixture1D single_gaussian(double mean, double sd);

// Mollified empirical measure f_tilde(x) = (1/N) sum_i zeta_alpha(x - X_i),
// zeta_alpha = alpha^{-d} zeta(x / alpha). Evaluation only touches atoms
// within alpha of x (kernel support).
class MollifiedDensity {
  public:
    MollifiedDensity(const EmpiricalMeasure& base, const Kernel& kernel, double alpha);

    double value(double x) const;  // d = 1
    double alpha() const { return alpha_; }
    const Kernel& kernel() const { return kernel_; }
    // Lipschitz bound L_zeta / alpha^{d+1}.
    double lipschitz_bound() const;
    // int f_tilde over an auto-sized grid (should be 1 up to quadrature error).
    double integral(int points_per_bandwidth = 64) const;

  private:
    std::vector<double> sorted_points_;
    Kernel kernel_;
    double alpha_;
    int dim_;
};

MollifiedDensity mollify(const EmpiricalMeasure& mu, const Kernel& kernel, double alpha);

// ||zeta||_Lip / alpha^{d+1} * W1 + delta(alpha) for a given modulus value
// delta_alpha = delta(alpha).
double sup_error_bound(double w1, double alpha, double kernel_lipschitz, int dim,
                       double delta_alpha);

// One seeded trial of the sup-norm reconstruction estimate against a known
// Lipschitz target: alpha = eps / (2L), L = max(L_f, L_zeta); the measured
// grid supremum carries a Lipschitz grid-gap correction so it upper-bounds
// the true supremum.
struct ReconstructionReport {
    double epsilon = 0.0;
    double alpha = 0.0;
    double L = 0.0;           // max(L_f, L_zeta)
    double K = 0.0;           // (2L)^{-(d+2)}
    double w1 = 0.0;          // exact W1(mu_hat, mu)
    double sup_error = 0.0;   // corrected grid supremum of |f_tilde - f|
    double bound = 0.0;       // the sup-error inequality right-hand side
    bool inequality_ok = false;    // sup_error <= bound
    bool deviation_event = false;  // sup_error > epsilon
    bool budget_event = false;     // w1 > K eps^{d+2}
    bool implication_ok = false;   // deviation_event => budget_event
};

ReconstructionReport reconstruction_check(const EmpiricalMeasure& sample, const Mixture1D& target,
                                          const Kernel& kernel, double epsilon);

// Same machinery with the target given as a grid density (piecewise-linear
// interpolant; Lipschitz constant certified from its finite differences).
ReconstructionReport reconstruction_check_grid(const EmpiricalMeasure& sample,
                                               const GridDensity1D& target, const Kernel& kernel,
                                               double epsilon);

// Late-time reconstruction of the equilibrium density from an interacting
// bundle: every saved slice at or after `burn_in` is checked against mu_inf.
struct EquilibriumReconstructionReport {
    std::size_t times_checked = 0;
    std::size_t deviations = 0;       // sup_error > epsilon events
    double deviation_frequency = 0.0;
    double max_sup_error = 0.0;
    bool all_inequalities_ok = true;  // the sup-error bound held at every slice
};

EquilibriumReconstructionReport equilibrium_reconstruction(const TrajectoryBundle& bundle,
                                                           const GridDensity1D& mu_inf,
                                                           double epsilon,
                                                           const PotentialSpec& potential,
                                                           const Kernel& kernel, double burn_in);

}  // namespace lab
