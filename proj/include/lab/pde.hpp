#pragma once

#include <optional>
#include <vector>

#include "lab/grid1d.hpp"
#include "lab/measures.hpp"
#include "lab/stats.hpp"

namespace lab {

// Time series of integrated quantities along a PDE solve.
struct MomentTrace {
    std::vector<double> times;
    std::vector<double> second_moment;  // e(t)
    std::vector<double> mean;
    std::vector<double> alpha;          // alpha(t) schedule, if tracked
    std::vector<double> m_alpha;        // M_{alpha(t)}(t), if tracked
};

struct PdeOptions {
    double theta = 0.5;      // 0.5 Crank-Nicolson, 1.0 backward Euler
    int save_every = 1;      // frame stride in steps
    double alpha0 = 0.0;     // > 0 enables square-exponential moment tracking
    double alpha_b = 0.0;    // decay parameter of the alpha(t) schedule
    double boundary_leak_tol = 1e-10;  // max allowed boundary-cell mass
    double clip_abort = 1e-8;          // abort when clipped mass exceeds this
};

struct PdeResult {
    std::vector<GridDensity1D> frames;
    MomentTrace trace;
    double total_clipped = 0.0;
    double max_step_mass_drift = 0.0;
    double min_cell_before_clip = 0.0;
    int steps = 0;
    double dt = 0.0;
};

// Conservative finite-volume solve of
//   df/dt = d/dx ( df/dx + f (V' + W' * f) )
// on the grid of `initial`, zero-flux boundaries. Faces use exponentially
// fitted (Scharfetter-Gummel) weights, so the matrix is an M-matrix and the
// discrete stationary profile matches exp(-phi) to second order; the
// convolution coefficient is refreshed explicitly each step and the linear
// flux is treated by a theta scheme (tridiagonal solve).
PdeResult solve_mckean_1d(const PotentialSpec& potential, const GridDensity1D& initial, double T,
                          double dt, const PdeOptions& opts = {});

// Domain wide enough that both the initial density and the stationary
// profile exp(-phi) are below 1e-16 of their peaks at the boundary, with a
// 50% margin.
GridDensity1D initial_grid(const PotentialSpec& potential, double mean, double sd, int n_cells);

// Gronwall energy bound: e(t) <= exp(-a t) [e(0) + G (exp(a t) - 1)/a] with
// a = 2 (beta + eta_bar), G = 2 d + |grad V(0)|^2 / (2 |eta_bar|).
// eta_bar defaults to gamma when gamma < 0 and to -1e-3 otherwise.
struct GronwallCheck {
    std::vector<double> times;
    std::vector<double> bound;
    std::vector<double> residual;  // bound - e(t)
    double min_residual = 0.0;
    double eta_bar = 0.0;
};
GronwallCheck energy_gronwall_check(const MomentTrace& trace, const PotentialSpec& potential,
                                    std::optional<double> eta_bar = std::nullopt, int dim = 1);

// alpha(t) = e^{-b t} (1/alpha0 + 4 (1 - e^{-b t}) / b)^{-1}, with the b = 0
// limit (1/alpha0 + 4 t)^{-1}.
class AlphaSchedule {
  public:
    AlphaSchedule(double alpha0, double b);
    double operator()(double t) const;

  private:
    double alpha0_;
    double b_;
};

// Fits W_1(mu_s, mu_t) ~ C |t-s|^q over dyadic time gaps from the first
// frame; q near 1/2 is the expected short-time regularity.
struct TimeHolderReport {
    LinearFit loglog;           // slope = fitted exponent
    double max_ratio = 0.0;     // max W_1 / sqrt(|t-s|)
    std::vector<double> gaps;
    std::vector<double> w1;
};
TimeHolderReport time_holder_check(const std::vector<GridDensity1D>& frames);

// Fits log W_2(mu_t, mu_inf) ~ log C - lambda t. Refuses outside the
// uniformly convex regime (beta > 0, beta + 2 gamma > 0).
struct EquilibriumRateReport {
    double lambda_hat = 0.0;
    double r_squared = 0.0;
    std::size_t points_used = 0;
    double plateau = 0.0;  // terminal W_2, the discretization floor
};
EquilibriumRateReport equilibrium_convergence_check(const std::vector<GridDensity1D>& frames,
                                                    const GridDensity1D& mu_inf,
                                                    const PotentialSpec& potential);

}  // namespace lab
