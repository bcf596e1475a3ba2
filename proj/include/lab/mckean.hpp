#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lab/grid1d.hpp"
#include "lab/measures.hpp"
#include "lab/stats.hpp"

namespace lab {

// Interacting-particle simulation setup. Noise is drawn from one Philox
// substream per particle, so runs are reproducible bit-for-bit regardless
// of threading, and permuting the stream tags permutes the trajectories.
struct SimConfig {
    std::size_t n_particles = 2;
    int dim = 1;
    double dt = 1e-3;
    double T = 1.0;
    PotentialSpec potential;
    LawSpec initial;
    RngSpec rng;
    int save_stride = 1;   // store every k-th step
    unsigned jobs = 1;     // threads for the pairwise force loop
    std::vector<std::uint64_t> stream_tags;  // optional per-particle tags

    double stability_cap() const;  // 0.5 / max(|beta| + 2 Gamma, 1)
};

bool validate(const SimConfig& config, std::string* why = nullptr);

// Saved trajectory frames of the interacting system X and, when coupled,
// the independent system Y driven by the same noise.
struct TrajectoryBundle {
    std::size_t n = 0;
    int dim = 1;
    double dt = 0.0;
    int save_stride = 1;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    bool shared_noise = false;
    std::vector<double> times;
    std::vector<std::vector<double>> X;  // frames, each n*dim
    std::vector<std::vector<double>> Y;  // empty unless coupled

    bool has_coupled() const { return !Y.empty(); }
    std::size_t frame_index(double t) const;  // throws with a nearest-time hint
};

// Euler-Maruyama for dX^i = sqrt(2) dB^i - grad V(X^i) dt
//                         - (1/N) sum_j grad W(X^i - X^j) dt,
// with the exact pairwise interaction sum each step.
TrajectoryBundle simulate_interacting(const SimConfig& config);

// Couples the interacting system with the independent system
//   dY^i = sqrt(2) dB^i - grad V(Y^i) dt - (grad W * mu_t)(Y^i) dt,
// both driven by the same increments, Y^i_0 = X^i_0. The reference measure
// flow mu_t is given as grid-density frames covering [0, T] at least as
// finely as the save stride.
TrajectoryBundle simulate_coupled(const SimConfig& config,
                                  const std::vector<GridDensity1D>& mu_ref);

// Same dynamics as the Y system alone (independent particles under the
// reference flow); cheap O(N) per step.
TrajectoryBundle simulate_independent(const SimConfig& config,
                                      const std::vector<GridDensity1D>& mu_ref);

enum class Slice { X, Y };

EmpiricalMeasure empirical_at(const TrajectoryBundle& bundle, double t, Slice which);

// Pair empirical measure on R^{2d}: N(N-1) off-diagonal atoms.
DiscreteMeasure pair_empirical(const TrajectoryBundle& bundle, double t);

// Pathwise coupling inequality: at every saved time,
//   W1(mu_hat_t, mu_t) <= Gamma int_0^t e^{-alpha (t-s)} W1(nu_hat_s, mu_s) ds
//                         + W1(nu_hat_t, mu_t),
// alpha = beta + 2 min(gamma, 0); the integral uses the trapezoid rule on
// the saved grid.
struct CouplingReport {
    std::vector<double> times;
    std::vector<double> w1_mu_ref;  // W1(mu_hat_t, mu_t)
    std::vector<double> w1_nu_ref;  // W1(nu_hat_t, mu_t)
    std::vector<double> w1_mu_nu;   // W1(mu_hat_t, nu_hat_t)
    std::vector<double> rhs;
    std::vector<double> residual;   // rhs - lhs
    double min_residual = 0.0;
    double alpha = 0.0;
};
CouplingReport coupling_check(const TrajectoryBundle& bundle,
                              const std::vector<GridDensity1D>& mu_ref,
                              const PotentialSpec& potential);

// Time-regularity moments of the independent system: for each pair (s, t),
// E|Y_t - Y_s|^2, E|Y_t - Y_s|^4 (particle averages; the particles are
// i.i.d. paths) and E sup_{s <= u <= t} exp(a |Y_u - Y_s|^2) on the saved
// grid, plus log-log fits of the first two against |t - s|.
struct SdeRegularityReport {
    std::vector<double> gap;
    std::vector<double> m2;
    std::vector<double> m4;
    std::vector<double> exp_sup;
    LinearFit m2_fit;   // expected slope ~ 1
    LinearFit m4_fit;   // expected slope ~ 2
};
SdeRegularityReport sde_regularity_check(const SimConfig& config,
                                         const std::vector<GridDensity1D>& mu_ref,
                                         const std::vector<double>& gaps, double exp_coeff);

// MC estimates of P[sup_{s,t in [0,Delta]} W1(nu_hat_s, nu_hat_t) > eps]
// and P[sup_{t in [0,T]} W1(mu_hat_t, mu_t) > eps]; suprema run over the
// saved grid (documented surrogate for the continuum supremum).
struct SupDeviationReport {
    double window_estimate = 0.0;
    double window_ci_lo = 0.0, window_ci_hi = 1.0;
    double horizon_estimate = 0.0;
    double horizon_ci_lo = 0.0, horizon_ci_hi = 1.0;
    std::size_t trials = 0;
};
SupDeviationReport sup_deviation_over_window(const SimConfig& config,
                                             const std::vector<GridDensity1D>& mu_ref,
                                             double epsilon, double window, std::size_t trials);

}  // namespace lab
