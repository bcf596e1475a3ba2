#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lab/measures.hpp"

namespace lab {

// Finite cover of the ball B_R by balls of radius r centered on a lattice.
struct BallCover {
    int dim = 1;
    double R = 1.0;
    double r = 1.0;
    std::vector<double> centers;  // row-major, count * dim

    std::size_t count() const { return centers.size() / static_cast<std::size_t>(dim); }
    std::span<const double> center(std::size_t j) const {
        return {centers.data() + static_cast<std::ptrdiff_t>(j) * dim,
                static_cast<std::size_t>(dim)};
    }
    // Certified constant k with count <= k (R/r)^d for this construction.
    double certified_lattice_constant() const;
};

// Measure on the cover centers with exact rational weights k_j / K.
struct NetPoint {
    std::int64_t K = 1;
    std::vector<std::int64_t> numerators;  // one per cover center, sums to K

    DiscreteMeasure as_measure(const BallCover& cover) const;
};

// Covers B_R with balls of radius r centered on the lattice (r/sqrt(d)) Z^d,
// keeping the lattice points whose cells intersect B_R. Throws CapacityError
// when d (R/r)^d > 1e7. With r >= 2R a single ball at the origin suffices.
BallCover cover_ball_lattice(double R, double r, int d);

// Verifies the covering property on a probe grid of pitch r/10 over B_R;
// returns the fraction of probes within r of some center (1.0 means covered).
double probe_grid_coverage(const BallCover& cover, double pitch_factor = 0.1);

// Projects each atom of mu to the first cover center within distance r
// (the sequential-difference partition), aggregating weights. Every atom
// moves at most r, so W_p(mu, result) <= r for every p.
DiscreteMeasure quantize_to_centers(const DiscreteMeasure& mu, const BallCover& cover);

// Rounds weights beta_j (supported on the cover centers) to multiples of
// 1/K: n_j = floor(K beta_j), the first J slots get n_j + 1 so the total is
// exactly K. The redistribution plan moves at most mass N/K over distance at
// most D, certifying W_p <= D (N/K)^{1/p}.
NetPoint round_weights(const DiscreteMeasure& mu_on_centers, const BallCover& cover,
                       std::int64_t K);

struct NetSizeBound {
    double log_bound = 0.0;  // natural log
    double bound = 1.0;      // +inf if not representable
    bool trivial = false;    // delta >= D
};

// Size bound (C D / delta)^(p n_half) for covering P(E) by W_p balls of
// radius delta, with C = 2 (4e)^{1/p}.
NetSizeBound net_size_bound(double D, double delta, double p, double n_half);

struct NetApproximation {
    NetPoint net;
    double certified = 0.0;  // r + D (N/K)^{1/p}
    std::int64_t K = 0;
};

// Composes quantization and weight rounding with the canonical resolution
// K = floor(N (D/r)^p) + 1, so the certificate is at most 2r.
NetApproximation nearest_net_point(const DiscreteMeasure& mu, const BallCover& cover, double p);

// Number of weight vectors (k_j / K) on N slots: binomial(K+N-1, N-1).
// Throws CapacityError above 1e15 (exact int64 arithmetic overflow guard).
std::int64_t net_point_count(std::int64_t K, std::int64_t N);

// Enumerates all numerator vectors for (N, K); gated to 1e6 points.
void enumerate_net_points(std::int64_t K, std::int64_t N,
                          const std::function<void(const std::vector<std::int64_t>&)>& visit);

}  // namespace lab
