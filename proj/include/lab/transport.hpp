#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lab/grid1d.hpp"
#include "lab/measures.hpp"

namespace lab {

// A feasible coupling between two discrete measures, with its p-cost.
struct TransportPlan {
    struct Entry {
        int i;  // source atom index
        int j;  // target atom index
        double mass;
    };
    std::vector<Entry> entries;
    double cost = 0.0;  // sum mass * d(x_i, y_j)^p
    double order = 1.0;
};

struct WpResult {
    double distance = 0.0;
    TransportPlan plan;
    // LP dual values: u_i + v_j <= d(x_i,y_j)^p with equality on plan support.
    std::vector<double> source_potential;
    std::vector<double> target_potential;
    double max_dual_violation = 0.0;  // optimality certificate
};

// Exact W_p between discrete measures via a network-simplex style solver on
// the dense bipartite support graph. Deterministic: ties broken by lowest
// (i, j). Intended for desk scale; refuses instances with more than 2e7 arcs.
WpResult wp_discrete(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

// --- 1-D fast paths (all exact) -------------------------------------------

// W_1 = int |F_a - F_b| for two discrete 1-D measures.
double w1_exact_1d(const DiscreteMeasure& a, const DiscreteMeasure& b);
double w1_exact_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

// Continuous 1-D reference described by closed-form distribution functions;
// antideriv is A(t) = int_{-inf}^t F, and mean feeds the upper-tail integral.
struct Cdf1D {
    std::function<double(double)> cdf;
    std::function<double(double)> antideriv;
    std::function<double(double)> quantile;  // on (0,1)
    double mean = 0.0;
};

// W_1 against an analytic law, computed piecewise from the closed-form
// CDF antiderivative (exact up to function evaluation).
double w1_exact_1d(const DiscreteMeasure& a, const Cdf1D& ref);
double w1_exact_1d(const DiscreteMeasure& a, const LawSpec& law);
double w1_exact_1d(const EmpiricalMeasure& a, const LawSpec& law);

// W_1 between a discrete measure and a grid density.
double w1_exact_1d(const DiscreteMeasure& a, const GridDensity1D& b);
double w1_exact_1d(const EmpiricalMeasure& a, const GridDensity1D& b);

// Order-p distance between equal-size uniform-weight 1-D samples via sorted
// order statistics. Falls back to wp_discrete on unequal atom counts.
double wp_exact_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p);

// Order-p distance between arbitrary weighted 1-D discrete measures via the
// quantile coupling (exact for any p >= 1).
double wp_quantile_1d(const DiscreteMeasure& a, const DiscreteMeasure& b, double p);

// W_p between grid densities, p in {1, 2}; piecewise-exact in the quantile
// domain.
double wp_grid_1d(const GridDensity1D& a, const GridDensity1D& b, double p);

// --- Kantorovich-Rubinstein duality ----------------------------------------

struct LipschitzWitness {
    std::string name;
    std::function<double(std::span<const double>)> f;
    double lipschitz_bound = 1.0;  // certified constant on the support hull
};

struct DualGapResult {
    double lower_bound = 0.0;  // int f d(mu - nu)
    double gap = 0.0;          // W_1 - lower_bound, >= -1e-10
    double w1 = 0.0;
};

// Lower-bounds W_1 by a 1-Lipschitz witness; checks the Lipschitz
// certificate on all support pairs and throws ConsistencyError on failure.
DualGapResult w1_dual_gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const LipschitzWitness& witness);

LipschitzWitness witness_constant(double c);
LipschitzWitness witness_coordinate(int k);
LipschitzWitness witness_norm(std::vector<double> center);
// 1-Lipschitz extension of the flow dual potentials: f(x) = min_j (d(x, y_j) - v_j).
LipschitzWitness witness_from_dual(const WpResult& solved, const DiscreteMeasure& nu);

}  // namespace lab
