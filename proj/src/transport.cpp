#include "lab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lab/errors.hpp"
#include "lab/laws1d.hpp"
#include "lab/stats.hpp"

namespace lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dist(std::span<const double> x, std::span<const double> y) {
    double s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Transportation simplex on the dense bipartite graph.
//
// Basis = spanning tree over n + m nodes (sources first). Entering arc by
// block pricing, most negative reduced cost, ties to the lowest flattened
// index (i*m + j); after a stall guard it degrades to Bland's rule, which
// cannot cycle. Final flows are re-solved exactly on the optimal tree by
// leaf elimination so marginals hold to machine precision.

class TransportSimplex {
  public:
    TransportSimplex(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p)
        : mu_(mu), nu_(nu), p_(p), n_(static_cast<int>(mu.size())),
          m_(static_cast<int>(nu.size())) {
        const std::size_t arcs = static_cast<std::size_t>(n_) * static_cast<std::size_t>(m_);
        if (arcs > 20'000'000)
            throw CapacityError("wp_discrete: instance above the 2e7 arc guard");
        cache_costs_ = arcs <= 4'000'000;
        if (cache_costs_) {
            cost_.resize(arcs);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < m_; ++j)
                    cost_[static_cast<std::size_t>(i) * m_ + j] = raw_cost(i, j);
        }
        double cmax = 0;
        for (int i = 0; i < n_; ++i) cmax = std::max(cmax, cost(i, 0));
        for (int j = 0; j < m_; ++j) cmax = std::max(cmax, cost(0, j));
        tol_ = 1e-12 * (1.0 + cmax);
    }

    WpResult solve();

  private:
    const DiscreteMeasure& mu_;
    const DiscreteMeasure& nu_;
    double p_;
    int n_, m_;
    bool cache_costs_ = false;
    std::vector<double> cost_;
    double tol_ = 1e-12;

    struct Arc {
        int src;   // source index in [0, n)
        int snk;   // sink index in [0, m)
        double flow;
    };
    std::vector<Arc> basis_;                  // n + m - 1 arcs
    std::vector<std::vector<int>> adj_;       // node -> basic arc ids; sinks offset by n_
    std::vector<double> u_, v_;               // duals

    double raw_cost(int i, int j) const {
        const double d = dist(mu_.point(i), nu_.point(j));
        if (p_ == 1.0) return d;
        if (p_ == 2.0) return d * d;
        return std::pow(d, p_);
    }
    double cost(int i, int j) const {
        return cache_costs_ ? cost_[static_cast<std::size_t>(i) * m_ + j] : raw_cost(i, j);
    }
    int node_of_sink(int j) const { return n_ + j; }

    void northwest_init();
    void compute_duals();
    // Returns flattened arc index or -1 when optimal.
    long long find_entering(std::size_t& scan_pos, bool bland) const;
    void pivot(int ei, int ej);
    void resolve_flows_exactly();
};

void TransportSimplex::northwest_init() {
    std::vector<double> a(mu_.weights), b(nu_.weights);
    // Absorb the (tiny) float mismatch between the two unit totals so the
    // last cell closes exactly.
    const double sa = kahan_total(a), sb = kahan_total(b);
    b[m_ - 1] += sa - sb;

    basis_.clear();
    basis_.reserve(n_ + m_ - 1);
    int i = 0, j = 0;
    for (;;) {
        const double t = std::max(0.0, std::min(a[i], b[j]));
        basis_.push_back({i, j, t});
        a[i] -= t;
        b[j] -= t;
        if (i == n_ - 1 && j == m_ - 1) break;
        if (i < n_ - 1 && (a[i] <= b[j] || j == m_ - 1))
            ++i;
        else
            ++j;
    }

    adj_.assign(n_ + m_, {});
    for (int id = 0; id < static_cast<int>(basis_.size()); ++id) {
        adj_[basis_[id].src].push_back(id);
        adj_[node_of_sink(basis_[id].snk)].push_back(id);
    }
    u_.assign(n_, 0.0);
    v_.assign(m_, 0.0);
}

void TransportSimplex::compute_duals() {
    // u[0] = 0 and propagate along the tree; iterative DFS.
    std::vector<int> stack = {0};
    std::vector<char> seen(n_ + m_, 0);
    seen[0] = 1;
    u_[0] = 0.0;
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        for (int id : adj_[node]) {
            const Arc& arc = basis_[id];
            const int other = (node < n_) ? node_of_sink(arc.snk) : arc.src;
            if (seen[other]) continue;
            seen[other] = 1;
            if (other >= n_)
                v_[other - n_] = cost(arc.src, arc.snk) - u_[arc.src];
            else
                u_[other] = cost(arc.src, arc.snk) - v_[arc.snk];
            stack.push_back(other);
        }
    }
}

long long TransportSimplex::find_entering(std::size_t& scan_pos, bool bland) const {
    const std::size_t arcs = static_cast<std::size_t>(n_) * m_;
    if (bland) {
        for (std::size_t k = 0; k < arcs; ++k) {
            const int i = static_cast<int>(k / m_), j = static_cast<int>(k % m_);
            if (cost(i, j) - u_[i] - v_[j] < -tol_) return static_cast<long long>(k);
        }
        return -1;
    }
    const std::size_t block = std::min<std::size_t>(arcs, 8192);
    std::size_t scanned = 0;
    while (scanned < arcs) {
        long long best = -1;
        double best_red = -tol_;
        const std::size_t end = std::min(arcs, scan_pos + block);
        for (std::size_t k = scan_pos; k < end; ++k) {
            const int i = static_cast<int>(k / m_), j = static_cast<int>(k % m_);
            const double red = cost(i, j) - u_[i] - v_[j];
            if (red < best_red) {  // strict: ties keep the lowest index
                best_red = red;
                best = static_cast<long long>(k);
            }
        }
        scanned += end - scan_pos;
        scan_pos = (end == arcs) ? 0 : end;
        if (best >= 0) return best;
    }
    return -1;
}

void TransportSimplex::pivot(int ei, int ej) {
    // Tree path from source node ei to sink node ej.
    const int target = node_of_sink(ej);
    std::vector<int> parent_arc(n_ + m_, -1), parent_node(n_ + m_, -1);
    std::vector<int> stack = {ei};
    std::vector<char> seen(n_ + m_, 0);
    seen[ei] = 1;
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        if (node == target) break;
        for (int id : adj_[node]) {
            const Arc& arc = basis_[id];
            const int other = (node < n_) ? node_of_sink(arc.snk) : arc.src;
            if (seen[other]) continue;
            seen[other] = 1;
            parent_arc[other] = id;
            parent_node[other] = node;
            stack.push_back(other);
        }
    }
    if (!seen[target]) throw ConsistencyError("transport simplex: basis tree disconnected");

    // Arc ids along the path ei -> ej; arcs at even positions carry -theta.
    std::vector<int> path;
    for (int node = target; node != ei; node = parent_node[node])
        path.push_back(parent_arc[node]);
    std::reverse(path.begin(), path.end());

    double theta = kInf;
    int leaving = -1;
    for (std::size_t pos = 0; pos < path.size(); pos += 2) {
        const Arc& arc = basis_[path[pos]];
        const bool tighter =
            arc.flow < theta - 1e-18 ||
            (arc.flow <= theta + 1e-18 && leaving >= 0 &&
             std::make_pair(arc.src, arc.snk) <
                 std::make_pair(basis_[leaving].src, basis_[leaving].snk));
        if (tighter) {
            theta = arc.flow;
            leaving = path[pos];
        }
    }
    if (leaving < 0) throw ConsistencyError("transport simplex: no leaving arc");

    for (std::size_t pos = 0; pos < path.size(); ++pos)
        basis_[path[pos]].flow += (pos % 2 == 0) ? -theta : theta;

    // Replace the leaving arc with the entering one, reusing the slot.
    const Arc old = basis_[leaving];
    auto drop = [&](int node) {
        auto& lst = adj_[node];
        lst.erase(std::find(lst.begin(), lst.end(), leaving));
    };
    drop(old.src);
    drop(node_of_sink(old.snk));
    basis_[leaving] = {ei, ej, theta};
    adj_[ei].push_back(leaving);
    adj_[node_of_sink(ej)].push_back(leaving);
}

void TransportSimplex::resolve_flows_exactly() {
    std::vector<double> residual(n_ + m_);
    for (int i = 0; i < n_; ++i) residual[i] = mu_.weights[i];
    for (int j = 0; j < m_; ++j) residual[node_of_sink(j)] = nu_.weights[j];

    std::vector<int> degree(n_ + m_);
    std::vector<std::vector<int>> adj = adj_;
    for (int node = 0; node < n_ + m_; ++node) degree[node] = static_cast<int>(adj[node].size());
    std::vector<char> done_arc(basis_.size(), 0);
    std::vector<int> leaves;
    for (int node = 0; node < n_ + m_; ++node)
        if (degree[node] == 1) leaves.push_back(node);

    while (!leaves.empty()) {
        const int leaf = leaves.back();
        leaves.pop_back();
        int arc_id = -1;
        for (int id : adj[leaf])
            if (!done_arc[id]) arc_id = id;
        if (arc_id < 0) continue;  // root remainder
        Arc& arc = basis_[arc_id];
        const double f = std::max(0.0, residual[leaf]);
        arc.flow = f;
        done_arc[arc_id] = 1;
        const int other = (leaf < n_) ? node_of_sink(arc.snk) : arc.src;
        residual[other] -= f;
        residual[leaf] = 0;
        if (--degree[other] == 1) leaves.push_back(other);
        --degree[leaf];
    }
}

WpResult TransportSimplex::solve() {
    northwest_init();
    const long long guard = 256LL * (n_ + m_) + 65536;
    bool bland = false;
    std::size_t scan_pos = 0;
    for (long long it = 0;; ++it) {
        compute_duals();
        const long long k = find_entering(scan_pos, bland);
        if (k < 0) break;
        pivot(static_cast<int>(k / m_), static_cast<int>(k % m_));
        if (it == guard && !bland) bland = true;  // anti-cycling fallback
        if (it > guard * 16)
            throw ConsistencyError("transport simplex: pivot limit exceeded");
    }
    resolve_flows_exactly();
    compute_duals();

    WpResult out;
    out.plan.order = p_;
    KahanSum total;
    for (const Arc& arc : basis_) {
        if (arc.flow > 0) {
            out.plan.entries.push_back({arc.src, arc.snk, arc.flow});
            total.add(arc.flow * cost(arc.src, arc.snk));
        }
    }
    std::sort(out.plan.entries.begin(), out.plan.entries.end(),
              [](const TransportPlan::Entry& a, const TransportPlan::Entry& b) {
                  return std::make_pair(a.i, a.j) < std::make_pair(b.i, b.j);
              });
    out.plan.cost = std::max(0.0, total.value());
    out.distance = std::pow(out.plan.cost, 1.0 / p_);
    out.source_potential = u_;
    out.target_potential = v_;
    double viol = 0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < m_; ++j)
            viol = std::max(viol, -(cost(i, j) - u_[i] - v_[j]));
    out.max_dual_violation = viol;
    return out;
}

}  // namespace

WpResult wp_discrete(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    if (mu.dim != nu.dim)
        throw std::invalid_argument("wp_discrete: dimension mismatch");
    if (mu.size() == 0 || nu.size() == 0)
        throw std::invalid_argument("wp_discrete: empty measure");
    if (!(p >= 1.0)) throw std::invalid_argument("wp_discrete: order must be >= 1");
    TransportSimplex solver(mu, nu, p);
    return solver.solve();
}

// ---------------------------------------------------------------------------
// 1-D paths

namespace {

struct WeightedAtoms {
    std::vector<double> x;
    std::vector<double> w;  // same length, positive entries only
};

WeightedAtoms sorted_atoms(const DiscreteMeasure& a) {
    if (a.dim != 1) throw std::invalid_argument("1-D transport path requires dim == 1");
    std::vector<std::size_t> idx(a.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t i, std::size_t j) { return a.points[i] < a.points[j]; });
    WeightedAtoms out;
    out.x.reserve(a.size());
    out.w.reserve(a.size());
    for (std::size_t i : idx) {
        if (a.weights[i] > 0) {
            out.x.push_back(a.points[i]);
            out.w.push_back(a.weights[i]);
        }
    }
    if (out.x.empty()) throw std::invalid_argument("1-D transport path: measure has no mass");
    return out;
}

// Piecewise-linear quantile profile: segment k maps [u0,u1] to [x0,x1].
struct QuantileProfile {
    std::vector<double> u0, u1, x0, x1;

    static QuantileProfile from_atoms(const WeightedAtoms& a) {
        QuantileProfile q;
        double cum = 0;
        for (std::size_t i = 0; i < a.x.size(); ++i) {
            q.u0.push_back(cum);
            cum += a.w[i];
            q.u1.push_back(cum);
            q.x0.push_back(a.x[i]);
            q.x1.push_back(a.x[i]);
        }
        q.u1.back() = 1.0;
        return q;
    }

    static QuantileProfile from_grid(const GridDensity1D& g) {
        QuantileProfile q;
        double cum = 0;
        const double h = g.h();
        for (int i = 0; i < g.n_cells; ++i) {
            const double m = g.values[i] * h;
            if (m <= 0) continue;
            q.u0.push_back(cum);
            cum += m;
            q.u1.push_back(cum);
            q.x0.push_back(g.edge(i));
            q.x1.push_back(g.edge(i + 1));
        }
        if (q.u0.empty()) throw std::invalid_argument("grid density has no mass");
        q.u1.back() = 1.0;
        return q;
    }

    double eval(std::size_t seg, double u) const {
        const double len = u1[seg] - u0[seg];
        if (len <= 0) return x0[seg];
        const double t = (u - u0[seg]) / len;
        return x0[seg] + (x1[seg] - x0[seg]) * t;
    }
};

// int over [0,1] of |Qa - Qb|^p for p in {1, 2}; exact since the difference
// is linear on each merged segment.
double quantile_profile_distance(const QuantileProfile& a, const QuantileProfile& b, double p) {
    std::size_t ia = 0, ib = 0;
    double u = 0;
    KahanSum acc;
    while (ia < a.u0.size() && ib < b.u0.size()) {
        const double hi = std::min(a.u1[ia], b.u1[ib]);
        if (hi > u) {
            const double g0 = a.eval(ia, u) - b.eval(ib, u);
            const double g1 = a.eval(ia, hi) - b.eval(ib, hi);
            const double len = hi - u;
            if (p == 1.0) {
                if (g0 * g1 >= 0) {
                    acc.add(0.5 * std::abs(g0 + g1) * len);
                } else {
                    acc.add(len * (g0 * g0 + g1 * g1) / (2.0 * (std::abs(g0) + std::abs(g1))));
                }
            } else {  // p == 2, Simpson is exact on quadratics
                const double gm = 0.5 * (g0 + g1);
                acc.add(len * (g0 * g0 + 4.0 * gm * gm + g1 * g1) / 6.0);
            }
        }
        u = hi;
        if (a.u1[ia] <= u) ++ia;
        if (ib < b.u0.size() && b.u1[ib] <= u) ++ib;
    }
    return acc.value();
}

}  // namespace

double w1_exact_1d(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return wp_quantile_1d(a, b, 1.0);
}

double w1_exact_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    return w1_exact_1d(a.as_measure(), b.as_measure());
}

double wp_quantile_1d(const DiscreteMeasure& a, const DiscreteMeasure& b, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("wp_quantile_1d: order must be >= 1");
    const WeightedAtoms sa = sorted_atoms(a), sb = sorted_atoms(b);
    // Two-pointer sweep over cumulative mass; each segment couples a fixed
    // pair of atoms.
    std::size_t ia = 0, ib = 0;
    double ra = sa.w[0], rb = sb.w[0];
    KahanSum acc;
    while (true) {
        const double du = std::min(ra, rb);
        acc.add(du * std::pow(std::abs(sa.x[ia] - sb.x[ib]), p));
        ra -= du;
        rb -= du;
        const bool last_a = ia + 1 == sa.x.size(), last_b = ib + 1 == sb.x.size();
        if (ra <= 0) {
            if (last_a) break;
            ra = sa.w[++ia];
        }
        if (rb <= 0) {
            if (last_b) break;
            rb = sb.w[++ib];
        }
    }
    return std::pow(acc.value(), 1.0 / p);
}

double w1_exact_1d(const DiscreteMeasure& a, const Cdf1D& ref) {
    if (a.dim != 1) throw std::invalid_argument("w1_exact_1d: analytic path requires dim == 1");
    const WeightedAtoms s = sorted_atoms(a);
    const std::size_t n = s.x.size();
    KahanSum acc;
    // Lower tail: int_{-inf}^{x_(1)} F
    acc.add(ref.antideriv(s.x[0]));
    // Upper tail: int_{x_(n)}^{inf} (1 - F) = mean - t + A(t)
    acc.add(ref.mean - s.x[n - 1] + ref.antideriv(s.x[n - 1]));
    double cum = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cum += s.w[i];
        const double c = std::min(cum, 1.0);
        const double lo = s.x[i], hi = s.x[i + 1];
        // F crosses level c at the law quantile; split there.
        double z;
        if (c <= 0)
            z = lo;
        else if (c >= 1)
            z = hi;
        else
            z = ref.quantile(c);
        const double mid = std::clamp(z, lo, hi);
        const double A_lo = ref.antideriv(lo);
        const double A_mid = ref.antideriv(mid);
        const double A_hi = ref.antideriv(hi);
        acc.add(c * (mid - lo) - (A_mid - A_lo));   // F <= c on [lo, mid]
        acc.add((A_hi - A_mid) - c * (hi - mid));   // F >= c on [mid, hi]
    }
    return acc.value();
}

double w1_exact_1d(const DiscreteMeasure& a, const LawSpec& law) {
    std::string why;
    if (!validate(law, &why)) throw std::invalid_argument("w1_exact_1d: " + why);
    if (law.dim != 1) throw std::invalid_argument("w1_exact_1d: analytic path requires dim == 1");
    Cdf1D ref;
    ref.cdf = [law](double t) { return law_cdf(law, t); };
    ref.antideriv = [law](double t) { return law_cdf_antideriv(law, t); };
    ref.quantile = [law](double u) { return law_quantile(law, u); };
    ref.mean = law_mean1d(law);
    return w1_exact_1d(a, ref);
}

double w1_exact_1d(const EmpiricalMeasure& a, const LawSpec& law) {
    return w1_exact_1d(a.as_measure(), law);
}

double w1_exact_1d(const DiscreteMeasure& a, const GridDensity1D& b) {
    const auto qa = QuantileProfile::from_atoms(sorted_atoms(a));
    const auto qb = QuantileProfile::from_grid(b);
    return quantile_profile_distance(qa, qb, 1.0);
}

double w1_exact_1d(const EmpiricalMeasure& a, const GridDensity1D& b) {
    return w1_exact_1d(a.as_measure(), b);
}

double wp_exact_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("wp_exact_1d: order must be >= 1");
    if (a.dim != 1 || b.dim != 1) throw std::invalid_argument("wp_exact_1d: requires dim == 1");
    if (a.size() != b.size()) return wp_discrete(a.as_measure(), b.as_measure(), p).distance;
    std::vector<double> xa(a.points), xb(b.points);
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    KahanSum acc;
    for (std::size_t i = 0; i < xa.size(); ++i)
        acc.add(std::pow(std::abs(xa[i] - xb[i]), p));
    return std::pow(acc.value() / static_cast<double>(xa.size()), 1.0 / p);
}

double wp_grid_1d(const GridDensity1D& a, const GridDensity1D& b, double p) {
    if (p != 1.0 && p != 2.0)
        throw std::invalid_argument("wp_grid_1d: exact path implemented for p in {1,2}");
    const auto qa = QuantileProfile::from_grid(a);
    const auto qb = QuantileProfile::from_grid(b);
    return std::pow(quantile_profile_distance(qa, qb, p), 1.0 / p);
}

// ---------------------------------------------------------------------------
// Duality

DualGapResult w1_dual_gap(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                          const LipschitzWitness& witness) {
    if (witness.lipschitz_bound > 1.0 + 1e-12)
        throw ConsistencyError("w1_dual_gap: witness certificate exceeds 1");
    // Certificate check on all support pairs.
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t j = 0; j < nu.size(); ++j) {
            const double d = dist(mu.point(i), nu.point(j));
            const double df = std::abs(witness.f(mu.point(i)) - witness.f(nu.point(j)));
            if (df > witness.lipschitz_bound * d + 1e-9)
                throw ConsistencyError("w1_dual_gap: witness violates its Lipschitz certificate");
        }
    }
    KahanSum lower;
    for (std::size_t i = 0; i < mu.size(); ++i) lower.add(mu.weights[i] * witness.f(mu.point(i)));
    for (std::size_t j = 0; j < nu.size(); ++j) lower.add(-nu.weights[j] * witness.f(nu.point(j)));
    DualGapResult out;
    // -f is admissible whenever f is, so either orientation bounds W_1 below.
    out.lower_bound = std::abs(lower.value());
    out.w1 = wp_discrete(mu, nu, 1.0).distance;
    out.gap = out.w1 - out.lower_bound;
    return out;
}

LipschitzWitness witness_constant(double c) {
    return {"constant", [c](std::span<const double>) { return c; }, 0.0};
}

LipschitzWitness witness_coordinate(int k) {
    return {"coordinate", [k](std::span<const double> x) { return x[static_cast<std::size_t>(k)]; },
            1.0};
}

LipschitzWitness witness_norm(std::vector<double> center) {
    return {"norm", [c = std::move(center)](std::span<const double> x) {
                double s = 0;
                for (std::size_t k = 0; k < x.size(); ++k) {
                    const double d = x[k] - c[k];
                    s += d * d;
                }
                return std::sqrt(s);
            },
            1.0};
}

LipschitzWitness witness_from_dual(const WpResult& solved, const DiscreteMeasure& nu) {
    if (solved.plan.order != 1.0)
        throw std::invalid_argument("witness_from_dual: needs a p = 1 solution");
    std::vector<double> pts = nu.points;
    std::vector<double> pot = solved.target_potential;
    const int dim = nu.dim;
    return {"flow-dual", [pts = std::move(pts), pot = std::move(pot), dim](std::span<const double> x) {
                // f(x) = min_j d(x, y_j) - v_j : 1-Lipschitz inf-convolution
                double best = kInf;
                const std::size_t m = pot.size();
                for (std::size_t j = 0; j < m; ++j) {
                    double s = 0;
                    for (int k = 0; k < dim; ++k) {
                        const double d = x[static_cast<std::size_t>(k)] -
                                         pts[j * static_cast<std::size_t>(dim) + k];
                        s += d * d;
                    }
                    best = std::min(best, std::sqrt(s) - pot[j]);
                }
                return best;
            },
            1.0};
}

}  // namespace lab
