#include "lab/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lab/errors.hpp"
#include "lab/stats.hpp"

namespace lab {

namespace {

double dist2(std::span<const double> x, std::span<const double> y) {
    double s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return s;
}

}  // namespace

double BallCover::certified_lattice_constant() const {
    // Lattice cells of side s = r/sqrt(d) intersecting B_R have centers with
    // |c|_inf <= R + s/2, so the count is at most (2 sqrt(d) R/r + 2)^d,
    // which is <= ((2 sqrt(d) + 4)(R/r))^d whenever r <= 2R.
    return std::pow(2.0 * std::sqrt(static_cast<double>(dim)) + 4.0, dim);
}

BallCover cover_ball_lattice(double R, double r, int d) {
    if (!(R > 0) || !(r > 0) || d < 1)
        throw std::invalid_argument("cover_ball_lattice: need R > 0, r > 0, d >= 1");
    BallCover cover;
    cover.dim = d;
    cover.R = R;
    cover.r = r;
    if (r >= 2 * R) {  // the origin alone covers B_R
        cover.centers.assign(static_cast<std::size_t>(d), 0.0);
        return cover;
    }
    const double guard = d * std::pow(R / r, d);
    if (guard > 1e7) throw CapacityError("cover_ball_lattice: d (R/r)^d exceeds the 1e7 guard");

    const double s = r / std::sqrt(static_cast<double>(d));
    const int zmax = static_cast<int>(std::floor(R / s + 0.5)) + 1;
    std::vector<int> z(static_cast<std::size_t>(d), -zmax);
    std::vector<double> c(static_cast<std::size_t>(d));
    // Odometer enumeration of the lattice box, keeping cells that meet B_R.
    for (;;) {
        double near2 = 0;
        for (int k = 0; k < d; ++k) {
            c[static_cast<std::size_t>(k)] = s * z[static_cast<std::size_t>(k)];
            const double away = std::max(std::abs(c[static_cast<std::size_t>(k)]) - s / 2, 0.0);
            near2 += away * away;
        }
        if (near2 <= R * R)
            cover.centers.insert(cover.centers.end(), c.begin(), c.end());
        int k = 0;
        while (k < d && ++z[static_cast<std::size_t>(k)] > zmax) {
            z[static_cast<std::size_t>(k)] = -zmax;
            ++k;
        }
        if (k == d) break;
    }
    if (cover.centers.empty()) throw ConsistencyError("cover_ball_lattice: empty cover");
    return cover;
}

double probe_grid_coverage(const BallCover& cover, double pitch_factor) {
    const int d = cover.dim;
    const double pitch = cover.r * pitch_factor;
    const int zmax = static_cast<int>(std::ceil(cover.R / pitch));
    std::vector<int> z(static_cast<std::size_t>(d), -zmax);
    std::vector<double> x(static_cast<std::size_t>(d));
    const double r2 = cover.r * cover.r * (1 + 1e-12);
    std::size_t probes = 0, covered = 0;
    for (;;) {
        double n2 = 0;
        for (int k = 0; k < d; ++k) {
            x[static_cast<std::size_t>(k)] = pitch * z[static_cast<std::size_t>(k)];
            n2 += x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
        }
        if (n2 <= cover.R * cover.R) {
            ++probes;
            for (std::size_t j = 0; j < cover.count(); ++j) {
                if (dist2(x, cover.center(j)) <= r2) {
                    ++covered;
                    break;
                }
            }
        }
        int k = 0;
        while (k < d && ++z[static_cast<std::size_t>(k)] > zmax) {
            z[static_cast<std::size_t>(k)] = -zmax;
            ++k;
        }
        if (k == d) break;
    }
    return probes == 0 ? 1.0 : static_cast<double>(covered) / static_cast<double>(probes);
}

DiscreteMeasure quantize_to_centers(const DiscreteMeasure& mu, const BallCover& cover) {
    if (mu.dim != cover.dim) throw std::invalid_argument("quantize_to_centers: dimension mismatch");
    const double r2 = cover.r * cover.r * (1 + 1e-12);
    std::vector<double> beta(cover.count(), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        // First center within r: the sequential-difference partition cell.
        std::size_t cell = cover.count();
        for (std::size_t j = 0; j < cover.count(); ++j) {
            if (dist2(mu.point(i), cover.center(j)) <= r2) {
                cell = j;
                break;
            }
        }
        if (cell == cover.count())
            throw ConsistencyError("quantize_to_centers: atom not covered by any ball");
        beta[cell] += mu.weights[i];
    }
    DiscreteMeasure out;
    out.dim = cover.dim;
    out.weights = std::move(beta);
    out.points = cover.centers;
    return out;
}

NetPoint round_weights(const DiscreteMeasure& mu_on_centers, const BallCover& cover,
                       std::int64_t K) {
    if (K < 1) throw std::invalid_argument("round_weights: K must be >= 1");
    const std::size_t N = cover.count();
    if (mu_on_centers.size() != N || mu_on_centers.points != cover.centers)
        throw std::invalid_argument("round_weights: measure is not supported on the cover centers");
    NetPoint np;
    np.K = K;
    np.numerators.resize(N);
    std::int64_t total = 0;
    for (std::size_t j = 0; j < N; ++j) {
        np.numerators[j] = static_cast<std::int64_t>(std::floor(
            static_cast<double>(K) * mu_on_centers.weights[j]));
        total += np.numerators[j];
    }
    std::int64_t deficit = K - total;  // the paper's J: indices 1..J take one extra unit
    if (deficit < 0 || deficit > static_cast<std::int64_t>(N))
        throw ConsistencyError("round_weights: no valid J (weights do not sum to 1?)");
    for (std::size_t j = 0; j < N && deficit > 0; ++j, --deficit) np.numerators[j] += 1;
    return np;
}

DiscreteMeasure NetPoint::as_measure(const BallCover& cover) const {
    DiscreteMeasure m;
    m.dim = cover.dim;
    m.points = cover.centers;
    m.weights.resize(numerators.size());
    for (std::size_t j = 0; j < numerators.size(); ++j)
        m.weights[j] = static_cast<double>(numerators[j]) / static_cast<double>(K);
    return m;
}

NetSizeBound net_size_bound(double D, double delta, double p, double n_half) {
    if (!(D > 0) || !(delta > 0) || !(p >= 1))
        throw std::invalid_argument("net_size_bound: need D > 0, delta > 0, p >= 1");
    NetSizeBound out;
    if (delta >= D) {  // one ball suffices
        out.trivial = true;
        out.log_bound = 0.0;
        out.bound = 1.0;
        return out;
    }
    const double C = 2.0 * std::pow(4.0 * 2.71828182845904523536, 1.0 / p);
    out.log_bound = p * n_half * std::log(C * D / delta);
    out.bound = out.log_bound < 700 ? std::exp(out.log_bound)
                                    : std::numeric_limits<double>::infinity();
    return out;
}

NetApproximation nearest_net_point(const DiscreteMeasure& mu, const BallCover& cover, double p) {
    if (!(p >= 1)) throw std::invalid_argument("nearest_net_point: order must be >= 1");
    const DiscreteMeasure quantized = quantize_to_centers(mu, cover);
    const double N = static_cast<double>(cover.count());
    const double D = 2.0 * cover.R;  // Euclidean diameter of B_R
    const double kf = std::floor(N * std::pow(D / cover.r, p)) + 1.0;
    if (kf > 9e15) throw CapacityError("nearest_net_point: resolution K overflows int64");
    NetApproximation out;
    out.K = static_cast<std::int64_t>(kf);
    out.net = round_weights(quantized, cover, out.K);
    out.certified = cover.r + D * std::pow(N / static_cast<double>(out.K), 1.0 / p);
    return out;
}

std::int64_t net_point_count(std::int64_t K, std::int64_t N) {
    if (K < 1 || N < 1) throw std::invalid_argument("net_point_count: need K, N >= 1");
    // binomial(K + N - 1, N - 1) with overflow guard
    long double acc = 1.0L;
    for (std::int64_t i = 1; i < N; ++i) {
        acc = acc * static_cast<long double>(K + i) / static_cast<long double>(i);
        if (acc > 1e15L) throw CapacityError("net_point_count: above 1e15");
    }
    return static_cast<std::int64_t>(std::llroundl(acc));
}

void enumerate_net_points(std::int64_t K, std::int64_t N,
                          const std::function<void(const std::vector<std::int64_t>&)>& visit) {
    if (net_point_count(K, N) > 1'000'000)
        throw CapacityError("enumerate_net_points: more than 1e6 points");
    std::vector<std::int64_t> k(static_cast<std::size_t>(N), 0);
    // Recursive stars-and-bars walk.
    const std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t slot,
                                                                   std::int64_t left) {
        if (slot + 1 == k.size()) {
            k[slot] = left;
            visit(k);
            return;
        }
        for (std::int64_t v = 0; v <= left; ++v) {
            k[slot] = v;
            rec(slot + 1, left - v);
        }
    };
    rec(0, K);
}

}  // namespace lab
