#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "lab/covering.hpp"
#include "lab/errors.hpp"
#include "lab/transport.hpp"

using namespace lab;

TEST_CASE("1-D lattice cover matches direct enumeration") {
    // spacing r = 0.25; cells [c - r/2, c + r/2] meet [-1,1] iff |c| <= 1.125,
    // giving the 9 centers -1.0, -0.75, ..., 1.0
    const auto cover = cover_ball_lattice(1.0, 0.25, 1);
    CHECK(cover.count() == 9);
    CHECK(probe_grid_coverage(cover) == 1.0);
}

TEST_CASE("big radius needs one ball") {
    const auto cover = cover_ball_lattice(1.0, 2.0, 3);
    CHECK(cover.count() == 1);
    for (double c : cover.centers) CHECK(c == 0.0);
}

TEST_CASE("2-D cover: probe coverage and certified count bound") {
    const auto cover = cover_ball_lattice(1.0, 0.5, 2);
    CHECK(probe_grid_coverage(cover) == 1.0);
    const double bound = cover.certified_lattice_constant() * std::pow(1.0 / 0.5, 2);
    CHECK(static_cast<double>(cover.count()) <= bound);
}

TEST_CASE("capacity guard") {
    CHECK_THROWS_AS(cover_ball_lattice(1.0, 1e-4, 2), CapacityError);
}

TEST_CASE("quantize: measure on r-separated centers is unchanged") {
    // centers farther than r apart, so each lies in its own partition cell
    BallCover cover;
    cover.dim = 2;
    cover.R = 1.0;
    cover.r = 0.4;
    cover.centers = {-0.5, 0.0, 0.5, 0.0};
    DiscreteMeasure mu;
    mu.dim = 2;
    mu.points = cover.centers;
    mu.weights = {0.25, 0.75};
    const auto q = quantize_to_centers(mu, cover);
    CHECK(q.weights[0] == doctest::Approx(0.25));
    CHECK(q.weights[1] == doctest::Approx(0.75));
    double total = 0;
    for (double w : q.weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("quantize single atom moves at most r, exactly to distance") {
    const auto cover = cover_ball_lattice(1.0, 0.5, 2);
    // an atom 0.3 away from some center
    std::vector<double> pt(cover.center(5).begin(), cover.center(5).end());
    pt[0] += 0.3;
    DiscreteMeasure mu{2, {1.0}, pt};
    const auto q = quantize_to_centers(mu, cover);
    const double w1 = wp_discrete(mu, q, 1.0).distance;
    CHECK(w1 <= 0.5 + 1e-12);
}

TEST_CASE("quantize certificate: exact W_p <= r on random measures") {
    const auto cover = cover_ball_lattice(1.0, 0.4, 2);
    for (int rep = 0; rep < 5; ++rep) {
        const auto s = sample_iid(uniform_ball_law(1.0, 2), 100,
                                  RngSpec{42, static_cast<std::uint64_t>(rep)});
        const auto mu = s.as_measure();
        const auto q = quantize_to_centers(mu, cover);
        for (double p : {1.0, 2.0}) {
            const double w = wp_discrete(mu, q, p).distance;
            CHECK(w <= cover.r + 1e-10);
        }
    }
}

TEST_CASE("round_weights: exact multiples are unchanged; deficit case matches hand computation") {
    BallCover cover;
    cover.dim = 1;
    cover.R = 1;
    cover.r = 0.5;
    cover.centers = {-0.5, 0.5};

    DiscreteMeasure mu{1, {0.3, 0.7}, cover.centers};
    const auto np = round_weights(mu, cover, 10);
    CHECK(np.numerators == std::vector<std::int64_t>{3, 7});

    DiscreteMeasure mu2{1, {0.25, 0.75}, cover.centers};
    const auto np2 = round_weights(mu2, cover, 2);
    // n = (0, 1), deficit 1 -> J = 1, alpha = (1/2, 1/2)
    CHECK(np2.numerators == std::vector<std::int64_t>{1, 1});
    // actual transport distance: move 0.25 across d(x_1,x_2) = 1
    const double w1 = wp_discrete(mu2, np2.as_measure(cover), 1.0).distance;
    CHECK(w1 == doctest::Approx(0.25));
    const double certified = 2.0 * cover.R * (2.0 / 2.0);  // D (N/K)^{1/p}
    CHECK(w1 <= certified + 1e-12);
}

TEST_CASE("round_weights certificate on random weights") {
    const auto cover = cover_ball_lattice(1.0, 0.35, 2);
    const std::size_t N = cover.count();
    RngStream g(RngSpec{43, 0});
    for (int rep = 0; rep < 4; ++rep) {
        DiscreteMeasure mu;
        mu.dim = 2;
        mu.points = cover.centers;
        mu.weights.resize(N);
        double total = 0;
        for (auto& w : mu.weights) {
            w = g.uniform_pos();
            total += w;
        }
        for (auto& w : mu.weights) w /= total;
        const std::int64_t K = 200;
        const auto np = round_weights(mu, cover, K);
        std::int64_t sum = 0;
        double max_err = 0;
        for (std::size_t j = 0; j < N; ++j) {
            sum += np.numerators[j];
            max_err = std::max(max_err, std::abs(static_cast<double>(np.numerators[j]) / K -
                                                 mu.weights[j]));
        }
        CHECK(sum == K);  // exact rational mass
        CHECK(max_err <= 1.0 / K + 1e-15);
        for (double p : {1.0, 2.0}) {
            const double w = wp_discrete(mu, np.as_measure(cover), p).distance;
            const double cert = 2.0 * cover.R * std::pow(static_cast<double>(N) / K, 1.0 / p);
            CHECK(w <= cert + 1e-10);
        }
    }
}

TEST_CASE("net_size_bound paper values") {
    const auto trivial = net_size_bound(2.0, 2.5, 1.0, 9);
    CHECK(trivial.trivial);
    CHECK(trivial.bound == 1.0);

    // p=1: C = 8e; D=2, delta=1, n_half=9 -> log bound = 9 log(16 e)
    const auto b = net_size_bound(2.0, 1.0, 1.0, 9);
    CHECK(b.log_bound == doctest::Approx(9.0 * std::log(16.0 * std::exp(1.0))).epsilon(1e-12));
}

TEST_CASE("nearest_net_point certificate chain") {
    const double delta = 0.4;
    const auto cover = cover_ball_lattice(1.0, delta / 2, 2);
    const double N = static_cast<double>(cover.count());
    for (int rep = 0; rep < 5; ++rep) {
        const auto mu = sample_iid(uniform_ball_law(1.0, 2), 60,
                                   RngSpec{44, static_cast<std::uint64_t>(rep)})
                            .as_measure();
        const auto approx = nearest_net_point(mu, cover, 1.0);
        CHECK(approx.certified <= delta + 1e-12);
        CHECK(static_cast<double>(approx.K) == std::floor(N * (2.0 / (delta / 2))) + 1);
        const double achieved = wp_discrete(mu, approx.net.as_measure(cover), 1.0).distance;
        CHECK(achieved <= delta + 1e-10);
        CHECK(achieved <= approx.certified + 1e-10);
    }
    // a measure that is already a net point has distance zero
    DiscreteMeasure atom{2, {1.0}, {cover.centers[0], cover.centers[1]}};
    const auto self = nearest_net_point(atom, cover, 1.0);
    const double d0 = wp_discrete(atom, self.net.as_measure(cover), 1.0).distance;
    CHECK(d0 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("net point enumeration count equals binomial and respects the paper bound") {
    for (std::int64_t N : {2, 3, 5}) {
        for (std::int64_t K : {2, 5, 8}) {
            std::int64_t count = 0;
            enumerate_net_points(K, N, [&](const std::vector<std::int64_t>& ks) {
                std::int64_t s = 0;
                for (auto k : ks) s += k;
                REQUIRE(s == K);
                ++count;
            });
            CHECK(count == net_point_count(K, N));
            if (K > N) {
                const double paper_bound =
                    std::pow(2.0 * static_cast<double>(K) * std::exp(1.0) / static_cast<double>(N),
                             static_cast<double>(N));
                CHECK(static_cast<double>(count) <= paper_bound);
            }
        }
    }
    CHECK(net_point_count(10, 3) == 66);  // binomial(12, 2)
}
