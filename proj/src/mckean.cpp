#include "lab/mckean.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lab/errors.hpp"
#include "lab/parallel.hpp"
#include "lab/transport.hpp"

namespace lab {

double SimConfig::stability_cap() const {
    return 0.5 / std::max(std::abs(potential.beta) + 2.0 * potential.Gamma, 1.0);
}

bool validate(const SimConfig& config, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (config.n_particles < 1) return fail("need at least one particle");
    if (config.potential.Gamma > 0 && config.n_particles < 2)
        return fail("interaction terms need N >= 2");
    if (config.dim < 1) return fail("dim must be positive");
    if (!(config.dt > 0)) return fail("dt must be positive");
    if (config.dt > config.stability_cap()) return fail("dt above the stability cap");
    if (!(config.T >= 0)) return fail("T must be nonnegative");
    if (config.save_stride < 1) return fail("save stride must be >= 1");
    if (config.initial.dim != config.dim) return fail("initial law dimension mismatch");
    if (config.dim > 8) return fail("simulator supports dim <= 8");
    if (!config.stream_tags.empty() && config.stream_tags.size() != config.n_particles)
        return fail("stream tag list must match the particle count");
    std::string law_why;
    if (!validate(config.initial, &law_why)) return fail("initial law: " + law_why);
    return true;
}

std::size_t TrajectoryBundle::frame_index(double t) const {
    const double tol = 1e-9 * (1.0 + std::abs(t));
    std::size_t best = 0;
    double err = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double e = std::abs(times[k] - t);
        if (e < err) {
            err = e;
            best = k;
        }
    }
    if (err > tol) {
        std::ostringstream msg;
        msg << "time " << t << " is not on the saved grid; nearest saved time is " << times[best];
        throw std::invalid_argument(msg.str());
    }
    return best;
}

namespace {

// Linear-in-time interpolation of the reference means (all the quadratic
// interaction needs from mu_t).
struct ReferenceFlow {
    std::vector<double> times;
    std::vector<double> means;

    double mean_at(double t) const {
        if (t <= times.front()) return means.front();
        if (t >= times.back()) return means.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - times.begin());
        const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
        return means[k - 1] + w * (means[k] - means[k - 1]);
    }
};

ReferenceFlow build_reference(const std::vector<GridDensity1D>& mu_ref, const SimConfig& config) {
    if (mu_ref.empty()) throw ConfigError("reference flow: no frames");
    ReferenceFlow flow;
    flow.times.reserve(mu_ref.size());
    flow.means.reserve(mu_ref.size());
    double max_gap = 0, prev = mu_ref.front().time;
    for (const auto& g : mu_ref) {
        flow.times.push_back(g.time);
        flow.means.push_back(g.mean());
        max_gap = std::max(max_gap, g.time - prev);
        prev = g.time;
    }
    const double save_interval = config.dt * config.save_stride;
    if (flow.times.front() > 1e-12 || flow.times.back() < config.T - 1e-9 ||
        max_gap > save_interval * (1.0 + 1e-9))
        throw ConfigError("reference flow: frames must cover [0, T] at least as finely "
                          "as the save stride");
    return flow;
}

class Simulator {
  public:
    Simulator(const SimConfig& config, bool coupled, const ReferenceFlow* flow)
        : cfg_(config), coupled_(coupled), flow_(flow) {
        std::string why;
        if (!validate(cfg_, &why)) throw std::invalid_argument("simulate: " + why);
        if (coupled_ && flow_ == nullptr)
            throw std::invalid_argument("simulate: coupled run needs a reference flow");
        if (coupled_ && cfg_.dim != 1)
            throw std::invalid_argument("simulate: reference-driven runs require dim == 1");
    }

    TrajectoryBundle run(bool evolve_interacting, bool evolve_independent) {
        const std::size_t n = cfg_.n_particles;
        const int d = cfg_.dim;
        const std::size_t nd = n * static_cast<std::size_t>(d);
        const int steps = static_cast<int>(std::llround(cfg_.T / cfg_.dt));

        streams_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t tag = cfg_.stream_tags.empty() ? i : cfg_.stream_tags[i];
            streams_.emplace_back(cfg_.rng.sub(tag));
        }

        std::vector<double> x(nd), y;
        for (std::size_t i = 0; i < n; ++i)
            sample_point(cfg_.initial, streams_[i], {x.data() + i * static_cast<std::size_t>(d),
                                                     static_cast<std::size_t>(d)});
        if (evolve_independent) y = x;

        TrajectoryBundle out;
        out.n = n;
        out.dim = d;
        out.dt = cfg_.dt;
        out.save_stride = cfg_.save_stride;
        out.seed = cfg_.rng.seed;
        out.stream = cfg_.rng.stream;
        out.shared_noise = evolve_interacting && evolve_independent;
        const auto save = [&](double t) {
            out.times.push_back(t);
            if (evolve_interacting) out.X.push_back(x);
            if (evolve_independent) out.Y.push_back(y);
        };
        save(0.0);

        std::vector<double> force(evolve_interacting ? nd : 0);
        std::vector<double> noise(nd);
        const double root2dt = std::sqrt(2.0 * cfg_.dt);
        const double gamma = cfg_.potential.gamma;

        for (int step = 0; step < steps; ++step) {
            const double t = step * cfg_.dt;
            for (std::size_t i = 0; i < n; ++i)
                for (int k = 0; k < d; ++k)
                    noise[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] =
                        streams_[i].normal();

            if (evolve_interacting) {
                pairwise_forces(x, force);
                parallel_for(n, cfg_.jobs, [&](std::size_t i) {
                    std::array<double, 8> gv{};
                    const std::size_t off = i * static_cast<std::size_t>(d);
                    cfg_.potential.v_gradient({x.data() + off, static_cast<std::size_t>(d)},
                                              {gv.data(), static_cast<std::size_t>(d)});
                    for (int k = 0; k < d; ++k) {
                        const std::size_t ik = off + static_cast<std::size_t>(k);
                        x[ik] += cfg_.dt * (-gv[static_cast<std::size_t>(k)] - force[ik]) +
                                 root2dt * noise[ik];
                    }
                });
            }
            if (evolve_independent) {
                const double ref_mean = flow_ ? flow_->mean_at(t) : 0.0;
                parallel_for(n, cfg_.jobs, [&](std::size_t i) {
                    std::array<double, 8> gv{};
                    const std::size_t off = i * static_cast<std::size_t>(d);
                    cfg_.potential.v_gradient({y.data() + off, static_cast<std::size_t>(d)},
                                              {gv.data(), static_cast<std::size_t>(d)});
                    for (int k = 0; k < d; ++k) {
                        const std::size_t ik = off + static_cast<std::size_t>(k);
                        // (grad W * mu_t)(y) = gamma (y - mean_t) for quadratic W
                        const double conv = gamma * (y[ik] - ref_mean);
                        y[ik] += cfg_.dt * (-gv[static_cast<std::size_t>(k)] - conv) +
                                 root2dt * noise[ik];
                    }
                });
            }

            const double tn = (step + 1) * cfg_.dt;
            if ((step + 1) % cfg_.save_stride == 0 || step + 1 == steps) {
                check_finite(x, step);
                if (evolve_independent) check_finite(y, step);
                save(tn);
            }
        }
        return out;
    }

  private:
    const SimConfig& cfg_;
    bool coupled_;
    const ReferenceFlow* flow_;
    std::vector<RngStream> streams_;

    // Exact O(N^2) pairwise sum: force[i] = (1/N) sum_j grad W(x_i - x_j).
    void pairwise_forces(const std::vector<double>& x, std::vector<double>& force) {
        const std::size_t n = cfg_.n_particles;
        const int d = cfg_.dim;
        const double gamma = cfg_.potential.gamma;
        if (gamma == 0.0) {
            std::fill(force.begin(), force.end(), 0.0);
            return;
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        parallel_for(n, cfg_.jobs, [&](std::size_t i) {
            const std::size_t off = i * static_cast<std::size_t>(d);
            for (int k = 0; k < d; ++k) {
                const std::size_t ik = off + static_cast<std::size_t>(k);
                const double xi = x[ik];
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    acc += xi - x[j * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)];
                force[ik] = gamma * acc * inv_n;
            }
        });
    }

    void check_finite(const std::vector<double>& v, int step) const {
        for (double a : v)
            if (!std::isfinite(a))
                throw DivergenceError("simulate: non-finite state", step);
    }
};

}  // namespace

TrajectoryBundle simulate_interacting(const SimConfig& config) {
    Simulator sim(config, false, nullptr);
    return sim.run(true, false);
}

TrajectoryBundle simulate_coupled(const SimConfig& config,
                                  const std::vector<GridDensity1D>& mu_ref) {
    const ReferenceFlow flow = build_reference(mu_ref, config);
    Simulator sim(config, true, &flow);
    return sim.run(true, true);
}

TrajectoryBundle simulate_independent(const SimConfig& config,
                                      const std::vector<GridDensity1D>& mu_ref) {
    const ReferenceFlow flow = build_reference(mu_ref, config);
    Simulator sim(config, true, &flow);
    return sim.run(false, true);
}

EmpiricalMeasure empirical_at(const TrajectoryBundle& bundle, double t, Slice which) {
    const std::size_t k = bundle.frame_index(t);
    const auto& frames = which == Slice::X ? bundle.X : bundle.Y;
    if (frames.empty()) throw std::invalid_argument("empirical_at: requested slice not stored");
    EmpiricalMeasure out;
    out.dim = bundle.dim;
    out.points = frames[k];
    return out;
}

DiscreteMeasure pair_empirical(const TrajectoryBundle& bundle, double t) {
    if (bundle.n < 2) throw std::invalid_argument("pair_empirical: needs N >= 2");
    const std::size_t k = bundle.frame_index(t);
    const std::size_t n = bundle.n;
    if (n * (n - 1) > 4'000'000) throw CapacityError("pair_empirical: too many pairs");
    const int d = bundle.dim;
    const auto& frame = bundle.X[k];
    DiscreteMeasure out;
    out.dim = 2 * d;
    out.weights.assign(n * (n - 1), 1.0 / static_cast<double>(n * (n - 1)));
    out.points.reserve(n * (n - 1) * static_cast<std::size_t>(2 * d));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            for (int c = 0; c < d; ++c)
                out.points.push_back(frame[i * static_cast<std::size_t>(d) +
                                           static_cast<std::size_t>(c)]);
            for (int c = 0; c < d; ++c)
                out.points.push_back(frame[j * static_cast<std::size_t>(d) +
                                           static_cast<std::size_t>(c)]);
        }
    }
    return out;
}

CouplingReport coupling_check(const TrajectoryBundle& bundle,
                              const std::vector<GridDensity1D>& mu_ref,
                              const PotentialSpec& potential) {
    if (!bundle.has_coupled())
        throw std::invalid_argument("coupling_check: bundle has no coupled slice");
    if (bundle.dim != 1)
        throw std::invalid_argument("coupling_check: exact W1 path requires dim == 1");

    // Reference frame lookup per saved time.
    const auto ref_at = [&](double t) -> const GridDensity1D& {
        std::size_t best = 0;
        double err = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < mu_ref.size(); ++k) {
            const double e = std::abs(mu_ref[k].time - t);
            if (e < err) {
                err = e;
                best = k;
            }
        }
        if (err > 1e-9 * (1.0 + std::abs(t)))
            throw ConfigError("coupling_check: reference frame missing at a saved time");
        return mu_ref[best];
    };

    CouplingReport rep;
    rep.alpha = potential.beta + 2.0 * std::min(potential.gamma, 0.0);
    const std::size_t m = bundle.times.size();
    rep.times = bundle.times;
    rep.w1_mu_ref.resize(m);
    rep.w1_nu_ref.resize(m);
    rep.w1_mu_nu.resize(m);
    rep.rhs.resize(m);
    rep.residual.resize(m);

    std::vector<EmpiricalMeasure> xs(m), ys(m);
    for (std::size_t k = 0; k < m; ++k) {
        xs[k] = EmpiricalMeasure{bundle.dim, bundle.X[k]};
        ys[k] = EmpiricalMeasure{bundle.dim, bundle.Y[k]};
    }
    parallel_for(m, 0, [&](std::size_t k) {
        const auto& ref = ref_at(bundle.times[k]);
        rep.w1_mu_ref[k] = w1_exact_1d(xs[k], ref);
        rep.w1_nu_ref[k] = w1_exact_1d(ys[k], ref);
        rep.w1_mu_nu[k] = w1_exact_1d(xs[k], ys[k]);
    });

    rep.min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
        const double t = bundle.times[k];
        // trapezoid of e^{-alpha (t-s)} W1(nu_hat_s, mu_s) over s <= t
        KahanSum integral;
        for (std::size_t j = 0; j + 1 <= k; ++j) {
            const double s0 = bundle.times[j], s1 = bundle.times[j + 1];
            const double f0 = std::exp(-rep.alpha * (t - s0)) * rep.w1_nu_ref[j];
            const double f1 = std::exp(-rep.alpha * (t - s1)) * rep.w1_nu_ref[j + 1];
            integral.add(0.5 * (f0 + f1) * (s1 - s0));
        }
        rep.rhs[k] = potential.Gamma * integral.value() + rep.w1_nu_ref[k];
        rep.residual[k] = rep.rhs[k] - rep.w1_mu_ref[k];
        rep.min_residual = std::min(rep.min_residual, rep.residual[k]);
    }
    return rep;
}

SdeRegularityReport sde_regularity_check(const SimConfig& config,
                                         const std::vector<GridDensity1D>& mu_ref,
                                         const std::vector<double>& gaps, double exp_coeff) {
    if (gaps.empty()) throw std::invalid_argument("sde_regularity_check: no gaps");
    const auto bundle = simulate_independent(config, mu_ref);
    const std::size_t n = bundle.n;
    const std::size_t base = 0;  // pairs anchored at t0 = 0
    SdeRegularityReport rep;
    for (double gap : gaps) {
        const std::size_t k = bundle.frame_index(gap);
        KahanSum m2, m4, es;
        for (std::size_t i = 0; i < n; ++i) {
            double d2 = 0;
            for (int c = 0; c < bundle.dim; ++c) {
                const std::size_t ic =
                    i * static_cast<std::size_t>(bundle.dim) + static_cast<std::size_t>(c);
                const double dv = bundle.Y[k][ic] - bundle.Y[base][ic];
                d2 += dv * dv;
            }
            m2.add(d2);
            m4.add(d2 * d2);
            // sup over the saved grid within [0, gap]
            double sup_d2 = 0;
            for (std::size_t u = base; u <= k; ++u) {
                double du2 = 0;
                for (int c = 0; c < bundle.dim; ++c) {
                    const std::size_t ic =
                        i * static_cast<std::size_t>(bundle.dim) + static_cast<std::size_t>(c);
                    const double dv = bundle.Y[u][ic] - bundle.Y[base][ic];
                    du2 += dv * dv;
                }
                sup_d2 = std::max(sup_d2, du2);
            }
            es.add(std::exp(exp_coeff * sup_d2));
        }
        const double inv = 1.0 / static_cast<double>(n);
        rep.gap.push_back(bundle.times[k]);
        rep.m2.push_back(m2.value() * inv);
        rep.m4.push_back(m4.value() * inv);
        rep.exp_sup.push_back(es.value() * inv);
    }
    std::vector<double> lg, l2, l4;
    for (std::size_t k = 0; k < rep.gap.size(); ++k) {
        if (rep.gap[k] <= 0 || rep.m2[k] <= 0) continue;
        lg.push_back(std::log(rep.gap[k]));
        l2.push_back(std::log(rep.m2[k]));
        l4.push_back(std::log(rep.m4[k]));
    }
    if (lg.size() >= 2) {
        rep.m2_fit = linear_fit(lg, l2);
        rep.m4_fit = linear_fit(lg, l4);
    }
    return rep;
}

SupDeviationReport sup_deviation_over_window(const SimConfig& config,
                                             const std::vector<GridDensity1D>& mu_ref,
                                             double epsilon, double window, std::size_t trials) {
    if (!(window >= 0) || window > config.T + 1e-12)
        throw std::invalid_argument("sup_deviation_over_window: window must lie in [0, T]");
    if (trials < 1) throw std::invalid_argument("sup_deviation_over_window: trials >= 1");

    const auto ref_at = [&](double t) -> const GridDensity1D& {
        std::size_t best = 0;
        double err = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < mu_ref.size(); ++k) {
            const double e = std::abs(mu_ref[k].time - t);
            if (e < err) {
                err = e;
                best = k;
            }
        }
        return mu_ref[best];
    };

    std::vector<char> window_hit(trials, 0), horizon_hit(trials, 0);
    parallel_for(trials, 0, [&](std::size_t trial) {
        SimConfig local = config;
        local.rng = config.rng.sub(trial);
        local.jobs = 1;
        TrajectoryBundle bundle;
        bool diverged = false;
        try {
            bundle = simulate_coupled(local, mu_ref);
        } catch (const DivergenceError&) {
            diverged = true;  // diverged replicas count as deviation events
        }
        if (diverged) {
            window_hit[trial] = 1;
            horizon_hit[trial] = 1;
            return;
        }
        // window sup over pairs of saved times in [0, window]
        double wsup = 0;
        std::vector<std::size_t> win;
        for (std::size_t k = 0; k < bundle.times.size(); ++k)
            if (bundle.times[k] <= window + 1e-12) win.push_back(k);
        for (std::size_t a = 0; a < win.size(); ++a) {
            for (std::size_t b = a + 1; b < win.size(); ++b) {
                const auto ya = EmpiricalMeasure{bundle.dim, bundle.Y[win[a]]};
                const auto yb = EmpiricalMeasure{bundle.dim, bundle.Y[win[b]]};
                wsup = std::max(wsup, w1_exact_1d(ya, yb));
            }
        }
        if (wsup > epsilon) window_hit[trial] = 1;

        double hsup = 0;
        for (std::size_t k = 0; k < bundle.times.size(); ++k) {
            const auto xk = EmpiricalMeasure{bundle.dim, bundle.X[k]};
            hsup = std::max(hsup, w1_exact_1d(xk, ref_at(bundle.times[k])));
        }
        if (hsup > epsilon) horizon_hit[trial] = 1;
    });

    SupDeviationReport rep;
    rep.trials = trials;
    std::size_t wh = 0, hh = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        wh += window_hit[t];
        hh += horizon_hit[t];
    }
    rep.window_estimate = static_cast<double>(wh) / static_cast<double>(trials);
    rep.horizon_estimate = static_cast<double>(hh) / static_cast<double>(trials);
    const auto wci = clopper_pearson(wh, trials);
    rep.window_ci_lo = wci.lo;
    rep.window_ci_hi = wci.hi;
    const auto hci = clopper_pearson(hh, trials);
    rep.horizon_ci_lo = hci.lo;
    rep.horizon_ci_hi = hci.hi;
    return rep;
}

}  // namespace lab
