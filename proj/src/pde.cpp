#include "lab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "lab/errors.hpp"
#include "lab/transport.hpp"

namespace lab {

namespace {

// B(z) = z / (e^z - 1), the exponential-fitting weight.
double bernoulli(double z) {
    if (std::abs(z) < 1e-10) return 1.0 - z / 2 + z * z / 12;
    if (z > 700) return 0.0;
    return z / std::expm1(z);
}

struct Tridiag {
    std::vector<double> lo, di, up;  // lo[0] and up[n-1] unused
};

// Thomas algorithm; overwrites rhs with the solution.
void solve_tridiag(const Tridiag& m, std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    std::vector<double> c(n), d(n);
    c[0] = m.up[0] / m.di[0];
    d[0] = rhs[0] / m.di[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double w = m.di[i] - m.lo[i] * c[i - 1];
        c[i] = (i + 1 < n) ? m.up[i] / w : 0.0;
        d[i] = (rhs[i] - m.lo[i] * d[i - 1]) / w;
    }
    rhs[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = d[i] - c[i] * rhs[i + 1];
}

}  // namespace

PdeResult solve_mckean_1d(const PotentialSpec& potential, const GridDensity1D& initial, double T,
                          double dt, const PdeOptions& opts) {
    std::string why;
    if (!validate(initial, &why)) throw std::invalid_argument("solve_mckean_1d: " + why);
    if (!(T >= 0) || !(dt > 0)) throw std::invalid_argument("solve_mckean_1d: need T >= 0, dt > 0");
    if (!(opts.theta >= 0 && opts.theta <= 1))
        throw std::invalid_argument("solve_mckean_1d: theta must lie in [0, 1]");

    const int n = initial.n_cells;
    const double h = initial.h();
    const int steps = static_cast<int>(std::llround(T / dt));
    const double gamma = potential.gamma;  // W' (z) = gamma z for the quadratic family

    PdeResult out;
    out.dt = dt;
    out.steps = steps;
    GridDensity1D f = initial;
    f.time = 0.0;

    const AlphaSchedule alpha_sched(opts.alpha0 > 0 ? opts.alpha0 : 1.0, opts.alpha_b);

    const auto record = [&](const GridDensity1D& g) {
        out.frames.push_back(g);
        out.trace.times.push_back(g.time);
        out.trace.mean.push_back(g.mean());
        out.trace.second_moment.push_back(g.second_moment());
        if (opts.alpha0 > 0) {
            const double a = alpha_sched(g.time);
            KahanSum s;
            for (int i = 0; i < n; ++i)
                s.add(g.values[i] * std::exp(a * g.center(i) * g.center(i)));
            out.trace.alpha.push_back(a);
            out.trace.m_alpha.push_back(s.value() * h);
        }
    };
    record(f);

    std::vector<double> face_plus(static_cast<std::size_t>(n - 1));
    std::vector<double> face_minus(static_cast<std::size_t>(n - 1));
    Tridiag A;
    A.lo.resize(static_cast<std::size_t>(n));
    A.di.resize(static_cast<std::size_t>(n));
    A.up.resize(static_cast<std::size_t>(n));
    std::vector<double> rhs(static_cast<std::size_t>(n));

    double prev_mass = f.mass();
    for (int step = 0; step < steps; ++step) {
        // Drift coefficient from the current state: b(x) = V'(x) + gamma (x - mean).
        const double mean = f.mean();
        for (int j = 0; j + 1 < n; ++j) {
            const double xf = initial.x_min + (j + 1) * h;
            const double u = -(potential.v_grad1(xf) + gamma * (xf - mean));  // velocity
            const double s = u * h;
            face_plus[static_cast<std::size_t>(j)] = bernoulli(-s) / h;
            face_minus[static_cast<std::size_t>(j)] = bernoulli(s) / h;
        }
        // L row i: lower = face_plus[i-1]/h, upper = face_minus[i]/h,
        // diag = -(face_minus[i-1] + face_plus[i])/h, zero-flux boundaries.
        const double th = opts.theta;
        for (int i = 0; i < n; ++i) {
            const std::size_t iu = static_cast<std::size_t>(i);
            const double low = i > 0 ? face_plus[iu - 1] / h : 0.0;
            const double upp = i + 1 < n ? face_minus[iu] / h : 0.0;
            const double dia = -((i > 0 ? face_minus[iu - 1] : 0.0) +
                                 (i + 1 < n ? face_plus[iu] : 0.0)) /
                               h;
            A.lo[iu] = -th * dt * low;
            A.up[iu] = -th * dt * upp;
            A.di[iu] = 1.0 - th * dt * dia;
            rhs[iu] = f.values[iu] +
                      (1 - th) * dt *
                          (low * (i > 0 ? f.values[iu - 1] : 0.0) + dia * f.values[iu] +
                           upp * (i + 1 < n ? f.values[iu + 1] : 0.0));
        }
        solve_tridiag(A, rhs);

        double clipped = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::size_t iu = static_cast<std::size_t>(i);
            out.min_cell_before_clip = std::min(out.min_cell_before_clip, rhs[iu]);
            if (rhs[iu] < 0) {
                clipped += -rhs[iu] * h;
                rhs[iu] = 0.0;
            }
        }
        out.total_clipped += clipped;
        if (out.total_clipped > opts.clip_abort)
            throw std::runtime_error("solve_mckean_1d: clipped mass exceeded the abort threshold");

        f.values = rhs;
        f.time = (step + 1) * dt;

        const double mass = f.mass();
        out.max_step_mass_drift = std::max(out.max_step_mass_drift, std::abs(mass - prev_mass));
        prev_mass = mass;
        if ((f.values.front() + f.values.back()) * h > opts.boundary_leak_tol)
            throw std::runtime_error(
                "solve_mckean_1d: boundary mass above the leak tolerance; widen the domain");

        if ((step + 1) % opts.save_every == 0 || step + 1 == steps) record(f);
    }
    return out;
}

GridDensity1D initial_grid(const PotentialSpec& potential, double mean, double sd, int n_cells) {
    if (!(sd > 0) || n_cells < 8) throw std::invalid_argument("initial_grid: bad parameters");
    // Expand until both the initial gaussian and exp(-phi) decay to 1e-16 of
    // their peaks, then add a 50% margin.
    double half = std::max(6.0 * sd + std::abs(mean), 1.0);
    const auto phi = [&](double x) {
        return potential.v_value1(x) + potential.gamma * x * x / 2.0;  // mean-field at mean 0
    };
    for (int it = 0; it < 64; ++it) {
        const double edge_pot = std::exp(-(phi(half) - phi(0.0)));
        const double z = (half - std::abs(mean)) / sd;
        const double edge_init = std::exp(-0.5 * z * z);
        if (edge_pot < 1e-16 && edge_init < 1e-16) break;
        half *= 1.25;
    }
    half *= 1.5;
    return grid_gaussian(mean, sd, -half, half, n_cells);
}

GronwallCheck energy_gronwall_check(const MomentTrace& trace, const PotentialSpec& potential,
                                    std::optional<double> eta_bar_opt, int dim) {
    GronwallCheck out;
    // The comparison ODE from the proof uses eta_bar = gamma when gamma < 0
    // (the interaction term is kept) and any negative number otherwise.
    out.eta_bar = eta_bar_opt.value_or(potential.gamma < 0 ? potential.gamma : -1e-3);
    if (!(out.eta_bar < 0))
        throw std::invalid_argument("energy_gronwall_check: eta_bar must be negative");
    const double a = 2.0 * (potential.beta + out.eta_bar);
    const double g0 = potential.grad_v_at_zero_norm();
    const double G = 2.0 * dim + g0 * g0 / (2.0 * std::abs(out.eta_bar));
    if (trace.times.empty()) throw std::invalid_argument("energy_gronwall_check: empty trace");
    const double e0 = trace.second_moment.front();
    out.min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        const double t = trace.times[k] - trace.times.front();
        double bound;
        if (std::abs(a) < 1e-14) {
            bound = e0 + G * t;
        } else {
            bound = std::exp(-a * t) * e0 + G * (1.0 - std::exp(-a * t)) / a;
        }
        const double res = bound - trace.second_moment[k];
        out.times.push_back(trace.times[k]);
        out.bound.push_back(bound);
        out.residual.push_back(res);
        out.min_residual = std::min(out.min_residual, res);
    }
    return out;
}

AlphaSchedule::AlphaSchedule(double alpha0, double b) : alpha0_(alpha0), b_(b) {
    if (!(alpha0 > 0)) throw std::invalid_argument("AlphaSchedule: alpha0 must be positive");
}

double AlphaSchedule::operator()(double t) const {
    if (std::abs(b_) < 1e-14) return 1.0 / (1.0 / alpha0_ + 4.0 * t);
    const double ebt = std::exp(-b_ * t);
    return ebt / (1.0 / alpha0_ + 4.0 * (1.0 - ebt) / b_);
}

TimeHolderReport time_holder_check(const std::vector<GridDensity1D>& frames) {
    if (frames.size() < 4) throw std::invalid_argument("time_holder_check: need several frames");
    TimeHolderReport out;
    const double t0 = frames.front().time;
    const double span = frames.back().time - t0;
    const double min_gap = (frames[1].time - t0) * 4;
    const auto frame_at = [&](double t) -> const GridDensity1D& {
        std::size_t best = 0;
        double err = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < frames.size(); ++k) {
            const double e = std::abs(frames[k].time - t);
            if (e < err) {
                err = e;
                best = k;
            }
        }
        return frames[best];
    };
    out.max_ratio = 0.0;
    for (double gap = span; gap >= min_gap; gap /= 2) {
        const auto& g = frame_at(t0 + gap);
        const double actual_gap = g.time - t0;
        if (actual_gap <= 0) continue;
        const double w1 = wp_grid_1d(frames.front(), g, 1.0);
        if (w1 <= 0) continue;
        out.gaps.push_back(actual_gap);
        out.w1.push_back(w1);
        out.max_ratio = std::max(out.max_ratio, w1 / std::sqrt(actual_gap));
    }
    if (out.gaps.size() < 3)
        throw std::invalid_argument("time_holder_check: not enough usable dyadic gaps");
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < out.gaps.size(); ++k) {
        lx.push_back(std::log(out.gaps[k]));
        ly.push_back(std::log(out.w1[k]));
    }
    out.loglog = linear_fit(lx, ly);
    return out;
}

EquilibriumRateReport equilibrium_convergence_check(const std::vector<GridDensity1D>& frames,
                                                    const GridDensity1D& mu_inf,
                                                    const PotentialSpec& potential) {
    if (!(potential.beta > 0) || !(potential.beta + 2 * potential.gamma > 0))
        throw std::invalid_argument(
            "equilibrium_convergence_check: refused outside the uniformly convex case "
            "(needs beta > 0 and beta + 2 gamma > 0)");
    if (frames.size() < 4)
        throw std::invalid_argument("equilibrium_convergence_check: need several frames");
    EquilibriumRateReport out;
    std::vector<double> t, logw;
    out.plateau = wp_grid_1d(frames.back(), mu_inf, 2.0);
    const double floor = std::max(10.0 * out.plateau, 1e-12);
    for (const auto& g : frames) {
        const double w2 = wp_grid_1d(g, mu_inf, 2.0);
        if (w2 > floor) {
            t.push_back(g.time);
            logw.push_back(std::log(w2));
        }
    }
    out.points_used = t.size();
    if (t.size() < 3)
        throw std::invalid_argument(
            "equilibrium_convergence_check: too few frames above the discretization floor");
    const auto fit = linear_fit(t, logw);
    out.lambda_hat = -fit.slope;
    out.r_squared = fit.r_squared;
    return out;
}

}  // namespace lab
