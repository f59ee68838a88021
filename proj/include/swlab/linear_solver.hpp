#pragma once

// Exact per-mode semigroups for the Lame viscosity operator and the coupled
// linear height/velocity system, an ETD1 stepper for the full linearized
// system with transport and forcing, and per-block energy monitoring.

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "swlab/besov.hpp"
#include "swlab/field.hpp"
#include "swlab/partition.hpp"

namespace swlab {

struct State {
    double t = 0;
    SpectralField2D h;
    VectorField2D u;
    double nu = 1.0;

    void validate() const {
        if (!(nu > 0)) throw std::invalid_argument("State: nu must be positive");
        if (!(h.grid == u.grid())) throw std::invalid_argument("State: grid mismatch");
        if (!h.finite() || !u.finite()) throw std::runtime_error("State: non-finite field");
    }
};

namespace detail {

// entries of exp(t M) for M = [[0, -i s], [-i s, -2 nu s^2]], s = |xi|.
// Written as e^{mu t}(cosh(w t) I + t sinhc(w t) (M - mu I)) with
// mu = -nu s^2, w^2 = nu^2 s^4 - s^2; the sinhc/cosh pair switches to a
// series when the discriminant is close to zero (defective eigenvalue).
struct CoupledPropagator {
    cplx e11, e12, e21, e22;
};

inline void cosh_sinhc(double disc, double t, double& ch, double& shc) {
    const double z = disc * t * t;
    if (std::abs(disc) < 1e-8) {
        // series in z: cosh = sum z^m/(2m)!, sinhc = sum z^m/(2m+1)!
        ch = 1.0; shc = 1.0;
        double zp = 1.0;
        for (int m = 1; m <= 6; ++m) {
            zp *= z;
            double c_den = 1.0, s_den = 1.0;
            for (int i = 1; i <= 2 * m; ++i) c_den *= i;
            for (int i = 1; i <= 2 * m + 1; ++i) s_den *= i;
            ch += zp / c_den;
            shc += zp / s_den;
        }
    } else if (disc > 0) {
        double w = std::sqrt(disc);
        ch = std::cosh(w * t);
        shc = w * t == 0 ? 1.0 : std::sinh(w * t) / (w * t);
    } else {
        double w = std::sqrt(-disc);
        ch = std::cos(w * t);
        shc = w * t == 0 ? 1.0 : std::sin(w * t) / (w * t);
    }
}

inline CoupledPropagator coupled_propagator(double sigma, double nu, double t) {
    const double mu = -nu * sigma * sigma;
    const double disc = nu * nu * std::pow(sigma, 4) - sigma * sigma;
    double ch, shc;
    cosh_sinhc(disc, t, ch, shc);
    const double emu = std::exp(mu * t);
    CoupledPropagator P;
    // M - mu I = [[-mu, -i s], [-i s, mu]]
    P.e11 = emu * (ch + shc * t * (-mu));
    P.e22 = emu * (ch + shc * t * mu);
    P.e12 = emu * shc * t * cplx(0.0, -sigma);
    P.e21 = P.e12;
    return P;
}

}  // namespace detail

// free evolution of d_t u - nu (div D(u) + grad div u) = 0
inline VectorField2D lame_semigroup(const VectorField2D& u0, double nu, double t) {
    if (t < 0) throw std::invalid_argument("lame_semigroup: t must be >= 0");
    VectorField2D out(u0.grid());
    out.u1.mean = u0.u1.mean;
    out.u2.mean = u0.u2.mean;
    for (std::size_t idx = 1; idx < u0.u1.coef.size(); ++idx) {
        double kx, ky;
        u0.u1.wavevector(idx, kx, ky);
        const double s2 = kx * kx + ky * ky;
        if (s2 == 0) continue;
        const cplx c1 = u0.u1.coef[idx], c2 = u0.u2.coef[idx];
        if (c1 == cplx(0.0) && c2 == cplx(0.0)) continue;
        // split along/perpendicular to xi: gradient part decays at 2 nu |xi|^2,
        // solenoidal part at nu |xi|^2 / 2
        const cplx a = (kx * c1 + ky * c2) / std::sqrt(s2);
        const cplx p1 = c1 - a * kx / std::sqrt(s2);
        const cplx p2 = c2 - a * ky / std::sqrt(s2);
        const double dperp = std::exp(-0.5 * nu * s2 * t);
        const double dpar = std::exp(-2.0 * nu * s2 * t);
        out.u1.coef[idx] = dperp * p1 + dpar * a * kx / std::sqrt(s2);
        out.u2.coef[idx] = dperp * p2 + dpar * a * ky / std::sqrt(s2);
    }
    return out;
}

// exact solution of d_t h + div u = 0, d_t u - nu Lame(u) + grad h = 0
inline State coupled_semigroup(const State& s, double t) {
    if (t < 0) throw std::invalid_argument("coupled_semigroup: t must be >= 0");
    State out;
    out.t = s.t + t;
    out.nu = s.nu;
    out.h = SpectralField2D(s.h.grid);
    out.u = VectorField2D(s.h.grid);
    out.h.mean = s.h.mean;
    out.u.u1.mean = s.u.u1.mean;
    out.u.u2.mean = s.u.u2.mean;
    for (std::size_t idx = 1; idx < s.h.coef.size(); ++idx) {
        double kx, ky;
        s.h.wavevector(idx, kx, ky);
        const double s2 = kx * kx + ky * ky;
        if (s2 == 0) continue;
        const double sigma = std::sqrt(s2);
        const cplx hc = s.h.coef[idx];
        const cplx c1 = s.u.u1.coef[idx], c2 = s.u.u2.coef[idx];
        if (hc == cplx(0.0) && c1 == cplx(0.0) && c2 == cplx(0.0)) continue;
        const double ex = kx / sigma, ey = ky / sigma;
        const cplx a = ex * c1 + ey * c2;    // xi-parallel amplitude
        const cplx p1 = c1 - a * ex;
        const cplx p2 = c2 - a * ey;
        const double dperp = std::exp(-0.5 * s.nu * s2 * t);
        auto P = detail::coupled_propagator(sigma, s.nu, t);
        const cplx hn = P.e11 * hc + P.e12 * a;
        const cplx an = P.e21 * hc + P.e22 * a;
        out.h.coef[idx] = hn;
        out.u.u1.coef[idx] = dperp * p1 + an * ex;
        out.u.u2.coef[idx] = dperp * p2 + an * ey;
    }
    return out;
}

// -------- the linearized problem --------

struct LinearizedProblem {
    // transport field v and forcings (H, G), sampled at the step instants;
    // null means identically zero
    const Trajectory* v_traj = nullptr;     // v in the velocity slot
    const Trajectory* forcing = nullptr;    // H in the height slot, G in the velocity slot
    State initial;
    double dt = 0;
    double T = 0;
    double c_cfl = 0.5;

    void validate() const {
        if (!(dt > 0) || !(T > 0)) throw std::invalid_argument("LinearizedProblem: dt, T > 0");
        initial.validate();
    }
};

namespace detail {

inline void check_cfl(const VectorField2D& v, double dt, double c_cfl) {
    double vmax = linf_norm(v);
    if (vmax == 0) return;
    double dx = v.grid().period / v.grid().n;
    if (dt > c_cfl * dx / vmax)
        throw std::runtime_error("CFL violation: dt > c_cfl * dx / max|v| (max|v| = " +
                                 std::to_string(vmax) + ")");
}

}  // namespace detail

// One ETD1 step: exact semigroup applied to state plus the left-endpoint
// Duhamel contribution of (-v.grad h + H, -v.grad u + G).
inline State step_linearized(const State& s, const VectorField2D* v,
                             const SpectralField2D* H, const VectorField2D* G,
                             double dt, double c_cfl = 0.5) {
    State stage = s;
    if (v) {
        detail::check_cfl(*v, dt, c_cfl);
        stage.h -= dt * advect(*v, s.h);
        stage.u -= dt * advect(*v, s.u);
    }
    if (H) stage.h += dt * (*H);
    if (G) stage.u += dt * (*G);
    return coupled_semigroup(stage, dt);
}

// per-run monitor records (estimates of the a-priori inequalities)
struct SolveMonitor {
    double apriori_34_lhs = 0, apriori_34_rhs = 0;   // sup/integral Besov bound
    double apriori_33_lhs = 0, apriori_33_rhs = 0;   // omega-weighted bound
    bool aborted = false;
    double last_good_time = 0;
};

struct SolveResult {
    Trajectory trajectory;
    SolveMonitor monitor;
};

inline double initial_block_energy_sum(const SpectralField2D& h0, const VectorField2D& u0,
                                       const DyadicPartition& p, const WeightParams& w,
                                       bool weighted) {
    double s = 0;
    for (int k = p.k_min(); k <= p.k_max(); ++k) {
        double e = block_energy(h0, u0, k, p).value;
        s += weighted ? weight_omega(k, w.T, w) * e : e;
    }
    return s;
}

inline SolveResult solve_linearized(const LinearizedProblem& prob, const DyadicPartition& part,
                                    const WeightParams& weights) {
    prob.validate();
    const int steps = int(std::lround(prob.T / prob.dt));
    if (std::abs(steps * prob.dt - prob.T) > 1e-9 * prob.T)
        throw std::invalid_argument("solve_linearized: T must be a multiple of dt");

    auto sample_of = [&](const Trajectory* tr, int i) -> const TrajectorySample* {
        if (!tr || tr->empty()) return nullptr;
        if (i >= int(tr->size())) i = int(tr->size()) - 1;
        return &tr->sample(std::size_t(i));
    };

    SolveResult res{Trajectory(prob.initial.h.grid, part), {}};
    State s = prob.initial;
    s.t = 0;
    res.trajectory.append(0.0, s.h, s.u);
    for (int i = 0; i < steps; ++i) {
        const TrajectorySample* vs = sample_of(prob.v_traj, i);
        const TrajectorySample* fs = sample_of(prob.forcing, i);
        State next = step_linearized(s, vs ? &vs->u : nullptr, fs ? &fs->h : nullptr,
                                     fs ? &fs->u : nullptr, prob.dt, prob.c_cfl);
        if (!next.h.finite() || !next.u.finite()) {
            res.monitor.aborted = true;
            res.monitor.last_good_time = s.t;
            return res;
        }
        s = std::move(next);
        s.t = (i + 1) * prob.dt;
        res.trajectory.append(s.t, s.h, s.u);
    }
    res.monitor.last_good_time = s.t;

    // a-priori monitors
    const Trajectory& tr = res.trajectory;
    WeightParams w = weights;
    w.T = prob.T;
    const double E0 = initial_block_energy_sum(prob.initial.h, prob.initial.u, part, w, false);
    // (sup-in-time + L1-in-time) Besov bound
    {
        double lhs = time_outside_norm(tr, kInf, {0, 2, 1}, Component::velocity) +
                     time_hybrid_norm(tr, kInf, {0, 1}, Component::height) +
                     time_hybrid_norm(tr, 1, {2, 1}, Component::height);
        double rhs = E0;
        if (prob.forcing && !prob.forcing->empty()) {
            rhs += time_hybrid_norm(*prob.forcing, 1, {0, 1}, Component::height) +
                   time_outside_norm(*prob.forcing, 1, {0, 2, 1}, Component::velocity);
        }
        if (prob.v_traj && !prob.v_traj->empty()) {
            // int V'(t) (||u||_B0 + ||h||_B01~) dt by trapezoid on samples
            const Trajectory& vt = *prob.v_traj;
            std::vector<double> integrand;
            for (std::size_t i = 0; i < tr.size() && i < vt.size(); ++i) {
                double vp = besov_norm(vt.sample(i).u, {2, 2, 1}, part);
                double un = besov_norm(tr.sample(i).u, {0, 2, 1}, part);
                double hn = hybrid_norm(tr.sample(i).h, {0, 1}, part);
                integrand.push_back(vp * (un + hn));
            }
            for (std::size_t i = 0; i + 1 < integrand.size(); ++i)
                rhs += 0.5 * (tr.time(i + 1) - tr.time(i)) * (integrand[i] + integrand[i + 1]);
        }
        res.monitor.apriori_34_lhs = lhs;
        res.monitor.apriori_34_rhs = rhs;
    }
    // omega-weighted bound
    {
        double lhs = time_space_norm(tr, 1, {2, 2, 1}, Component::velocity) +
                     time_space_norm(tr, 2, {1, 2, 1}, Component::velocity) +
                     weighted_norm_E_hybrid(tr, 0, 1, w, Component::height);
        double rhs = initial_block_energy_sum(prob.initial.h, prob.initial.u, part, w, true);
        if (prob.forcing && !prob.forcing->empty()) {
            const Trajectory& ft = *prob.forcing;
            for (int k = part.k_min(); k <= part.k_max(); ++k) {
                std::vector<double> gk(ft.size()), hk(ft.size());
                for (std::size_t i = 0; i < ft.size(); ++i) {
                    gk[i] = ft.block_record(Component::velocity, i, k);
                    hk[i] = k >= 1 ? block_grad_l2(ft.sample(i).h, k, part)
                                   : ft.block_record(Component::height, i, k);
                }
                rhs += weight_omega(k, prob.T, w) *
                       (detail::time_lr(ft, gk, 1) + detail::time_lr(ft, hk, 1));
            }
        }
        if (prob.v_traj && !prob.v_traj->empty()) {
            const Trajectory& vt = *prob.v_traj;
            double u_l2b1 = time_space_norm(tr, 2, {1, 2, 1}, Component::velocity);
            double v_l2b1 = time_space_norm(vt, 2, {1, 2, 1}, Component::velocity);
            double v_l1b2 = time_space_norm(vt, 1, {2, 2, 1}, Component::velocity);
            double h_e01 = weighted_norm_E_hybrid(tr, 0, 1, w, Component::height);
            rhs += u_l2b1 * v_l2b1 + h_e01 * v_l1b2;
        }
        res.monitor.apriori_33_lhs = lhs;
        res.monitor.apriori_33_rhs = rhs;
    }
    return res;
}

// explicit RK2 step for d_t f + v.grad f = g (v, g frozen over the step)
inline SpectralField2D transport_step(const SpectralField2D& f, const VectorField2D& v,
                                      const SpectralField2D& g, double dt,
                                      double c_cfl = 0.5) {
    detail::check_cfl(v, dt, c_cfl);
    SpectralField2D k1 = g - advect(v, f);
    SpectralField2D fmid = f + (0.5 * dt) * k1;
    SpectralField2D k2 = g - advect(v, fmid);
    return f + dt * k2;
}

}  // namespace swlab
