#pragma once

// Successive-approximation machinery for the nonlinear system: truncated
// initial data, the nonlinear forcings H = -h div u and G = nu (grad h /
// (hbar0+h)) (D(u) + div u), smallness gates, convergence detection, height
// positivity, PDE residuals, and the characteristic representation check.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "swlab/besov.hpp"
#include "swlab/field.hpp"
#include "swlab/linear_solver.hpp"
#include "swlab/partition.hpp"

namespace swlab {

struct IterationConfig {
    int N = 8;                // initial-truncation offset
    double T = 0.25;          // horizon
    double eta = 0.05;        // smallness parameter
    double K = 4.0;           // bound multiplier
    double nu = 1.0;
    double hbar0 = 1.0;       // reference height
    int max_iters = 15;
    double conv_tol = 1e-7;   // stopping tolerance on successive differences
    double c = 0.125;         // weight decay constant
    double dt = 0.0125;
    double c_cfl = 0.5;
    double gate_C = 1.0;      // generic constant exposed as a knob
    double vacuum_frac = 0.1; // delta floor as a fraction of hbar0

    void validate() const {
        if (N < 0) throw std::invalid_argument("IterationConfig: N >= 0 required");
        if (!(T > 0 && eta > 0 && K > 0 && nu > 0 && hbar0 > 0 && conv_tol > 0 && dt > 0))
            throw std::invalid_argument("IterationConfig: T, eta, K, nu, hbar0, conv_tol, dt > 0");
        if (max_iters < 1) throw std::invalid_argument("IterationConfig: max_iters >= 1");
        if (!(c > 0 && c_cfl > 0 && gate_C > 0 && vacuum_frac > 0))
            throw std::invalid_argument("IterationConfig: c, c_cfl, gate_C, vacuum_frac > 0");
    }

    WeightParams weights(int k_max) const { return {c, T, k_max}; }
    double delta_floor() const { return vacuum_frac * hbar0; }
};

struct InitialEnergy {
    double E0 = 0;      // sum of regime-split block energies at t = 0
    double h_norm = 0;  // hybrid (0,1) norm of h0
    double u_norm = 0;  // B^0 norm of u0
};

inline InitialEnergy initial_energy(const SpectralField2D& h0, const VectorField2D& u0,
                                    const DyadicPartition& p) {
    InitialEnergy e;
    for (int k = p.k_min(); k <= p.k_max(); ++k)
        e.E0 += block_energy(h0, u0, k, p).value;
    e.h_norm = hybrid_norm(h0, {0, 1}, p);
    e.u_norm = besov_norm(u0, {0, 2, 1}, p);
    return e;
}

// min over the physical grid of hbar0 + h
inline double min_height(const SpectralField2D& h, double hbar0) {
    auto vals = inverse_transform(h);
    double m = hbar0 + vals[0];
    for (double v : vals) m = std::min(m, hbar0 + v);
    return m;
}

// Keep blocks with |k| <= n + N (intersected with the partition range) and the
// mean; verify the truncated height stays above (3/4) hbar0.
inline std::pair<SpectralField2D, VectorField2D> truncate_initial(
    const SpectralField2D& h0, const VectorField2D& u0, int n, int N,
    const DyadicPartition& p, double hbar0) {
    if (n < 0) throw std::invalid_argument("truncate_initial: n >= 0 required");
    const int cut = n + N;
    std::vector<double> m(p.grid().size(), 0.0);
    for (int k = std::max(p.k_min(), -cut); k <= std::min(p.k_max(), cut); ++k) {
        const auto& mk = p.mask(k);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] += mk[i];
    }
    SpectralField2D h = detail::apply_mask(h0, m);
    h.mean = h0.mean;
    VectorField2D u(detail::apply_mask(u0.u1, m), detail::apply_mask(u0.u2, m));
    u.u1.mean = u0.u1.mean;
    u.u2.mean = u0.u2.mean;
    if (min_height(h, hbar0) < 0.75 * hbar0)
        throw std::runtime_error(
            "truncate_initial: truncated height falls below (3/4) of the reference level");
    return {std::move(h), std::move(u)};
}

// H = -h div u (dealiased)
inline SpectralField2D nonlinear_H(const SpectralField2D& h, const VectorField2D& u) {
    h.check_same_grid(u.u1);
    return -1.0 * dealias_product(h, divergence(u));
}

namespace detail {

inline std::vector<double> physical_trunc(const SpectralField2D& f) {
    SpectralField2D t = f;
    dealias_truncate(t);
    return inverse_transform(t);
}

}  // namespace detail

// G_i = nu sum_j (d_j h / (hbar0+h)) D(u)_{ji} + nu (d_i h / (hbar0+h)) div u,
// computed pointwise in physical space with 2/3-rule truncation.
inline VectorField2D nonlinear_G(const SpectralField2D& h, const VectorField2D& u, double nu,
                                 double hbar0 = 1.0, double delta_floor = 0.1) {
    h.check_same_grid(u.u1);
    auto hs = detail::physical_trunc(h);
    for (double v : hs)
        if (hbar0 + v <= delta_floor)
            throw std::runtime_error("nonlinear_G: height too close to vacuum");
    auto g1 = detail::physical_trunc(derivative(h, 0));
    auto g2 = detail::physical_trunc(derivative(h, 1));
    auto d11 = detail::physical_trunc(derivative(u.u1, 0));
    auto d22 = detail::physical_trunc(derivative(u.u2, 1));
    auto d12v = detail::physical_trunc(0.5 * (derivative(u.u1, 1) + derivative(u.u2, 0)));
    std::vector<double> o1(hs.size()), o2(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double q1 = g1[i] / (hbar0 + hs[i]);
        const double q2 = g2[i] / (hbar0 + hs[i]);
        const double dv = d11[i] + d22[i];
        o1[i] = nu * (q1 * d11[i] + q2 * d12v[i] + q1 * dv);
        o2[i] = nu * (q1 * d12v[i] + q2 * d22[i] + q2 * dv);
    }
    SpectralField2D G1 = forward_transform(h.grid, o1);
    SpectralField2D G2 = forward_transform(h.grid, o2);
    detail::dealias_truncate(G1);
    detail::dealias_truncate(G2);
    return {std::move(G1), std::move(G2)};
}

// -------- gates --------

struct GateReport {
    bool r1 = false, r2 = false, r3 = false, r4 = false;
    bool smallness = false;  // ||u0||_{B^0} + ||h0||_{hybrid(0,1)} <= threshold
    bool all() const { return r1 && r2 && r3 && r4; }
    double E0 = 0, Q0 = 0, omega_max = 0, data_norm = 0;
};

inline GateReport smallness_check(const SpectralField2D& h0, const VectorField2D& u0,
                                  const IterationConfig& cfg, const DyadicPartition& p) {
    cfg.validate();
    GateReport g;
    const InitialEnergy e = initial_energy(h0, u0, p);
    const double C = cfg.gate_C, K = cfg.K, eta = cfg.eta;
    const WeightParams w = cfg.weights(p.k_max());
    g.E0 = e.E0;
    g.data_norm = e.h_norm + e.u_norm;
    g.Q0 = initial_block_energy_sum(h0, u0, p, w, true);
    for (int k = p.k_min(); k <= p.k_max(); ++k)
        g.omega_max = std::max(g.omega_max, weight_omega(k, cfg.T, w));
    g.r1 = std::exp(C * eta) <= 2.0 && K * std::pow(1.0 + K * g.E0, 3) * eta <= 1.0;
    g.r2 = g.E0 == 0.0 || g.omega_max <= 1.0 / (16.0 * C * K * g.E0 * eta);
    g.r3 = C * g.Q0 <= eta / 8.0;
    g.r4 = (1.0 + C * K * g.E0) * eta <= 0.25;
    g.smallness = g.data_norm <= cfg.c * cfg.hbar0;
    return g;
}

// -------- the iteration --------

struct IterateRecord {
    int n = 0;
    double u_linf_b0 = 0, u_l1_b2 = 0, u_l2_b1 = 0;
    double h_linf_b01 = 0, h_l1_b21 = 0, h_e01 = 0;
    double min_height = 0;
    double diff = 0;           // sup-in-time hybrid/B^0 distance to previous iterate
    bool triple_bound = false; // the K E0 bound on the sup/integral norms
};

struct IterationReport {
    std::vector<IterateRecord> iterates;
    GateReport gates;
    double E0 = 0;
    bool converged = false;
    int converged_at = -1;
    bool aborted = false;
    std::string abort_reason;
    double contraction = 0;  // last observed ratio of successive differences
};

struct PicardResult {
    IterationReport report;
    Trajectory trajectory;
};

namespace detail {

// sup over shared sample instants of hybrid(0,1) h-distance + B^0 u-distance
inline double trajectory_distance(const Trajectory& a, const Trajectory& b,
                                  const DyadicPartition& p) {
    double m = 0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        SpectralField2D dh = a.sample(i).h - b.sample(i).h;
        VectorField2D du = a.sample(i).u - b.sample(i).u;
        m = std::max(m, hybrid_norm(dh, {0, 1}, p) + besov_norm(du, {0, 2, 1}, p));
    }
    return m;
}

inline double trajectory_sup_norm(const Trajectory& a, const DyadicPartition& p) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, hybrid_norm(a.sample(i).h, {0, 1}, p) +
                            besov_norm(a.sample(i).u, {0, 2, 1}, p));
    return m;
}

}  // namespace detail

inline PicardResult picard_iterate(const SpectralField2D& h0, const VectorField2D& u0,
                                   const IterationConfig& cfg, const DyadicPartition& p) {
    cfg.validate();
    const Grid2D& g = h0.grid;
    PicardResult out{{}, Trajectory(g, p)};
    IterationReport& rep = out.report;
    const InitialEnergy e0 = initial_energy(h0, u0, p);
    rep.E0 = e0.E0;
    rep.gates = smallness_check(h0, u0, cfg, p);
    const WeightParams w = cfg.weights(p.k_max());

    Trajectory prev(g, p);  // iterate 0 is identically zero (empty = zero)
    double prev_diff = -1;
    int decreasing_run = 0;
    for (int n = 0; n < cfg.max_iters; ++n) {
        std::pair<SpectralField2D, VectorField2D> data;
        try {
            data = truncate_initial(h0, u0, n, cfg.N, p, cfg.hbar0);
        } catch (const std::exception& ex) {
            rep.aborted = true;
            rep.abort_reason = ex.what();
            return out;
        }

        Trajectory forcing(g, p);
        if (!prev.empty()) {
            try {
                for (std::size_t i = 0; i < prev.size(); ++i) {
                    const auto& s = prev.sample(i);
                    forcing.append(prev.time(i), nonlinear_H(s.h, s.u),
                                   nonlinear_G(s.h, s.u, cfg.nu, cfg.hbar0, cfg.delta_floor()));
                }
            } catch (const std::exception& ex) {
                rep.aborted = true;
                rep.abort_reason = ex.what();
                return out;
            }
        }

        LinearizedProblem prob;
        prob.v_traj = prev.empty() ? nullptr : &prev;
        prob.forcing = forcing.empty() ? nullptr : &forcing;
        prob.initial = State{0.0, std::move(data.first), std::move(data.second), cfg.nu};
        prob.dt = cfg.dt;
        prob.T = cfg.T;
        prob.c_cfl = cfg.c_cfl;

        SolveResult res{Trajectory(g, p), SolveMonitor{}};
        try {
            res = solve_linearized(prob, p, w);
        } catch (const std::exception& ex) {
            rep.aborted = true;
            rep.abort_reason = ex.what();
            return out;
        }
        if (res.monitor.aborted) {
            rep.aborted = true;
            rep.abort_reason = "solver aborted at t = " + std::to_string(res.monitor.last_good_time);
            return out;
        }
        const Trajectory& tr = res.trajectory;

        IterateRecord r;
        r.n = n + 1;
        r.u_linf_b0 = time_outside_norm(tr, kInf, {0, 2, 1}, Component::velocity);
        r.u_l1_b2 = time_outside_norm(tr, 1, {2, 2, 1}, Component::velocity);
        r.u_l2_b1 = time_outside_norm(tr, 2, {1, 2, 1}, Component::velocity);
        r.h_linf_b01 = time_hybrid_norm(tr, kInf, {0, 1}, Component::height);
        r.h_l1_b21 = time_hybrid_norm(tr, 1, {2, 1}, Component::height);
        r.h_e01 = weighted_norm_E_hybrid(tr, 0, 1, w, Component::height);
        r.min_height = cfg.hbar0;
        for (std::size_t i = 0; i < tr.size(); ++i)
            r.min_height = std::min(r.min_height, min_height(tr.sample(i).h, cfg.hbar0));
        r.triple_bound =
            r.u_linf_b0 + r.h_linf_b01 + r.h_l1_b21 <= cfg.K * rep.E0 + 1e-12;
        r.diff = prev.empty() ? detail::trajectory_sup_norm(tr, p)
                              : detail::trajectory_distance(tr, prev, p);
        rep.iterates.push_back(r);

        if (r.min_height < 0.5 * cfg.hbar0 && !rep.gates.r4) {
            rep.aborted = true;
            rep.abort_reason = "height positivity lost with the smallness gate violated";
            out.trajectory = std::move(res.trajectory);
            return out;
        }

        if (prev_diff >= 0) {
            rep.contraction = prev_diff > 0 ? r.diff / prev_diff : 0.0;
            decreasing_run = r.diff < prev_diff ? decreasing_run + 1 : 0;
        }
        prev_diff = r.diff;
        prev = std::move(res.trajectory);
        if (r.diff < cfg.conv_tol) {
            rep.converged = true;
            rep.converged_at = n + 1;
            break;
        }
    }
    out.trajectory = std::move(prev);
    if (!rep.converged && decreasing_run >= 3 && prev_diff < cfg.conv_tol) {
        rep.converged = true;
        rep.converged_at = int(rep.iterates.size());
    }
    return out;
}

// -------- residual --------

// L2-in-space, L1-in-time residual of the mass and momentum equations, time
// derivative by centered differences on the stored samples.
inline std::pair<double, double> residual(const Trajectory& tr, double nu,
                                          double hbar0 = 1.0) {
    if (tr.size() < 3) throw std::invalid_argument("residual: need at least 3 samples");
    double mass = 0, mom = 0;
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
        const auto& sm = tr.sample(i - 1);
        const auto& s0 = tr.sample(i);
        const auto& sp = tr.sample(i + 1);
        const double dt2 = tr.time(i + 1) - tr.time(i - 1);
        SpectralField2D ht = (1.0 / dt2) * (sp.h - sm.h);
        VectorField2D ut = (1.0 / dt2) * (sp.u - sm.u);

        SpectralField2D rm = ht + divergence(s0.u);
        rm += dealias_product(s0.h, divergence(s0.u)) + advect(s0.u, s0.h);

        VectorField2D ru = ut - nu * lame_operator(s0.u) + advect(s0.u, s0.u) +
                           gradient(s0.h) -
                           nonlinear_G(s0.h, s0.u, nu, hbar0, 1e-6 * hbar0);

        const double wdt = 0.5 * (tr.time(i + 1) - tr.time(i - 1));
        mass += wdt * l2_norm(rm);
        mom += wdt * l2_norm(ru);
    }
    return {mass, mom};
}

// -------- characteristics --------

namespace detail {

// bilinear interpolation of a periodic sample array at physical point (x, y)
inline double bilinear(const std::vector<double>& vals, const Grid2D& g, double x, double y) {
    const double dx = g.period / g.n;
    double fx = x / dx, fy = y / dx;
    int i0 = int(std::floor(fx)), j0 = int(std::floor(fy));
    double ax = fx - i0, ay = fy - j0;
    auto wrap = [&](int i) { return ((i % g.n) + g.n) % g.n; };
    int i1 = wrap(i0 + 1), j1 = wrap(j0 + 1);
    i0 = wrap(i0);
    j0 = wrap(j0);
    auto at = [&](int i, int j) { return vals[std::size_t(i) * g.n + j]; };
    return (1 - ax) * ((1 - ay) * at(i0, j0) + ay * at(i0, j1)) +
           ax * ((1 - ay) * at(i1, j0) + ay * at(i1, j1));
}

// physical samples of a trajectory's velocity (and optionally height slot)
struct PhysicalTrajectory {
    const Trajectory* tr;
    std::vector<std::vector<double>> v1, v2, h;

    explicit PhysicalTrajectory(const Trajectory& t, bool with_h = false) : tr(&t) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            v1.push_back(inverse_transform(t.sample(i).u.u1));
            v2.push_back(inverse_transform(t.sample(i).u.u2));
            if (with_h) h.push_back(inverse_transform(t.sample(i).h));
        }
    }

    // index of the last sample with time <= t (clamped)
    std::size_t floor_index(double t) const {
        std::size_t i = 0;
        while (i + 1 < tr->size() && tr->time(i + 1) <= t + 1e-12) ++i;
        return i;
    }

    void velocity(double t, double x, double y, double& vx, double& vy) const {
        const Grid2D& g = tr->grid();
        std::size_t i = floor_index(t);
        vx = bilinear(v1[i], g, x, y);
        vy = bilinear(v2[i], g, x, y);
        if (i + 1 < tr->size()) {
            double t0 = tr->time(i), t1 = tr->time(i + 1);
            double a = (t - t0) / (t1 - t0);
            if (a > 0) {
                vx = (1 - a) * vx + a * bilinear(v1[i + 1], g, x, y);
                vy = (1 - a) * vy + a * bilinear(v2[i + 1], g, x, y);
            }
        }
    }
};

}  // namespace detail

// RK2 integration of d_t psi = v(t, psi), psi(0) = x, up to time t
inline std::pair<double, double> flow_map(const Trajectory& v_traj, double x, double y,
                                          double t, int steps = 64) {
    if (v_traj.empty()) return {x, y};
    detail::PhysicalTrajectory pv(v_traj);
    const double dt = t / steps;
    double px = x, py = y;
    for (int i = 0; i < steps; ++i) {
        double t0 = i * dt;
        double k1x, k1y, k2x, k2y;
        pv.velocity(t0, px, py, k1x, k1y);
        pv.velocity(t0 + 0.5 * dt, px + 0.5 * dt * k1x, py + 0.5 * dt * k1y, k2x, k2y);
        px += dt * k2x;
        py += dt * k2y;
    }
    return {px, py};
}

// Checks the characteristic representation of the height of iterate n+1:
//   hbar0 + h(t,x) = (hbar0 + h(0,.))(y(0))
//                    - int_0^t div u(tau, y(tau)) dtau + int_0^t H(tau, y(tau)) dtau
// where y is the transport characteristic of v through (t, x), traced
// backwards by RK2. Returns the max deviation over a probe grid.
inline double height_representation_check(const Trajectory& tr, const Trajectory* v_traj,
                                          const Trajectory* forcing, double hbar0,
                                          int probe = 8) {
    if (tr.size() < 2) throw std::invalid_argument("height_representation_check: too short");
    const Grid2D& g = tr.grid();
    const std::size_t nsamp = tr.size();

    std::vector<std::vector<double>> divu, Hs;
    for (std::size_t i = 0; i < nsamp; ++i) {
        divu.push_back(inverse_transform(divergence(tr.sample(i).u)));
        if (forcing) Hs.push_back(inverse_transform(forcing->sample(
            std::min(i, forcing->size() - 1)).h));
    }
    auto h0_phys = inverse_transform(tr.sample(0).h);
    auto ht_phys = inverse_transform(tr.back().h);

    detail::PhysicalTrajectory* pv = nullptr;
    detail::PhysicalTrajectory pv_store = v_traj && !v_traj->empty()
                                              ? detail::PhysicalTrajectory(*v_traj)
                                              : detail::PhysicalTrajectory(tr);
    if (v_traj && !v_traj->empty()) pv = &pv_store;

    double worst = 0;
    const double step = g.period / probe;
    for (int a = 0; a < probe; ++a) {
        for (int b = 0; b < probe; ++b) {
            const double x = a * step, yq = b * step;
            // trace the characteristic backwards, recording it at sample times
            std::vector<std::pair<double, double>> path(nsamp, {x, yq});
            if (pv) {
                double px = x, py = yq;
                for (std::size_t i = nsamp - 1; i > 0; --i) {
                    double t1 = tr.time(i), t0 = tr.time(i - 1), dt = t1 - t0;
                    double k1x, k1y, k2x, k2y;
                    pv->velocity(t1, px, py, k1x, k1y);
                    pv->velocity(t1 - 0.5 * dt, px - 0.5 * dt * k1x, py - 0.5 * dt * k1y,
                                 k2x, k2y);
                    px -= dt * k2x;
                    py -= dt * k2y;
                    path[i - 1] = {px, py};
                }
            }
            std::vector<double> integrand(nsamp);
            for (std::size_t i = 0; i < nsamp; ++i) {
                double v = -detail::bilinear(divu[i], g, path[i].first, path[i].second);
                if (forcing)
                    v += detail::bilinear(Hs[i], g, path[i].first, path[i].second);
                integrand[i] = v;
            }
            double acc = 0;
            for (std::size_t i = 0; i + 1 < nsamp; ++i)
                acc += 0.5 * (tr.time(i + 1) - tr.time(i)) * (integrand[i] + integrand[i + 1]);
            double rhs = hbar0 + detail::bilinear(h0_phys, g, path[0].first, path[0].second) + acc;
            double lhs = hbar0 + detail::bilinear(ht_phys, g, x, yq);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

}  // namespace swlab
