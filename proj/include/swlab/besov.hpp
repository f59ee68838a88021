#pragma once

// Norm functionals: homogeneous and hybrid-index Besov norms, mixed
// time-space norms, the e_k^r / omega_k weights, the weighted spaces E^s_T,
// and the regime-split per-block energies.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "swlab/field.hpp"
#include "swlab/partition.hpp"

namespace swlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct BesovSpec {
    double s = 0;   // regularity
    double p = 2;   // Lebesgue exponent in [1, inf]
    double r = 1;   // summation exponent in [1, inf]

    void validate() const {
        if (!std::isfinite(s)) throw std::invalid_argument("BesovSpec: s not finite");
        if (p < 1 || r < 1) throw std::invalid_argument("BesovSpec: p, r must be >= 1");
    }
};

struct HybridBesovSpec {
    double s = 0;      // low-frequency index (k <= 0)
    double sigma = 0;  // high-frequency index (k > 0)
};

struct WeightParams {
    double c = 0.125;  // decay constant
    double T = 0;      // horizon
    int k_max = 3;     // tail truncation of the omega sum

    void validate() const {
        if (!(c > 0)) throw std::invalid_argument("WeightParams: c must be positive");
        if (T < 0) throw std::invalid_argument("WeightParams: T must be >= 0");
    }
};

// e_k^r(t) = (1 - exp(-c r 2^{2k} t))^{1/r}
inline double weight_e(int k, double r, double t, double c) {
    if (t < 0) throw std::invalid_argument("weight_e: t must be >= 0");
    double x = -std::expm1(-c * r * std::ldexp(1.0, 2 * k) * t);
    return std::pow(x, 1.0 / r);
}

// omega_k(t) = sum_{k' >= k} 2^{-(k'-k)} (e^1_{k'}(t) + e^2_{k'}(t)), truncated
inline double weight_omega(int k, double t, const WeightParams& params) {
    params.validate();
    double s = 0;
    for (int kp = k; kp <= params.k_max; ++kp)
        s += std::ldexp(1.0, -(kp - k)) *
             (weight_e(kp, 1, t, params.c) + weight_e(kp, 2, t, params.c));
    return s;
}

// -------- static Besov norms --------

namespace detail {

inline double block_lp(const SpectralField2D& f, int k, const DyadicPartition& p, double pe) {
    if (pe == 2.0) return block_l2(f, k, p);
    return lp_norm(dyadic_block(f, k, p), pe);
}

inline double lr_accumulate(const std::vector<double>& terms, double r) {
    if (std::isinf(r)) {
        double m = 0;
        for (double t : terms) m = std::max(m, t);
        return m;
    }
    double s = 0;
    for (double t : terms) s += std::pow(t, r);
    return std::pow(s, 1.0 / r);
}

}  // namespace detail

// homogeneous Besov norm (ignores the mean)
inline double besov_norm(const SpectralField2D& f, const BesovSpec& spec,
                         const DyadicPartition& p) {
    spec.validate();
    std::vector<double> terms;
    terms.reserve(p.blocks());
    for (int k = p.k_min(); k <= p.k_max(); ++k)
        terms.push_back(std::pow(2.0, k * spec.s) * detail::block_lp(f, k, p, spec.p));
    return detail::lr_accumulate(terms, spec.r);
}

inline double besov_norm(const VectorField2D& v, const BesovSpec& spec,
                         const DyadicPartition& p) {
    spec.validate();
    std::vector<double> terms;
    for (int k = p.k_min(); k <= p.k_max(); ++k) {
        double b;
        if (spec.p == 2.0) {
            b = block_l2(v, k, p);
        } else {
            double a = detail::block_lp(v.u1, k, p, spec.p);
            double c = detail::block_lp(v.u2, k, p, spec.p);
            b = std::sqrt(a * a + c * c);
        }
        terms.push_back(std::pow(2.0, k * spec.s) * b);
    }
    return detail::lr_accumulate(terms, spec.r);
}

// hybrid-index norm: sum_{k<=0} 2^{ks} ||Delta_k f||_2 + sum_{k>0} 2^{k sigma} ||Delta_k f||_2
inline double hybrid_norm(const SpectralField2D& f, const HybridBesovSpec& spec,
                          const DyadicPartition& p) {
    double s = 0;
    for (int k = p.k_min(); k <= p.k_max(); ++k) {
        double e = k <= 0 ? spec.s : spec.sigma;
        s += std::pow(2.0, k * e) * block_l2(f, k, p);
    }
    return s;
}

// -------- trajectories --------

struct TrajectorySample {
    double t = 0;
    SpectralField2D h;
    VectorField2D u;
};

enum class Component { height, velocity };

// Time-sampled pair (h, u) with cached per-block L2 records. The same carrier
// holds forcing histories (H in the h slot, G in the u slot).
class Trajectory {
public:
    Trajectory(const Grid2D& g, const DyadicPartition& p) : grid_(g), part_(&p) {}

    void append(double t, SpectralField2D h, VectorField2D u) {
        if (!samples_.empty() && !(t > samples_.back().t))
            throw std::invalid_argument("Trajectory: times must be strictly increasing");
        if (!(h.grid == grid_) || !(u.grid() == grid_))
            throw std::invalid_argument("Trajectory: grid mismatch");
        TrajectorySample s{t, std::move(h), std::move(u)};
        const auto& p = *part_;
        std::vector<double> hb(p.blocks()), ub(p.blocks());
        for (int k = p.k_min(); k <= p.k_max(); ++k) {
            hb[k - p.k_min()] = block_l2(s.h, k, p);
            ub[k - p.k_min()] = block_l2(s.u, k, p);
        }
        h_blocks_.push_back(std::move(hb));
        u_blocks_.push_back(std::move(ub));
        samples_.push_back(std::move(s));
    }

    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const TrajectorySample& sample(std::size_t i) const { return samples_[i]; }
    const TrajectorySample& back() const { return samples_.back(); }
    double time(std::size_t i) const { return samples_[i].t; }
    double horizon() const { return samples_.empty() ? 0.0 : samples_.back().t; }
    const Grid2D& grid() const { return grid_; }
    const DyadicPartition& partition() const { return *part_; }

    double block_record(Component c, std::size_t i, int k) const {
        const auto& tab = (c == Component::height) ? h_blocks_ : u_blocks_;
        return tab[i][k - part_->k_min()];
    }

private:
    Grid2D grid_;
    const DyadicPartition* part_;
    std::vector<TrajectorySample> samples_;
    std::vector<std::vector<double>> h_blocks_, u_blocks_;
};

namespace detail {

// trapezoid rule of the rho-th power over sample instants, then ^(1/rho);
// rho = inf is the max over samples.
inline double time_lr(const Trajectory& tr, const std::vector<double>& vals, double rho) {
    if (std::isinf(rho)) {
        double m = 0;
        for (double v : vals) m = std::max(m, v);
        return m;
    }
    double s = 0;
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        double dt = tr.time(i + 1) - tr.time(i);
        s += 0.5 * dt * (std::pow(vals[i], rho) + std::pow(vals[i + 1], rho));
    }
    return std::pow(s, 1.0 / rho);
}

}  // namespace detail

// tilde-L^rho_T Besov norm: per-block time norm inside the l^r sum (p = 2)
inline double time_space_norm(const Trajectory& tr, double rho, const BesovSpec& spec,
                              Component comp = Component::height) {
    if (tr.empty()) throw std::invalid_argument("time_space_norm: empty trajectory");
    spec.validate();
    if (spec.p != 2.0)
        throw std::invalid_argument("time_space_norm: only p = 2 records are cached");
    const auto& p = tr.partition();
    std::vector<double> terms;
    for (int k = p.k_min(); k <= p.k_max(); ++k) {
        std::vector<double> vals(tr.size());
        for (std::size_t i = 0; i < tr.size(); ++i) vals[i] = tr.block_record(comp, i, k);
        terms.push_back(std::pow(2.0, k * spec.s) * detail::time_lr(tr, vals, rho));
    }
    return detail::lr_accumulate(terms, spec.r);
}

// plain L^rho_T(B^s) with the time norm outside the dyadic sum
inline double time_outside_norm(const Trajectory& tr, double rho, const BesovSpec& spec,
                                Component comp = Component::height) {
    if (tr.empty()) throw std::invalid_argument("time_outside_norm: empty trajectory");
    const auto& p = tr.partition();
    std::vector<double> vals(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        std::vector<double> terms;
        for (int k = p.k_min(); k <= p.k_max(); ++k)
            terms.push_back(std::pow(2.0, k * spec.s) * tr.block_record(comp, i, k));
        vals[i] = detail::lr_accumulate(terms, spec.r);
    }
    return detail::time_lr(tr, vals, rho);
}

// L^rho_T of the hybrid norm (time norm outside)
inline double time_hybrid_norm(const Trajectory& tr, double rho, const HybridBesovSpec& spec,
                               Component comp = Component::height) {
    if (tr.empty()) throw std::invalid_argument("time_hybrid_norm: empty trajectory");
    const auto& p = tr.partition();
    std::vector<double> vals(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        double s = 0;
        for (int k = p.k_min(); k <= p.k_max(); ++k) {
            double e = k <= 0 ? spec.s : spec.sigma;
            s += std::pow(2.0, k * e) * tr.block_record(comp, i, k);
        }
        vals[i] = s;
    }
    return detail::time_lr(tr, vals, rho);
}

// ||f||_{E^s_T} = sum_k 2^{ks} omega_k(T) ||Delta_k f||_{Linf_T(L2)}
inline double weighted_norm_E(const Trajectory& tr, double s, const WeightParams& params,
                              Component comp = Component::height) {
    if (tr.empty()) throw std::invalid_argument("weighted_norm_E: empty trajectory");
    const auto& p = tr.partition();
    const double T = tr.horizon();
    double acc = 0;
    for (int k = p.k_min(); k <= p.k_max(); ++k) {
        double sup = 0;
        for (std::size_t i = 0; i < tr.size(); ++i)
            sup = std::max(sup, tr.block_record(comp, i, k));
        acc += std::pow(2.0, k * s) * weight_omega(k, T, params) * sup;
    }
    return acc;
}

// hybrid split: k <= 0 carries s1, k >= 1 carries s2
inline double weighted_norm_E_hybrid(const Trajectory& tr, double s1, double s2,
                                     const WeightParams& params,
                                     Component comp = Component::height) {
    if (tr.empty()) throw std::invalid_argument("weighted_norm_E_hybrid: empty trajectory");
    const auto& p = tr.partition();
    const double T = tr.horizon();
    double acc = 0;
    for (int k = p.k_min(); k <= p.k_max(); ++k) {
        double sup = 0;
        for (std::size_t i = 0; i < tr.size(); ++i)
            sup = std::max(sup, tr.block_record(comp, i, k));
        acc += std::pow(2.0, k * (k <= 0 ? s1 : s2)) * weight_omega(k, T, params) * sup;
    }
    return acc;
}

// -------- per-block energies --------

enum class EnergyRegime { high, low };

struct BlockEnergy {
    int k = 0;
    double value = 0;
    EnergyRegime regime = EnergyRegime::high;
    // quadratic-form pieces, exposed for the equivalence checks
    double u_sq = 0, h_sq = 0, grad_h_sq = 0, cross = 0;
};

inline BlockEnergy block_energy(const SpectralField2D& h, const VectorField2D& u, int k,
                                const DyadicPartition& p) {
    if (!(h.grid == p.grid()) || !(u.grid() == p.grid()))
        throw std::invalid_argument("block_energy: grid mismatch");
    p.check_range(k);
    const auto& m = p.mask(k);
    const double L2 = h.grid.period * h.grid.period;
    double u_sq = 0, h_sq = 0, grad_h_sq = 0, cross = 0;
    for (std::size_t idx = 1; idx < h.coef.size(); ++idx) {
        if (m[idx] == 0.0) continue;
        const double w = m[idx] * m[idx];
        double kx, ky;
        h.wavevector(idx, kx, ky);
        const cplx hc = h.coef[idx];
        const cplx u1 = u.u1.coef[idx], u2 = u.u2.coef[idx];
        u_sq += w * (std::norm(u1) + std::norm(u2));
        h_sq += w * std::norm(hc);
        grad_h_sq += w * (kx * kx + ky * ky) * std::norm(hc);
        const cplx g1 = cplx(0.0, kx) * hc, g2 = cplx(0.0, ky) * hc;
        cross += w * ((std::conj(u1) * g1).real() + (std::conj(u2) * g2).real());
    }
    u_sq *= L2; h_sq *= L2; grad_h_sq *= L2; cross *= L2;

    BlockEnergy e;
    e.k = k;
    e.regime = k >= 1 ? EnergyRegime::high : EnergyRegime::low;
    e.u_sq = u_sq; e.h_sq = h_sq; e.grad_h_sq = grad_h_sq; e.cross = cross;
    double sq = (e.regime == EnergyRegime::high)
                    ? 0.5 * u_sq + grad_h_sq + cross
                    : 0.5 * u_sq + 0.5 * h_sq + 0.125 * cross;
    double scale = u_sq + h_sq + grad_h_sq;
    if (sq < -1e-12 * std::max(1.0, scale))
        throw std::runtime_error("block_energy: negative radicand (broken partition?)");
    e.value = std::sqrt(std::max(sq, 0.0));
    return e;
}

}  // namespace swlab
