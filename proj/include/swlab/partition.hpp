#pragma once

// Littlewood-Paley apparatus: the smooth radial cutoff chi, the annular bump
// phi(xi) = chi(xi) - chi(2 xi) supported in 5/6 <= |xi| <= 12/5, cached
// per-block mask tables, dyadic projections and Bernstein probes.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "swlab/field.hpp"

namespace swlab {

inline constexpr double kChiInner = 5.0 / 3.0;
inline constexpr double kChiOuter = 12.0 / 5.0;
inline constexpr double kSuppLo = 5.0 / 6.0;   // lower edge of supp phi
inline constexpr double kSuppHi = 12.0 / 5.0;  // upper edge of supp phi

namespace detail {

inline double bump_g(double t) { return t > 0 ? std::exp(-1.0 / t) : 0.0; }

// smoothstep: 0 for t <= 0, 1 for t >= 1
inline double smoothstep(double t) {
    if (t <= 0) return 0.0;
    if (t >= 1) return 1.0;
    double a = bump_g(t), b = bump_g(1.0 - t);
    return a / (a + b);
}

}  // namespace detail

// mother cutoff: 1 on |xi| <= 5/3, 0 on |xi| >= 12/5
inline double chi_cutoff(double r) {
    return detail::smoothstep((kChiOuter - r) / (kChiOuter - kChiInner));
}

// annular bump, supported exactly in [5/6, 12/5]
inline double phi_bump(double r) { return chi_cutoff(r) - chi_cutoff(2.0 * r); }

class DyadicPartition {
public:
    DyadicPartition(const Grid2D& g, int k_min, int k_max)
        : grid_(g), k_min_(k_min), k_max_(k_max) {
        if (k_min > k_max) throw std::invalid_argument("DyadicPartition: k_min > k_max");
        if (!(kSuppHi * std::ldexp(1.0, k_max) < g.nyquist()))
            throw std::invalid_argument(
                "DyadicPartition: block range exceeds Nyquist frequency");
        const std::size_t sz = g.size();
        masks_.assign(std::size_t(k_max - k_min + 1), std::vector<double>(sz, 0.0));
        radius_.assign(sz, 0.0);
        for (std::size_t idx = 0; idx < sz; ++idx) {
            const int n = g.n;
            double kx = g.wavenumber(int(idx) / n) * g.mode_spacing();
            double ky = g.wavenumber(int(idx) % n) * g.mode_spacing();
            double r = std::hypot(kx, ky);
            radius_[idx] = r;
            if (r == 0.0) continue;
            for (int k = k_min; k <= k_max; ++k)
                masks_[k - k_min][idx] = phi_bump(std::ldexp(r, -k));
        }
        // cumulative low-pass masks: low_[m] = sum of blocks k_min .. k_min+m-1
        low_.assign(std::size_t(k_max - k_min + 2), std::vector<double>(sz, 0.0));
        for (int m = 1; m <= k_max - k_min + 1; ++m) {
            low_[m] = low_[m - 1];
            for (std::size_t idx = 0; idx < sz; ++idx)
                low_[m][idx] += masks_[m - 1][idx];
        }
    }

    const Grid2D& grid() const { return grid_; }
    int k_min() const { return k_min_; }
    int k_max() const { return k_max_; }
    int blocks() const { return k_max_ - k_min_ + 1; }

    const std::vector<double>& mask(int k) const {
        check_range(k);
        return masks_[k - k_min_];
    }
    // mask of S_k = sum_{j <= k-1} Delta_j, valid for k <= k_max+1
    const std::vector<double>& low_mask(int k) const {
        if (k < k_min_ || k > k_max_ + 1)
            throw std::invalid_argument("DyadicPartition: low-pass index out of range");
        return low_[k - k_min_];
    }
    double mode_radius(std::size_t idx) const { return radius_[idx]; }

    // annulus on which the truncated sum of masks telescopes exactly to 1
    double unity_lo() const { return 1.2 * std::ldexp(1.0, k_min_); }   // (12/5)/2 * 2^kmin
    double unity_hi() const { return kChiInner * std::ldexp(1.0, k_max_); }

    void check_range(int k) const {
        if (k < k_min_ || k > k_max_)
            throw std::invalid_argument("DyadicPartition: block index out of range");
    }

private:
    Grid2D grid_;
    int k_min_, k_max_;
    std::vector<std::vector<double>> masks_;
    std::vector<std::vector<double>> low_;
    std::vector<double> radius_;
};

inline DyadicPartition make_partition(const Grid2D& g, int k_min, int k_max) {
    return DyadicPartition(g, k_min, k_max);
}

namespace detail {

inline SpectralField2D apply_mask(const SpectralField2D& f, const std::vector<double>& m) {
    SpectralField2D out(f.grid);
    for (std::size_t i = 0; i < f.coef.size(); ++i)
        if (m[i] != 0.0) out.coef[i] = f.coef[i] * m[i];
    return out;
}

}  // namespace detail

inline SpectralField2D dyadic_block(const SpectralField2D& f, int k, const DyadicPartition& p) {
    p.check_range(k);
    if (!(f.grid == p.grid())) throw std::invalid_argument("dyadic_block: grid mismatch");
    return detail::apply_mask(f, p.mask(k));
}

inline VectorField2D dyadic_block(const VectorField2D& v, int k, const DyadicPartition& p) {
    return {dyadic_block(v.u1, k, p), dyadic_block(v.u2, k, p)};
}

// S_k f = sum_{j <= k-1} Delta_j f (mean excluded; truncated at k_min)
inline SpectralField2D low_pass(const SpectralField2D& f, int k, const DyadicPartition& p) {
    if (!(f.grid == p.grid())) throw std::invalid_argument("low_pass: grid mismatch");
    return detail::apply_mask(f, p.low_mask(std::max(k, p.k_min())));
}

// L2 norm of Delta_k f straight from the mask table (no FFT)
inline double block_l2(const SpectralField2D& f, int k, const DyadicPartition& p) {
    const auto& m = p.mask(k);
    double s = 0;
    for (std::size_t i = 0; i < f.coef.size(); ++i)
        if (m[i] != 0.0) s += std::norm(f.coef[i]) * m[i] * m[i];
    return f.grid.period * std::sqrt(s);
}

inline double block_l2(const VectorField2D& v, int k, const DyadicPartition& p) {
    double a = block_l2(v.u1, k, p), b = block_l2(v.u2, k, p);
    return std::sqrt(a * a + b * b);
}

// L2 norm of grad Delta_k f, straight from the coefficients
inline double block_grad_l2(const SpectralField2D& f, int k, const DyadicPartition& p) {
    const auto& m = p.mask(k);
    double s = 0;
    for (std::size_t i = 0; i < f.coef.size(); ++i)
        if (m[i] != 0.0) {
            double r = p.mode_radius(i);
            s += std::norm(f.coef[i]) * m[i] * m[i] * r * r;
        }
    return f.grid.period * std::sqrt(s);
}

inline bool is_band_limited_to_block(const SpectralField2D& f, int j, const DyadicPartition& p,
                                     double tol = 0.0) {
    if (f.mean != 0.0) return false;
    const double lo = kSuppLo * std::ldexp(1.0, j);
    const double hi = kSuppHi * std::ldexp(1.0, j);
    for (std::size_t i = 0; i < f.coef.size(); ++i) {
        double r = p.mode_radius(i);
        if ((r < lo || r > hi) && std::abs(f.coef[i]) > tol) return false;
    }
    return true;
}

// max over |gamma| = order of ||d^gamma f||_q / (2^{j(order + d(1/p - 1/q))} ||f||_p)
inline double bernstein_ratio(const SpectralField2D& f, int j, const DyadicPartition& part,
                              double p, double q, int order) {
    if (p > q) throw std::invalid_argument("bernstein_ratio: requires p <= q");
    if (!is_band_limited_to_block(f, j, part, 1e-14 * l2_norm(f)))
        throw std::invalid_argument("bernstein_ratio: field not band-limited to block j");
    const double fp = lp_norm(f, p);
    if (fp == 0.0) throw std::invalid_argument("bernstein_ratio: zero field");
    const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
    const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
    const double scale = std::pow(2.0, j * (order + 2.0 * (inv_p - inv_q)));
    double worst = 0;
    for (int a = 0; a <= order; ++a) {
        SpectralField2D d = f;
        for (int m = 0; m < a; ++m) d = derivative(d, 0);
        for (int m = 0; m < order - a; ++m) d = derivative(d, 1);
        worst = std::max(worst, lp_norm(d, q));
    }
    return worst / (scale * fp);
}

}  // namespace swlab
