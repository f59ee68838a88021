#pragma once

// Bony decomposition fg = T_f g + T_g f + R(f,g), the T' variant, and the
// four-term commutator decomposition of the transport pairing.

#include <vector>

#include "swlab/field.hpp"
#include "swlab/partition.hpp"

namespace swlab {

struct BonyParts {
    SpectralField2D Tfg, Tgf, R;
    // mean channel: mean_f * g + mean_g * f - mean_f * mean_g
    SpectralField2D mean_terms;
};

namespace detail {

// physical samples of every block and every low-pass of f (means excluded)
struct BlockPhysical {
    std::vector<std::vector<double>> blocks;  // Delta_k f, k = k_min .. k_max
    std::vector<std::vector<double>> lows;    // S_{k_min .. k_max+1} f

    BlockPhysical(const SpectralField2D& f, const DyadicPartition& p) {
        SpectralField2D ft = f;
        ft.mean = 0.0;
        dealias_truncate(ft);
        for (int k = p.k_min(); k <= p.k_max(); ++k)
            blocks.push_back(inverse_transform(dyadic_block(ft, k, p)));
        for (int k = p.k_min(); k <= p.k_max() + 1; ++k)
            lows.push_back(inverse_transform(low_pass(ft, k, p)));
    }

    const std::vector<double>& block(int k, const DyadicPartition& p) const {
        return blocks[k - p.k_min()];
    }
    const std::vector<double>& low(int k, const DyadicPartition& p) const {
        return lows[std::clamp(k, p.k_min(), p.k_max() + 1) - p.k_min()];
    }
};

inline SpectralField2D physical_to_spectral_dealiased(const Grid2D& g,
                                                      const std::vector<double>& vals) {
    SpectralField2D out = forward_transform(g, vals);
    dealias_truncate(out);
    return out;
}

}  // namespace detail

// T_f g = sum_k S_{k-1} f Delta_k g (mean-free convention: S of a constant is 0)
inline SpectralField2D paraprod(const SpectralField2D& f, const SpectralField2D& g,
                                const DyadicPartition& p) {
    f.check_same_grid(g);
    detail::BlockPhysical bf(f, p), bg(g, p);
    std::vector<double> acc(f.grid.size(), 0.0);
    for (int k = p.k_min(); k <= p.k_max(); ++k) {
        const auto& lo = bf.low(k - 1, p);
        const auto& bl = bg.block(k, p);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += lo[i] * bl[i];
    }
    return detail::physical_to_spectral_dealiased(f.grid, acc);
}

// R(f,g) = sum_k sum_{|k'-k|<=1} Delta_k f Delta_{k'} g
inline SpectralField2D remainder(const SpectralField2D& f, const SpectralField2D& g,
                                 const DyadicPartition& p) {
    f.check_same_grid(g);
    detail::BlockPhysical bf(f, p), bg(g, p);
    std::vector<double> acc(f.grid.size(), 0.0);
    for (int k = p.k_min(); k <= p.k_max(); ++k)
        for (int kp = std::max(k - 1, p.k_min()); kp <= std::min(k + 1, p.k_max()); ++kp) {
            const auto& a = bf.block(k, p);
            const auto& b = bg.block(kp, p);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a[i] * b[i];
        }
    return detail::physical_to_spectral_dealiased(f.grid, acc);
}

// T'_f g = T_f g + R(f, g)
inline SpectralField2D tprime(const SpectralField2D& f, const SpectralField2D& g,
                              const DyadicPartition& p) {
    return paraprod(f, g, p) + remainder(f, g, p);
}

inline BonyParts bony_decompose(const SpectralField2D& f, const SpectralField2D& g,
                                const DyadicPartition& p) {
    BonyParts parts;
    parts.Tfg = paraprod(f, g, p);
    parts.Tgf = paraprod(g, f, p);
    parts.R = remainder(f, g, p);
    parts.mean_terms = f.mean * g + g.mean * f;
    parts.mean_terms.mean -= f.mean * g.mean;
    return parts;
}

struct CommutatorTerms {
    SpectralField2D F0, F1, F2, F3;
};

// The four pieces of A(D)Delta_k(v . grad h) against A(D)Delta_k h:
//   F0 = A(D)Delta_k(T'_{d_j h} v^j)
//   F1 = sum_{|k'-k|<=3} [A(D)Delta_k, S_{k'-1} v^j] Delta_{k'} d_j h
//   F2 = sum_{|k'-k|<=3} (S_{k'-1} - S_{k-1}) v^j A(D)Delta_k Delta_{k'} d_j h
//   F3 = -1/2 S_{k-1}(div v) A(D)Delta_k h
// Commutators are evaluated as the difference of the two operator orderings.
inline CommutatorTerms commutator_terms(const VectorField2D& v, const SpectralField2D& h,
                                        int k, const MultiplierSymbol& A,
                                        const DyadicPartition& p) {
    if (!(v.grid() == h.grid)) throw std::invalid_argument("commutator_terms: grid mismatch");
    p.check_range(k);
    const Grid2D& g = h.grid;
    CommutatorTerms out;

    SpectralField2D dh[2] = {derivative(h, 0), derivative(h, 1)};
    const SpectralField2D* vc[2] = {&v.u1, &v.u2};

    // F0
    out.F0 = SpectralField2D(g);
    for (int j = 0; j < 2; ++j)
        out.F0 += apply_multiplier(dyadic_block(tprime(dh[j], *vc[j], p), k, p), A);

    // F1, F2
    out.F1 = SpectralField2D(g);
    out.F2 = SpectralField2D(g);
    for (int kp = std::max(k - 3, p.k_min()); kp <= std::min(k + 3, p.k_max()); ++kp) {
        for (int j = 0; j < 2; ++j) {
            SpectralField2D sv = low_pass(*vc[j], kp - 1, p);
            SpectralField2D bdh = dyadic_block(dh[j], kp, p);
            // [A Delta_k, S v](.) = A Delta_k (S v . ) - S v . (A Delta_k .)
            SpectralField2D first = apply_multiplier(dyadic_block(dealias_product(sv, bdh), k, p), A);
            SpectralField2D second = dealias_product(sv, apply_multiplier(dyadic_block(bdh, k, p), A));
            out.F1 += first - second;

            SpectralField2D dsv = sv - low_pass(*vc[j], k - 1, p);
            out.F2 += dealias_product(dsv, apply_multiplier(dyadic_block(bdh, k, p), A));
        }
    }

    // F3
    SpectralField2D sdiv = low_pass(divergence(v), k - 1, p);
    out.F3 = -1.0 * dealias_product(sdiv, apply_multiplier(dyadic_block(h, k, p), A));
    out.F3 *= 0.5;
    return out;
}

}  // namespace swlab
