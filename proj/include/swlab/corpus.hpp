#pragma once

// Deterministic randomized field corpus. Fields are band-limited to the
// annulus on which the truncated partition telescopes exactly, with a
// per-block amplitude law 2^{-k * decay} and uniform phases.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "swlab/besov.hpp"
#include "swlab/field.hpp"
#include "swlab/partition.hpp"

namespace swlab {

struct CorpusSpec {
    std::uint64_t seed = 1;
    int count = 50;
    double decay = 1.0;  // per-block amplitude 2^{-k * decay}

    void validate() const {
        if (count < 1) throw std::invalid_argument("CorpusSpec: count >= 1 required");
    }
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace detail

// deterministic in (seed, index); Hermitian by construction
inline SpectralField2D random_field(const Grid2D& g, const DyadicPartition& p,
                                    const CorpusSpec& spec, std::uint64_t index,
                                    std::uint64_t salt = 0) {
    spec.validate();
    std::mt19937_64 rng(detail::mix64(spec.seed) ^ detail::mix64(index * 3 + salt + 17));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> amp(0.5, 1.0);
    SpectralField2D f(g);
    const int n = g.n;
    const double lo = p.unity_lo();
    const double hi = p.unity_hi();
    // iterate a fixed half-plane order, mirror for Hermitian symmetry
    for (int i = 0; i < n; ++i) {
        int wi = g.wavenumber(i);
        for (int j = 0; j < n; ++j) {
            int wj = g.wavenumber(j);
            if (wi < 0 || (wi == 0 && wj <= 0)) continue;  // half plane only
            double kx = wi * g.mode_spacing(), ky = wj * g.mode_spacing();
            double r = std::hypot(kx, ky);
            if (r < lo || r > hi) continue;
            double kdy = std::log2(r);
            double a = amp(rng) * std::pow(2.0, -kdy * spec.decay) / r;  // per-mode taper
            double ph = phase(rng);
            cplx c = a * cplx(std::cos(ph), std::sin(ph));
            f.at(i, j) = c;
            f.at((n - i) % n, (n - j) % n) = std::conj(c);
        }
    }
    // normalize to unit L2
    double nrm = l2_norm(f);
    if (nrm > 0) f *= 1.0 / nrm;
    return f;
}

inline VectorField2D random_vector_field(const Grid2D& g, const DyadicPartition& p,
                                         const CorpusSpec& spec, std::uint64_t index) {
    return {random_field(g, p, spec, index, 1000003), random_field(g, p, spec, index, 2000003)};
}

// single-block random field (used by block-bookkeeping oracles)
inline SpectralField2D random_block_field(const Grid2D& g, const DyadicPartition& p, int k,
                                          const CorpusSpec& spec, std::uint64_t index) {
    SpectralField2D f = random_field(g, p, spec, index, 5000011u + std::uint64_t(k - p.k_min()));
    return dyadic_block(f, k, p);
}

// Sampler for the inequality harness: the first indices are structured
// candidates (one per dyadic scale, then flat and steep spectra) that tend to
// realize the extreme ratios, so the running maximum saturates early and
// stays stable as the corpus grows. Remaining indices are generic fields.
inline SpectralField2D harness_field(const Grid2D& g, const DyadicPartition& p,
                                     const CorpusSpec& spec, std::uint64_t index,
                                     std::uint64_t salt = 0) {
    const std::uint64_t nb = std::uint64_t(p.blocks());
    if (index < nb) {
        SpectralField2D f =
            dyadic_block(random_field(g, p, spec, index, salt + 41u),
                         p.k_min() + int(index), p);
        double nrm = l2_norm(f);
        if (nrm > 0) f *= 1.0 / nrm;
        return f;
    }
    if (index < nb + 2) {
        CorpusSpec tilted = spec;
        tilted.decay = index == nb ? 0.0 : 2.0;
        return random_field(g, p, tilted, index, salt);
    }
    return random_field(g, p, spec, index, salt);
}

inline VectorField2D harness_vector_field(const Grid2D& g, const DyadicPartition& p,
                                          const CorpusSpec& spec, std::uint64_t index) {
    return {harness_field(g, p, spec, index, 1000003),
            harness_field(g, p, spec, index, 2000003)};
}

// synthetic smooth-in-time trajectory: h(t) = f1 cos(at) + f2 sin(at) (+ decay)
inline Trajectory random_trajectory(const Grid2D& g, const DyadicPartition& p,
                                    const CorpusSpec& spec, std::uint64_t index,
                                    double T, int samples) {
    std::mt19937_64 rng(detail::mix64(spec.seed ^ 0xABCDu) ^ detail::mix64(index));
    std::uniform_real_distribution<double> freq(0.5, 3.0);
    const double a = freq(rng), b = freq(rng), lam = freq(rng);
    SpectralField2D f1 = random_field(g, p, spec, index, 31);
    SpectralField2D f2 = random_field(g, p, spec, index, 32);
    VectorField2D v1 = random_vector_field(g, p, spec, index + 7000);
    VectorField2D v2 = random_vector_field(g, p, spec, index + 8000);
    Trajectory tr(g, p);
    for (int i = 0; i < samples; ++i) {
        double t = T * i / (samples - 1);
        double e = std::exp(-lam * t);
        SpectralField2D h = e * std::cos(a * t) * f1 + e * std::sin(a * t) * f2;
        VectorField2D u = e * std::cos(b * t) * v1 + e * std::sin(b * t) * v2;
        tr.append(t, std::move(h), std::move(u));
    }
    return tr;
}

// harness counterpart of random_trajectory (structured spatial profiles first)
inline Trajectory harness_trajectory(const Grid2D& g, const DyadicPartition& p,
                                     const CorpusSpec& spec, std::uint64_t index,
                                     double T, int samples, std::uint64_t salt = 0) {
    std::mt19937_64 rng(detail::mix64(spec.seed ^ 0xABCDu) ^
                        detail::mix64(index * 97 + salt));
    std::uniform_real_distribution<double> freq(0.5, 3.0);
    const double a = freq(rng), b = freq(rng), lam = freq(rng);
    SpectralField2D f1 = harness_field(g, p, spec, index, 31 + 1000 * salt);
    SpectralField2D f2 = harness_field(g, p, spec, index, 32 + 1000 * salt);
    VectorField2D v1{harness_field(g, p, spec, index, 33 + 1000 * salt),
                     harness_field(g, p, spec, index, 34 + 1000 * salt)};
    VectorField2D v2{harness_field(g, p, spec, index, 35 + 1000 * salt),
                     harness_field(g, p, spec, index, 36 + 1000 * salt)};
    Trajectory tr(g, p);
    for (int i = 0; i < samples; ++i) {
        double t = T * i / (samples - 1);
        double e = std::exp(-lam * t);
        SpectralField2D h = e * std::cos(a * t) * f1 + e * std::sin(a * t) * f2;
        VectorField2D u = e * std::cos(b * t) * v1 + e * std::sin(b * t) * v2;
        tr.append(t, std::move(h), std::move(u));
    }
    return tr;
}

}  // namespace swlab
