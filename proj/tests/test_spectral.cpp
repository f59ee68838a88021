#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "swlab/corpus.hpp"
#include "swlab/field.hpp"
#include "swlab/partition.hpp"

using namespace swlab;

namespace {

Grid2D small_grid() { return Grid2D(64, 2.0 * kPi); }

// f(x) = amp cos(k1 x1 + k2 x2 + phase), sampled
std::vector<double> cosine_samples(const Grid2D& g, int k1, int k2, double amp, double phase) {
    std::vector<double> v(g.size());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            double x = i * g.period / g.n, y = j * g.period / g.n;
            v[std::size_t(i) * g.n + j] = amp * std::cos(k1 * x + k2 * y + phase);
        }
    return v;
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_THROWS(Grid2D(48, 1.0));
    CHECK_THROWS(Grid2D(32, 1.0));
    CHECK_THROWS(Grid2D(64, -1.0));
    Grid2D g(128, 4.0);
    CHECK(g.mode_spacing() == Catch::Approx(2.0 * kPi / 4.0));
    CHECK(g.wavenumber(0) == 0);
    CHECK(g.wavenumber(64) == 64);
    CHECK(g.wavenumber(65) == -63);
    CHECK(g.wavenumber(127) == -1);
}

TEST_CASE("transform round trip") {
    Grid2D g = small_grid();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<double> v(g.size());
    for (auto& x : v) x = d(rng);
    SpectralField2D f = forward_transform(g, v);
    // kill Nyquist content that forward_transform zeroes by design
    auto w = inverse_transform(f);
    SpectralField2D f2 = forward_transform(g, w);
    auto w2 = inverse_transform(f2);
    double err = 0;
    for (std::size_t i = 0; i < w.size(); ++i) err = std::max(err, std::abs(w[i] - w2[i]));
    CHECK(err < 1e-12);
    CHECK(f.coef[0] == cplx(0.0));
}

TEST_CASE("single cosine lands on its two modes") {
    Grid2D g = small_grid();
    SpectralField2D f = forward_transform(g, cosine_samples(g, 3, -2, 2.0, 0.0));
    CHECK(std::abs(f.at(3, g.n - 2) - cplx(1.0)) < 1e-12);
    CHECK(std::abs(f.at(g.n - 3, 2) - cplx(1.0)) < 1e-12);
    double rest = 0;
    for (std::size_t i = 0; i < f.coef.size(); ++i) rest += std::norm(f.coef[i]);
    CHECK(rest == Catch::Approx(2.0).margin(1e-12));
    CHECK(f.mean == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("mean separated from coefficients") {
    Grid2D g = small_grid();
    std::vector<double> v(g.size(), 1.5);
    SpectralField2D f = forward_transform(g, v);
    CHECK(f.mean == Catch::Approx(1.5));
    CHECK(l2_norm(f) == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("parseval identity") {
    Grid2D g = small_grid();
    SpectralField2D f = forward_transform(g, cosine_samples(g, 5, 1, 3.0, 0.7));
    // ||amp cos||_2^2 = amp^2 L^2 / 2
    CHECK(l2_norm(f) == Catch::Approx(3.0 * g.period / std::sqrt(2.0)).epsilon(1e-12));
    // quadrature agrees
    CHECK(lp_norm(f, 2.0) == Catch::Approx(l2_norm(f)).epsilon(1e-12));
}

TEST_CASE("derivative of a cosine") {
    Grid2D g = small_grid();
    SpectralField2D f = forward_transform(g, cosine_samples(g, 3, 2, 1.0, 0.0));
    auto dv = inverse_transform(derivative(f, 0));
    for (int i = 0; i < g.n; i += 7)
        for (int j = 0; j < g.n; j += 7) {
            double x = i * g.period / g.n, y = j * g.period / g.n;
            CHECK(dv[std::size_t(i) * g.n + j] ==
                  Catch::Approx(-3.0 * std::sin(3 * x + 2 * y)).margin(1e-11));
        }
    // second derivative via two-axis form
    SpectralField2D dxx = derivative(f, 0, 0);
    CHECK(std::abs(dxx.at(3, 2) - cplx(-9.0) * f.at(3, 2)) < 1e-12);
}

TEST_CASE("multiplier application and homogeneity") {
    Grid2D g = small_grid();
    SpectralField2D f = forward_transform(g, cosine_samples(g, 4, 0, 1.0, 0.3));
    SpectralField2D m = apply_multiplier(f, MultiplierSymbol::modulus());
    CHECK(std::abs(m.at(4, 0) - 4.0 * f.at(4, 0)) < 1e-13);
    CHECK(MultiplierSymbol::modulus().homogeneity_defect(1.0, 2.0, 3.5) < 1e-14);
    CHECK(MultiplierSymbol::i_xi(1).homogeneity_defect(0.5, -1.0, 2.0) < 1e-14);
    // derivative symbol equals derivative()
    SpectralField2D a = apply_multiplier(f, MultiplierSymbol::i_xi(0));
    SpectralField2D b = derivative(f, 0);
    CHECK(l2_norm(a - b) < 1e-13);
}

TEST_CASE("dealiased product of two cosines is the exact convolution") {
    Grid2D g = small_grid();
    SpectralField2D f = forward_transform(g, cosine_samples(g, 3, 1, 1.0, 0.0));
    SpectralField2D h = forward_transform(g, cosine_samples(g, 2, -1, 1.0, 0.0));
    SpectralField2D prod = dealias_product(f, h);
    // cos A cos B = (cos(A+B) + cos(A-B))/2; here A-B has wavevector (1,2)
    CHECK(std::abs(prod.at(5, 0) - cplx(0.25)) < 1e-12);
    CHECK(std::abs(prod.at(1, 2) - cplx(0.25)) < 1e-12);
    CHECK(prod.mean == Catch::Approx(0.0).margin(1e-13));
    // product of a field with itself: mean = average of f^2
    SpectralField2D sq = dealias_product(f, f);
    CHECK(sq.mean == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("cutoff profile") {
    CHECK(chi_cutoff(0.0) == 1.0);
    CHECK(chi_cutoff(5.0 / 3.0) == 1.0);
    CHECK(chi_cutoff(12.0 / 5.0) == 0.0);
    CHECK(chi_cutoff(3.0) == 0.0);
    for (double r = 0.05; r < 3.0; r += 0.05)
        CHECK(chi_cutoff(r) >= chi_cutoff(r + 0.05) - 1e-15);
    // phi support is exactly [5/6, 12/5]
    CHECK(phi_bump(0.8) == 0.0);
    CHECK(phi_bump(5.0 / 6.0) == 0.0);
    CHECK(phi_bump(1.0) > 0.0);
    CHECK(phi_bump(2.0) > 0.0);
    CHECK(phi_bump(12.0 / 5.0) == 0.0);
    CHECK(phi_bump(2.5) == 0.0);
    // telescoping on the real line: sum over k of phi(2^-k r) = 1 for r > 0
    for (double r : {0.9, 1.3, 2.7, 5.0, 11.0}) {
        double s = 0;
        for (int k = -30; k <= 30; ++k) s += phi_bump(std::ldexp(r, -k));
        CHECK(s == Catch::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("partition construction limits") {
    Grid2D g = small_grid();
    CHECK_THROWS(DyadicPartition(g, 2, 1));
    CHECK_THROWS(DyadicPartition(g, -2, 4));  // 12/5 * 16 > nyquist 32? 38.4 > 32
    DyadicPartition p(g, -2, 3);
    CHECK(p.blocks() == 6);
    CHECK_THROWS(p.mask(4));
    CHECK_THROWS(p.mask(-3));
}

TEST_CASE("partition of unity on the resolvable annulus") {
    Grid2D g = small_grid();
    DyadicPartition p(g, -2, 3);
    const double lo = p.unity_lo(), hi = p.unity_hi();
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        double r = p.mode_radius(idx);
        if (r < lo || r > hi) continue;
        double s = 0;
        for (int k = p.k_min(); k <= p.k_max(); ++k) s += p.mask(k)[idx];
        REQUIRE(std::abs(s - 1.0) <= 1e-12);
    }
}

TEST_CASE("quasi-orthogonality of blocks") {
    Grid2D g = small_grid();
    DyadicPartition p(g, -2, 3);
    // mask product exactly zero for |j-k| >= 2
    for (int j = p.k_min(); j <= p.k_max(); ++j)
        for (int k = p.k_min(); k <= p.k_max(); ++k) {
            if (std::abs(j - k) < 2) continue;
            for (std::size_t idx = 0; idx < g.size(); ++idx)
                REQUIRE(p.mask(j)[idx] * p.mask(k)[idx] == 0.0);
        }
    // mask(j) * low_mask(k-1) * mask(k) vanishes for |j-k| >= 4
    for (int j = p.k_min(); j <= p.k_max(); ++j)
        for (int k = p.k_min(); k <= p.k_max(); ++k) {
            if (std::abs(j - k) < 4) continue;
            for (std::size_t idx = 0; idx < g.size(); ++idx)
                REQUIRE(p.mask(j)[idx] * p.low_mask(k - 1 < p.k_min() ? p.k_min() : k - 1)[idx] *
                            p.mask(k)[idx] ==
                        0.0);
        }
}

TEST_CASE("block projection bookkeeping") {
    Grid2D g = small_grid();
    DyadicPartition p(g, -2, 3);
    CorpusSpec spec{42, 4, 1.0};
    SpectralField2D f = random_field(g, p, spec, 0);
    // block_l2 agrees with the norm of the projected field
    for (int k = p.k_min(); k <= p.k_max(); ++k)
        CHECK(block_l2(f, k, p) == Catch::Approx(l2_norm(dyadic_block(f, k, p))).margin(1e-13));
    // blocks reassemble the field on the unity annulus (field is band-limited there)
    SpectralField2D sum(g);
    for (int k = p.k_min(); k <= p.k_max(); ++k) sum += dyadic_block(f, k, p);
    CHECK(l2_norm(sum - f) < 1e-12 * l2_norm(f));
    // low_pass telescopes: S_{k+1} - S_k = Delta_k
    for (int k = p.k_min(); k <= p.k_max(); ++k) {
        SpectralField2D d = low_pass(f, k + 1, p) - low_pass(f, k, p);
        CHECK(l2_norm(d - dyadic_block(f, k, p)) < 1e-13);
    }
    // grad block norm
    for (int k = p.k_min(); k <= p.k_max(); ++k) {
        VectorField2D gr = gradient(dyadic_block(f, k, p));
        CHECK(block_grad_l2(f, k, p) == Catch::Approx(l2_norm(gr)).margin(1e-12));
    }
}

TEST_CASE("bernstein ratios bounded") {
    Grid2D g = small_grid();
    DyadicPartition p(g, -2, 3);
    CorpusSpec spec{5, 4, 1.0};
    for (int k = -1; k <= 2; ++k) {
        SpectralField2D f = random_block_field(g, p, k, spec, 1);
        if (l2_norm(f) == 0.0) continue;
        // first-order L2 -> L2: constant is at most the band edge 12/5
        double r = bernstein_ratio(f, k, p, 2.0, 2.0, 1);
        CHECK(r > 0.0);
        CHECK(r <= 12.0 / 5.0 + 1e-12);
        // L2 -> Linf with the 2(1/p - 1/q) = 1 scaling stays bounded
        double ri = bernstein_ratio(f, k, p, 2.0, kInf, 0);
        CHECK(ri < 10.0);
    }
    SpectralField2D zero(g);
    CHECK_THROWS(bernstein_ratio(zero, 0, p, 2.0, 2.0, 1));
    SpectralField2D full = random_field(g, p, spec, 2);
    CHECK_THROWS(bernstein_ratio(full, 0, p, 2.0, 2.0, 1));
    CHECK_THROWS(bernstein_ratio(random_block_field(g, p, 0, spec, 1), 0, p, kInf, 2.0, 1));
}

TEST_CASE("vector calculus identities") {
    Grid2D g = small_grid();
    DyadicPartition p(g, -2, 3);
    CorpusSpec spec{11, 4, 1.0};
    SpectralField2D f = random_field(g, p, spec, 3);
    // div grad = laplacian
    CHECK(l2_norm(divergence(gradient(f)) - laplacian(f)) < 1e-10 * l2_norm(laplacian(f)));
    // lame operator on a gradient field: 2 laplacian
    VectorField2D gr = gradient(f);
    VectorField2D lg = lame_operator(gr);
    VectorField2D expect = gradient(laplacian(f)) * 2.0;
    CHECK(l2_norm(lg - expect) < 1e-10 * l2_norm(expect));
    // lame operator on a divergence-free field: laplacian / 2
    VectorField2D sol(derivative(f, 1), -1.0 * derivative(f, 0));
    VectorField2D ls = lame_operator(sol);
    VectorField2D expect2(0.5 * laplacian(sol.u1), 0.5 * laplacian(sol.u2));
    CHECK(l2_norm(ls - expect2) < 1e-10 * l2_norm(expect2));
    // deformation trace equals divergence
    DeformationField d = deformation(gr);
    CHECK(l2_norm(d.d11 + d.d22 - divergence(gr)) < 1e-11 * l2_norm(divergence(gr)));
}

TEST_CASE("random corpus determinism") {
    Grid2D g = small_grid();
    DyadicPartition p(g, -2, 3);
    CorpusSpec spec{99, 4, 1.0};
    SpectralField2D a = random_field(g, p, spec, 7);
    SpectralField2D b = random_field(g, p, spec, 7);
    REQUIRE(a.coef == b.coef);
    SpectralField2D c = random_field(g, p, spec, 8);
    CHECK(l2_norm(a - c) > 0.1);
    // Hermitian symmetry: physical samples are real by construction, check
    // conjugate pairing directly
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            cplx x = a.at(i, j);
            cplx y = a.at((g.n - i) % g.n, (g.n - j) % g.n);
            REQUIRE(std::abs(x - std::conj(y)) < 1e-15);
        }
    CHECK(l2_norm(a) == Catch::Approx(1.0).epsilon(1e-12));
}
