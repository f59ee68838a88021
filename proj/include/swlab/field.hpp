#pragma once

// Torus grid, spectral fields, FFT plumbing, derivatives and multipliers.
// All fields are real-valued scalar functions on [0,L)^2 carried as complex
// Fourier coefficients with the zero mode (the mean) stored separately.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace swlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

struct Grid2D {
    int n = 0;          // points per axis, power of two, >= 64
    double period = 0;  // torus side length L

    Grid2D() = default;
    Grid2D(int n_points, double L) : n(n_points), period(L) {
        if (n < 64 || (n & (n - 1)) != 0)
            throw std::invalid_argument("Grid2D: n_points must be a power of two >= 64");
        if (!(L > 0)) throw std::invalid_argument("Grid2D: period must be positive");
    }

    double mode_spacing() const { return 2.0 * kPi / period; }
    double nyquist() const { return (n / 2) * mode_spacing(); }
    // integer wavenumber of axis index i, in [-n/2, n/2)
    int wavenumber(int i) const { return i <= n / 2 ? i : i - n; }
    std::size_t size() const { return std::size_t(n) * n; }

    bool operator==(const Grid2D&) const = default;
};

namespace detail {

// FFTW plans cached per grid size. Plans are created with FFTW_UNALIGNED so
// they can execute on any buffer; creation and lookup are mutex-guarded.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

inline PlanPair& plans_for(int n) {
    static std::mutex mu;
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<cplx> buf(std::size_t(n) * n);
    PlanPair p;
    p.fwd = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                             reinterpret_cast<fftw_complex*>(buf.data()),
                             FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p.inv = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                             reinterpret_cast<fftw_complex*>(buf.data()),
                             FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, p).first->second;
}

inline void fft_inplace(std::vector<cplx>& data, int n, bool forward) {
    auto& p = plans_for(n);
    fftw_execute_dft(forward ? p.fwd : p.inv,
                     reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
}

}  // namespace detail

// Real scalar field in spectral representation. coef[(i,j)] is the Fourier
// coefficient of wavenumber (wavenumber(i), wavenumber(j)); the (0,0) slot is
// kept at zero and the mean lives in `mean`.
struct SpectralField2D {
    Grid2D grid;
    std::vector<cplx> coef;
    double mean = 0.0;

    SpectralField2D() = default;
    explicit SpectralField2D(const Grid2D& g) : grid(g), coef(g.size(), cplx(0.0)) {}

    cplx& at(int i, int j) { return coef[std::size_t(i) * grid.n + j]; }
    const cplx& at(int i, int j) const { return coef[std::size_t(i) * grid.n + j]; }

    // wave vector of the flattened index
    void wavevector(std::size_t idx, double& kx, double& ky) const {
        const int n = grid.n;
        const double d = grid.mode_spacing();
        kx = grid.wavenumber(int(idx) / n) * d;
        ky = grid.wavenumber(int(idx) % n) * d;
    }

    SpectralField2D& operator+=(const SpectralField2D& o) {
        check_same_grid(o);
        for (std::size_t i = 0; i < coef.size(); ++i) coef[i] += o.coef[i];
        mean += o.mean;
        return *this;
    }
    SpectralField2D& operator-=(const SpectralField2D& o) {
        check_same_grid(o);
        for (std::size_t i = 0; i < coef.size(); ++i) coef[i] -= o.coef[i];
        mean -= o.mean;
        return *this;
    }
    SpectralField2D& operator*=(double a) {
        for (auto& c : coef) c *= a;
        mean *= a;
        return *this;
    }

    friend SpectralField2D operator+(SpectralField2D a, const SpectralField2D& b) { return a += b; }
    friend SpectralField2D operator-(SpectralField2D a, const SpectralField2D& b) { return a -= b; }
    friend SpectralField2D operator*(SpectralField2D a, double s) { return a *= s; }
    friend SpectralField2D operator*(double s, SpectralField2D a) { return a *= s; }

    void check_same_grid(const SpectralField2D& o) const {
        if (!(grid == o.grid)) throw std::invalid_argument("field grid mismatch");
    }

    bool finite() const {
        if (!std::isfinite(mean)) return false;
        for (const auto& c : coef)
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
        return true;
    }
};

struct VectorField2D {
    SpectralField2D u1, u2;

    VectorField2D() = default;
    explicit VectorField2D(const Grid2D& g) : u1(g), u2(g) {}
    VectorField2D(SpectralField2D a, SpectralField2D b) : u1(std::move(a)), u2(std::move(b)) {
        u1.check_same_grid(u2);
    }

    const Grid2D& grid() const { return u1.grid; }

    VectorField2D& operator+=(const VectorField2D& o) { u1 += o.u1; u2 += o.u2; return *this; }
    VectorField2D& operator-=(const VectorField2D& o) { u1 -= o.u1; u2 -= o.u2; return *this; }
    VectorField2D& operator*=(double a) { u1 *= a; u2 *= a; return *this; }
    friend VectorField2D operator+(VectorField2D a, const VectorField2D& b) { return a += b; }
    friend VectorField2D operator-(VectorField2D a, const VectorField2D& b) { return a -= b; }
    friend VectorField2D operator*(VectorField2D a, double s) { return a *= s; }
    friend VectorField2D operator*(double s, VectorField2D a) { return a *= s; }

    bool finite() const { return u1.finite() && u2.finite(); }
};

// -------- transforms --------

// samples is row-major n*n, sample (i,j) at x = (i,j)*L/n
inline SpectralField2D forward_transform(const Grid2D& g, const std::vector<double>& samples) {
    if (samples.size() != g.size())
        throw std::invalid_argument("forward_transform: sample array dimension mismatch");
    std::vector<cplx> buf(samples.begin(), samples.end());
    detail::fft_inplace(buf, g.n, true);
    const double scale = 1.0 / double(g.size());
    SpectralField2D f(g);
    for (std::size_t i = 0; i < buf.size(); ++i) f.coef[i] = buf[i] * scale;
    f.mean = f.coef[0].real();
    f.coef[0] = 0.0;
    // zero the unpaired Nyquist lines so Hermitian symmetry is exact
    const int n = g.n;
    for (int j = 0; j < n; ++j) f.at(n / 2, j) = 0.0;
    for (int i = 0; i < n; ++i) f.at(i, n / 2) = 0.0;
    return f;
}

inline std::vector<double> inverse_transform(const SpectralField2D& f) {
    std::vector<cplx> buf = f.coef;
    buf[0] = f.mean;
    detail::fft_inplace(buf, f.grid.n, false);
    std::vector<double> out(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
    return out;
}

// -------- norms and pairings --------

// L2 norm of the mean-free part (Parseval; homogeneous convention)
inline double l2_norm(const SpectralField2D& f) {
    double s = 0;
    for (const auto& c : f.coef) s += std::norm(c);
    return f.grid.period * std::sqrt(s);
}

inline double l2_norm(const VectorField2D& v) {
    double a = l2_norm(v.u1), b = l2_norm(v.u2);
    return std::sqrt(a * a + b * b);
}

// L2 inner product of mean-free parts
inline double l2_inner(const SpectralField2D& f, const SpectralField2D& g) {
    f.check_same_grid(g);
    double s = 0;
    for (std::size_t i = 0; i < f.coef.size(); ++i)
        s += (std::conj(f.coef[i]) * g.coef[i]).real();
    return f.grid.period * f.grid.period * s;
}

inline double l2_inner(const VectorField2D& v, const VectorField2D& w) {
    return l2_inner(v.u1, w.u1) + l2_inner(v.u2, w.u2);
}

// Lp norm (mean included) by rectangle-rule quadrature; p = inf via grid max.
inline double lp_norm(const SpectralField2D& f, double p) {
    auto vals = inverse_transform(f);
    if (std::isinf(p)) {
        double m = 0;
        for (double v : vals) m = std::max(m, std::abs(v));
        return m;
    }
    if (p == 2.0) {
        double s = std::sqrt(std::norm(cplx(f.mean)));
        double h = l2_norm(f);
        return std::sqrt(h * h + f.grid.period * f.grid.period * s * s);
    }
    const double cell = (f.grid.period / f.grid.n) * (f.grid.period / f.grid.n);
    double s = 0;
    for (double v : vals) s += std::pow(std::abs(v), p);
    return std::pow(cell * s, 1.0 / p);
}

inline double linf_norm(const VectorField2D& v) {
    auto a = inverse_transform(v.u1);
    auto b = inverse_transform(v.u2);
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::hypot(a[i], b[i]));
    return m;
}

// -------- multipliers and derivatives --------

struct MultiplierSymbol {
    double degree = 0;
    std::function<cplx(double, double)> eval;  // A(kx, ky), kx^2+ky^2 > 0

    static MultiplierSymbol identity() {
        return {0.0, [](double, double) { return cplx(1.0); }};
    }
    static MultiplierSymbol modulus() {
        return {1.0, [](double kx, double ky) { return cplx(std::hypot(kx, ky)); }};
    }
    static MultiplierSymbol i_xi(int axis) {
        return {1.0, [axis](double kx, double ky) { return cplx(0.0, axis == 0 ? kx : ky); }};
    }

    // relative homogeneity defect |A(l xi) - l^m A(xi)| / |l^m A(xi)| on sampled rays
    double homogeneity_defect(double kx, double ky, double lambda) const {
        cplx a = eval(lambda * kx, lambda * ky);
        cplx b = std::pow(lambda, degree) * eval(kx, ky);
        double den = std::abs(b);
        return den > 0 ? std::abs(a - b) / den : std::abs(a - b);
    }
};

// Convention: the output mean is zero (homogeneous symbols are undefined at 0).
inline SpectralField2D apply_multiplier(const SpectralField2D& f, const MultiplierSymbol& A) {
    SpectralField2D out(f.grid);
    for (std::size_t idx = 0; idx < f.coef.size(); ++idx) {
        if (idx == 0 || f.coef[idx] == cplx(0.0)) continue;
        double kx, ky;
        f.wavevector(idx, kx, ky);
        cplx a = A.eval(kx, ky);
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw std::runtime_error("apply_multiplier: symbol non-finite at a needed mode");
        out.coef[idx] = f.coef[idx] * a;
    }
    return out;
}

inline SpectralField2D derivative(const SpectralField2D& f, int ax1, int ax2 = -1) {
    SpectralField2D out(f.grid);
    for (std::size_t idx = 1; idx < f.coef.size(); ++idx) {
        if (f.coef[idx] == cplx(0.0)) continue;
        double k[2];
        f.wavevector(idx, k[0], k[1]);
        cplx m = cplx(0.0, k[ax1]);
        if (ax2 >= 0) m *= cplx(0.0, k[ax2]);
        out.coef[idx] = f.coef[idx] * m;
    }
    return out;
}

inline VectorField2D gradient(const SpectralField2D& f) {
    return {derivative(f, 0), derivative(f, 1)};
}

inline SpectralField2D divergence(const VectorField2D& v) {
    return derivative(v.u1, 0) + derivative(v.u2, 1);
}

inline SpectralField2D laplacian(const SpectralField2D& f) {
    return derivative(f, 0, 0) + derivative(f, 1, 1);
}

// symmetric deformation tensor D(u) = (grad u + grad u^t)/2: {d11, d12, d22}
struct DeformationField {
    SpectralField2D d11, d12, d22;
};

inline DeformationField deformation(const VectorField2D& v) {
    DeformationField d;
    d.d11 = derivative(v.u1, 0);
    d.d22 = derivative(v.u2, 1);
    d.d12 = 0.5 * (derivative(v.u1, 1) + derivative(v.u2, 0));
    return d;
}

// Lame-type viscosity operator div D(u) + grad div u
inline VectorField2D lame_operator(const VectorField2D& v) {
    SpectralField2D dv = divergence(v);
    VectorField2D out(v.grid());
    out.u1 = 0.5 * laplacian(v.u1) + 1.5 * derivative(dv, 0);
    out.u2 = 0.5 * laplacian(v.u2) + 1.5 * derivative(dv, 1);
    return out;
}

// -------- dealiased products --------

namespace detail {

// zero all modes with max(|n1|,|n2|) > n/3 (the 2/3 rule)
inline void dealias_truncate(SpectralField2D& f) {
    const int n = f.grid.n;
    const int cut = n / 3;
    for (int i = 0; i < n; ++i) {
        int wi = std::abs(f.grid.wavenumber(i));
        for (int j = 0; j < n; ++j) {
            int wj = std::abs(f.grid.wavenumber(j));
            if (wi > cut || wj > cut) f.at(i, j) = 0.0;
        }
    }
}

}  // namespace detail

// pointwise product computed on the physical grid with 2/3-rule truncation on
// both input and output; the product's zero mode lands in `mean`.
inline SpectralField2D dealias_product(const SpectralField2D& f, const SpectralField2D& g) {
    f.check_same_grid(g);
    SpectralField2D ft = f, gt = g;
    detail::dealias_truncate(ft);
    detail::dealias_truncate(gt);
    auto a = inverse_transform(ft);
    auto b = inverse_transform(gt);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    SpectralField2D out = forward_transform(f.grid, a);
    detail::dealias_truncate(out);
    return out;
}

// v . grad f, dealiased
inline SpectralField2D advect(const VectorField2D& v, const SpectralField2D& f) {
    return dealias_product(v.u1, derivative(f, 0)) + dealias_product(v.u2, derivative(f, 1));
}

inline VectorField2D advect(const VectorField2D& v, const VectorField2D& w) {
    return {advect(v, w.u1), advect(v, w.u2)};
}

}  // namespace swlab
