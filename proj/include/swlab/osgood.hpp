#pragma once

// Osgood-type integral bound: given rho(t) <= a + int gamma(tau) mu(rho) dtau
// with mu continuous nondecreasing and mu(0) = 0, the comparison function
// solves M(rho_bar) = M(a) - int gamma, where M(x) = int_x^1 dtau / mu(tau).
// M is evaluated by geometric subdivision toward 0 with a per-cell Gauss rule
// (the integrand blows up at 0 in the interesting cases).

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace swlab {

struct OsgoodProblem {
    double a = 0;                                  // initial size, >= 0
    std::function<double(double)> gamma;           // integrable, >= 0
    std::function<double(double)> mu;              // nondecreasing, mu(0) = 0
    double t0 = 0, t1 = 1;                         // gamma's interval
    int cells = 200;                               // geometric cells for M
    int gauss = 8;                                 // nodes per cell

    void validate() const {
        if (a < 0) throw std::invalid_argument("OsgoodProblem: a >= 0 required");
        if (!gamma || !mu) throw std::invalid_argument("OsgoodProblem: gamma, mu required");
        if (!(t1 > t0)) throw std::invalid_argument("OsgoodProblem: t1 > t0 required");
        if (cells < 4 || gauss < 2) throw std::invalid_argument("OsgoodProblem: quadrature too coarse");
    }
};

struct OsgoodResult {
    double bound = 0;
    bool saturated = false;   // int gamma exhausted the quadrature range of M
    bool divergent_M = false; // M(a) numerically divergent (a at or near 0)
};

namespace detail {

// 8-point Gauss-Legendre nodes/weights on [-1, 1]
inline const double kGaussX[8] = {-0.9602898564975363, -0.7966664774136267,
                                  -0.5255324099163290, -0.1834346424956498,
                                  0.1834346424956498,  0.5255324099163290,
                                  0.7966664774136267,  0.9602898564975363};
inline const double kGaussW[8] = {0.1012285362903763, 0.2223810344533745,
                                  0.3137066458778873, 0.3626837833783620,
                                  0.3626837833783620, 0.3137066458778873,
                                  0.2223810344533745, 0.1012285362903763};

inline double gauss_cell(const std::function<double(double)>& f, double lo, double hi) {
    double s = 0;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < 8; ++i) s += kGaussW[i] * f(mid + half * kGaussX[i]);
    return half * s;
}

// M(x) = int_x^1 dtau / mu(tau); signed: negative for x > 1
inline double osgood_M(const OsgoodProblem& p, double x) {
    if (x <= 0) return std::numeric_limits<double>::infinity();
    auto inv_mu = [&](double t) {
        double m = p.mu(t);
        if (!(m > 0)) throw std::runtime_error("osgood_M: mu not positive on (0, 1]");
        return 1.0 / m;
    };
    if (x == 1.0) return 0.0;
    const double sgn = x < 1.0 ? 1.0 : -1.0;
    const double lo = std::min(x, 1.0), hi = std::max(x, 1.0);
    // geometric subdivision from hi toward lo
    const double ratio = std::pow(lo / hi, 1.0 / p.cells);
    double s = 0, right = hi;
    for (int i = 0; i < p.cells; ++i) {
        double left = right * ratio;
        if (i == p.cells - 1) left = lo;
        s += gauss_cell(inv_mu, left, right);
        right = left;
    }
    return sgn * s;
}

inline double integrate_gamma(const OsgoodProblem& p, double t) {
    auto g = [&](double tau) {
        double v = p.gamma(tau);
        if (v < 0) throw std::runtime_error("osgood: gamma must be nonnegative");
        return v;
    };
    const int cells = std::max(16, p.cells / 4);
    double s = 0;
    for (int i = 0; i < cells; ++i) {
        double lo = p.t0 + (t - p.t0) * i / cells;
        double hi = p.t0 + (t - p.t0) * (i + 1) / cells;
        s += gauss_cell(g, lo, hi);
    }
    return s;
}

}  // namespace detail

inline OsgoodResult osgood_bound(const OsgoodProblem& p, double t) {
    p.validate();
    if (t < p.t0 || t > p.t1) throw std::invalid_argument("osgood_bound: t outside [t0, t1]");
    OsgoodResult res;
    const double G = detail::integrate_gamma(p, t);
    if (p.a == 0) {
        // the a = 0 statement: if M diverges at 0, the bound is identically 0
        double probe = detail::osgood_M(p, 1e-16);
        res.divergent_M = !std::isfinite(probe) || probe > 1e12;
        res.bound = 0;
        if (!res.divergent_M) res.saturated = true;  // no conclusion from a = 0
        return res;
    }
    const double Ma = detail::osgood_M(p, p.a);
    const double target = Ma - G;  // M(bound) = target, M decreasing in x
    // bracket the root on a wide geometric range
    double lo = std::min(p.a, 1e-300), hi = 1.0;
    while (detail::osgood_M(p, hi) > target && hi < 1e12) hi *= 2.0;
    if (detail::osgood_M(p, hi) > target) {
        res.saturated = true;
        res.bound = hi;
        return res;
    }
    for (int it = 0; it < 200; ++it) {
        double mid = std::sqrt(lo * hi);  // geometric bisection (scales span decades)
        if (detail::osgood_M(p, mid) > target)
            lo = mid;
        else
            hi = mid;
        if (hi / lo < 1.0 + 1e-12) break;
    }
    res.bound = std::sqrt(lo * hi);
    return res;
}

}  // namespace swlab
