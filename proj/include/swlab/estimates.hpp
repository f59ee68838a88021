#pragma once

// Property-based verification harness: randomized corpora, empirical-constant
// reports for the product / composition / commutator / interpolation bounds,
// the weighted product bounds on trajectories, and the twin-run divergence
// experiment with its Osgood comparison.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swlab/besov.hpp"
#include "swlab/corpus.hpp"
#include "swlab/field.hpp"
#include "swlab/iteration.hpp"
#include "swlab/osgood.hpp"
#include "swlab/paraproduct.hpp"
#include "swlab/partition.hpp"

namespace swlab {

struct EstimateReport {
    std::string id;
    std::uint64_t seed = 0;
    std::vector<double> ratios;  // per accepted sample, constant-free LHS/RHS
    int skipped = 0;
    double max_ratio = 0;
    double max_ratio_half = 0;  // max over the first half of the corpus
    std::string verdict;        // bounded | unbounded-trend | inconclusive

    void add(double lhs, double rhs) {
        if (!(rhs > 0) || !std::isfinite(lhs / rhs)) {
            ++skipped;
            return;
        }
        ratios.push_back(lhs / rhs);
    }

    void finalize(double drift_tol = 0.10) {
        if (ratios.empty()) {
            verdict = "inconclusive";
            return;
        }
        max_ratio = 0;
        max_ratio_half = 0;
        const std::size_t half = (ratios.size() + 1) / 2;
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            max_ratio = std::max(max_ratio, ratios[i]);
            if (i < half) max_ratio_half = std::max(max_ratio_half, ratios[i]);
        }
        verdict = max_ratio <= max_ratio_half * (1.0 + drift_tol) + 1e-12
                      ? "bounded"
                      : "unbounded-trend";
    }
};

// stability comparison across two independent harness runs (e.g. resolutions)
inline bool ratio_stable(double smaller, double larger, double drift_tol = 0.10) {
    return larger <= smaller * (1.0 + drift_tol) + 1e-12;
}

namespace detail {

inline SpectralField2D pointwise_map(const SpectralField2D& f,
                                     const std::function<double(double)>& F) {
    SpectralField2D t = f;
    dealias_truncate(t);
    auto vals = inverse_transform(t);
    for (auto& v : vals) v = F(v);
    SpectralField2D out = forward_transform(f.grid, vals);
    dealias_truncate(out);
    return out;
}

// trajectory whose height slot is the dealiased product of two height slots
inline Trajectory product_trajectory(const Trajectory& a, const Trajectory& b,
                                     const DyadicPartition& p) {
    Trajectory out(a.grid(), p);
    for (std::size_t i = 0; i < a.size(); ++i)
        out.append(a.time(i), dealias_product(a.sample(i).h, b.sample(i).h),
                   VectorField2D(a.grid()));
    return out;
}

inline Trajectory map_trajectory(const Trajectory& a, const DyadicPartition& p,
                                 const std::function<double(double)>& F) {
    Trajectory out(a.grid(), p);
    for (std::size_t i = 0; i < a.size(); ++i)
        out.append(a.time(i), pointwise_map(a.sample(i).h, F), VectorField2D(a.grid()));
    return out;
}

}  // namespace detail

// -------- static product bounds --------

inline std::vector<EstimateReport> verify_product_estimates(const Grid2D& g,
                                                            const DyadicPartition& p,
                                                            const CorpusSpec& spec) {
    spec.validate();
    std::vector<EstimateReport> reports;
    const BesovSpec b1{1, 2, 1};

    EstimateReport r_infty{"product-sym-linf", spec.seed};
    EstimateReport r_sum{"product-index-sum", spec.seed};
    EstimateReport r_algebra{"product-critical-algebra", spec.seed};
    EstimateReport r_dual{"product-negative-index", spec.seed};
    for (int i = 0; i < spec.count; ++i) {
        SpectralField2D f = harness_field(g, p, spec, std::uint64_t(i), 100);
        SpectralField2D h = harness_field(g, p, spec, std::uint64_t(i), 200);
        SpectralField2D fh = dealias_product(f, h);
        // ||fg||_{B^s} <= C(||f||_inf ||g||_{B^s} + ||g||_inf ||f||_{B^s})
        for (double s : {0.5, 1.0})
            r_infty.add(besov_norm(fh, {s, 2, 1}, p),
                        lp_norm(f, kInf) * besov_norm(h, {s, 2, 1}, p) +
                            lp_norm(h, kInf) * besov_norm(f, {s, 2, 1}, p));
        // ||fg||_{B^{s1+s2-1}} <= C ||f||_{B^{s1}} ||g||_{B^{s2}}
        for (auto [s1, s2] : std::vector<std::pair<double, double>>{
                 {1.0, 1.0}, {0.5, 1.0}, {0.5, 0.5}})
            r_sum.add(besov_norm(fh, {s1 + s2 - 1.0, 2, 1}, p),
                      besov_norm(f, {s1, 2, 1}, p) * besov_norm(h, {s2, 2, 1}, p));
        // ||fg||_{B^s_{2,r}} <= C ||f||_{B^s_{2,r}} ||g||_{B^1}
        for (double s : {-0.5, 0.0, 0.5})
            for (double r : {1.0, 2.0, kInf})
                r_algebra.add(besov_norm(fh, {s, 2, r}, p),
                              besov_norm(f, {s, 2, r}, p) * besov_norm(h, b1, p));
        // ||fg||_{B^{-1}_{2,inf}} <= C ||f||_{B^s} ||g||_{B^{-s}_{2,inf}}
        for (double s : {0.5, 1.0})
            r_dual.add(besov_norm(fh, {-1, 2, kInf}, p),
                       besov_norm(f, {s, 2, 1}, p) * besov_norm(h, {-s, 2, kInf}, p));
    }
    reports.push_back(std::move(r_infty));
    reports.push_back(std::move(r_sum));
    reports.push_back(std::move(r_algebra));
    reports.push_back(std::move(r_dual));

    // time-space variant on short synthetic trajectories
    EstimateReport r_time{"product-time-space", spec.seed};
    const int tcount = std::max(2, spec.count / 4);
    for (int i = 0; i < tcount; ++i) {
        Trajectory a = harness_trajectory(g, p, spec, std::uint64_t(i), 0.5, 6, 0);
        Trajectory b = harness_trajectory(g, p, spec, std::uint64_t(i), 0.5, 6, 1);
        Trajectory fg = detail::product_trajectory(a, b, p);
        for (double s : {0.5, 1.0})
            r_time.add(time_space_norm(fg, 1, {-1, 2, kInf}),
                       time_space_norm(a, 2, {s, 2, 1}) *
                           time_space_norm(b, 2, {-s, 2, kInf}));
    }
    reports.push_back(std::move(r_time));
    for (auto& r : reports) r.finalize();
    return reports;
}

// -------- composition bounds --------

struct CompositionMap {
    std::string name;
    std::function<double(double)> F;
    bool needs_guard = false;  // skip samples approaching the pole at -1
    bool zero_slope = false;   // F'(0) = 0 (admissible for the difference form)
};

inline std::vector<CompositionMap> builtin_composition_maps() {
    return {
        {"square", [](double z) { return z * z; }, false, true},
        {"mobius", [](double z) { return z / (1.0 + z); }, true, false},
        {"sine", [](double z) { return std::sin(z); }, false, false},
        {"haversine", [](double z) { return 1.0 - std::cos(z); }, false, true},
    };
}

inline std::vector<EstimateReport> verify_composition(const Grid2D& g,
                                                      const DyadicPartition& p,
                                                      const CorpusSpec& spec) {
    spec.validate();
    std::vector<EstimateReport> reports;
    auto maps = builtin_composition_maps();

    for (const auto& m : maps) {
        EstimateReport rc{"composition-" + m.name, spec.seed};
        EstimateReport rw{"composition-weak-" + m.name, spec.seed};
        for (int i = 0; i < spec.count; ++i) {
            SpectralField2D u = harness_field(g, p, spec, std::uint64_t(i), 300);
            if (m.needs_guard && lp_norm(u, kInf) > 0.5) {
                ++rc.skipped;
                continue;
            }
            double amp = lp_norm(u, kInf);
            SpectralField2D Fu = detail::pointwise_map(u, m.F);
            for (double s : {0.5, 1.0, 1.5}) {
                double grow = std::pow(1.0 + amp, std::floor(s) + 1);
                rc.add(besov_norm(Fu, {s, 2, 1}, p), grow * besov_norm(u, {s, 2, 1}, p));
                rw.add(besov_norm(Fu, {s, 2, kInf}, p),
                       grow * besov_norm(u, {s, 2, kInf}, p));
            }
        }
        rc.finalize();
        rw.finalize();
        reports.push_back(std::move(rc));
        reports.push_back(std::move(rw));
    }

    // difference forms, maps with G'(0) = 0
    for (const auto& m : maps) {
        if (!m.zero_slope) continue;
        EstimateReport rd{"composition-diff-" + m.name, spec.seed};
        EstimateReport rdw{"composition-diff-weak-" + m.name, spec.seed};
        for (int i = 0; i < spec.count; ++i) {
            SpectralField2D u = harness_field(g, p, spec, std::uint64_t(i), 300);
            SpectralField2D v = harness_field(g, p, spec, std::uint64_t(i), 400);
            SpectralField2D Gu = detail::pointwise_map(u, m.F);
            SpectralField2D Gv = detail::pointwise_map(v, m.F);
            SpectralField2D diff = Gu - Gv;
            double sum1 = besov_norm(u, {1, 2, 1}, p) + besov_norm(v, {1, 2, 1}, p);
            for (double s : {0.5, 1.0})
                rd.add(besov_norm(diff, {s, 2, 1}, p),
                       sum1 * besov_norm(u - v, {s, 2, 1}, p));
            for (double s : {0.0, 0.5})
                rdw.add(besov_norm(diff, {s, 2, kInf}, p),
                        sum1 * besov_norm(u - v, {s, 2, kInf}, p));
        }
        rd.finalize();
        rdw.finalize();
        reports.push_back(std::move(rd));
        reports.push_back(std::move(rdw));
    }

    // weighted form on trajectories: ||F(f)||_{E^s} vs (1+sup|f|)^{[s]+2} ||f||_{E^s}
    {
        EstimateReport rE{"composition-weighted", spec.seed};
        const int tcount = std::max(2, spec.count / 4);
        for (int i = 0; i < tcount; ++i) {
            Trajectory a = harness_trajectory(g, p, spec, std::uint64_t(i), 0.5, 6, 2);
            double amp = 0;
            for (std::size_t j = 0; j < a.size(); ++j)
                amp = std::max(amp, lp_norm(a.sample(j).h, kInf));
            for (const auto& m : builtin_composition_maps()) {
                if (m.needs_guard && amp > 0.5) {
                    ++rE.skipped;
                    continue;
                }
                Trajectory Fa = detail::map_trajectory(a, p, m.F);
                const double s = 1.0;
                WeightParams w{0.125, a.horizon(), p.k_max()};
                rE.add(weighted_norm_E(Fa, s, w),
                       std::pow(1.0 + amp, std::floor(s) + 2) * weighted_norm_E(a, s, w));
            }
        }
        rE.finalize();
        reports.push_back(std::move(rE));
    }
    return reports;
}

// -------- transport pairing bounds --------

inline std::vector<EstimateReport> verify_commutator_estimates(const Grid2D& g,
                                                               const DyadicPartition& p,
                                                               const CorpusSpec& spec) {
    spec.validate();
    std::vector<EstimateReport> reports;
    struct Sym {
        MultiplierSymbol A;
        double m;
        std::string tag;
    };
    const std::vector<Sym> syms = {{MultiplierSymbol::identity(), 0, "id"},
                                   {MultiplierSymbol::modulus(), 1, "mod"},
                                   {MultiplierSymbol::i_xi(0), 1, "ixi"}};
    const double s1 = 0, s2 = 1;  // hybrid indices of f
    const BesovSpec vnorm{2, 2, 1};

    // single-field pairing: alpha_k extraction and its sum
    for (const auto& sym : syms) {
        EstimateReport rp{"transport-pairing-" + sym.tag, spec.seed};
        for (int i = 0; i < spec.count; ++i) {
            VectorField2D v = harness_vector_field(g, p, spec, std::uint64_t(i));
            SpectralField2D f = harness_field(g, p, spec, std::uint64_t(i), 700);
            SpectralField2D vf = advect(v, f);
            double vn = besov_norm(v, vnorm, p);
            double fn = hybrid_norm(f, {s1, s2}, p);
            double alpha_sum = 0;
            bool ok = vn > 0 && fn > 0;
            for (int k = p.k_min(); k <= p.k_max() && ok; ++k) {
                SpectralField2D Af = apply_multiplier(dyadic_block(f, k, p), sym.A);
                double afn = l2_norm(Af);
                if (afn == 0) continue;
                double pairing =
                    std::abs(l2_inner(apply_multiplier(dyadic_block(vf, k, p), sym.A), Af));
                double scale = k >= 1 ? std::pow(2.0, k * (s2 - sym.m))
                                      : std::pow(2.0, k * (s1 - sym.m));
                alpha_sum += pairing * scale / (vn * fn * afn);
            }
            if (ok)
                rp.add(alpha_sum, 1.0);
            else
                ++rp.skipped;
        }
        rp.finalize();
        reports.push_back(std::move(rp));
    }

    // cross pairing with a second field g
    for (const auto& sym : syms) {
        EstimateReport rx{"transport-cross-pairing-" + sym.tag, spec.seed};
        const double t1 = 0, t2 = 1;
        for (int i = 0; i < spec.count; ++i) {
            VectorField2D v = harness_vector_field(g, p, spec, std::uint64_t(i));
            SpectralField2D f = harness_field(g, p, spec, std::uint64_t(i), 900);
            SpectralField2D q = harness_field(g, p, spec, std::uint64_t(i), 950);
            SpectralField2D vf = advect(v, f);
            SpectralField2D vq = advect(v, q);
            double vn = besov_norm(v, vnorm, p);
            double fn = hybrid_norm(f, {s1, s2}, p);
            double qn = hybrid_norm(q, {t1, t2}, p);
            if (!(vn > 0 && fn > 0 && qn > 0)) {
                ++rx.skipped;
                continue;
            }
            double alpha_sum = 0;
            for (int k = p.k_min(); k <= p.k_max(); ++k) {
                SpectralField2D Af = apply_multiplier(dyadic_block(f, k, p), sym.A);
                SpectralField2D qk = dyadic_block(q, k, p);
                double afn = l2_norm(Af), qkn = l2_norm(qk);
                double pairing =
                    std::abs(l2_inner(apply_multiplier(dyadic_block(vf, k, p), sym.A), qk) +
                             l2_inner(dyadic_block(vq, k, p), Af));
                double tt = k >= 1 ? t2 : t1;
                double ss = k >= 1 ? s2 : s1;
                double denom = vn * (std::pow(2.0, -k * tt) * qn * afn +
                                     std::pow(2.0, -k * (ss - sym.m)) * fn * qkn);
                if (denom > 0) alpha_sum += pairing / denom;
            }
            rx.add(alpha_sum, 1.0);
        }
        rx.finalize();
        reports.push_back(std::move(rx));
    }

    // weighted commutator sums along trajectories
    const int tcount = std::max(2, spec.count / 8);
    for (const auto& sym : syms) {
        if (sym.tag == "ixi") continue;  // degree-1 case already covered by mod
        EstimateReport rw{"commutator-weighted-" + sym.tag, spec.seed};
        EstimateReport ru{"commutator-velocity-" + sym.tag, spec.seed};
        const double rho = 1.0;
        for (int i = 0; i < tcount; ++i) {
            Trajectory htr = harness_trajectory(g, p, spec, std::uint64_t(i), 0.5, 5, 3);
            Trajectory vtr = harness_trajectory(g, p, spec, std::uint64_t(i), 0.5, 5, 4);
            WeightParams w{0.125, htr.horizon(), p.k_max()};
            // sum_k omega_k 2^{k(rho-m)} ||F_k||_{L1(L2)} vs ||h||_{E^rho} ||v||_{L1(B^2)}
            double lhs_h = 0, lhs_u = 0;
            for (int k = p.k_min() + 1; k < p.k_max(); ++k) {
                std::vector<double> nk(htr.size()), nku(htr.size());
                for (std::size_t j = 0; j < htr.size(); ++j) {
                    const auto& vt = vtr.sample(j).u;
                    CommutatorTerms ct =
                        commutator_terms(vt, htr.sample(j).h, k, sym.A, p);
                    nk[j] = l2_norm(ct.F0 + ct.F1 + ct.F2 + ct.F3);
                    CommutatorTerms c1 =
                        commutator_terms(vt, htr.sample(j).u.u1, k, sym.A, p);
                    CommutatorTerms c2 =
                        commutator_terms(vt, htr.sample(j).u.u2, k, sym.A, p);
                    double a = l2_norm(c1.F0 + c1.F1 + c1.F2 + c1.F3);
                    double b = l2_norm(c2.F0 + c2.F1 + c2.F2 + c2.F3);
                    nku[j] = std::sqrt(a * a + b * b);
                }
                double l1 = detail::time_lr(htr, nk, 1);
                double l1u = detail::time_lr(htr, nku, 1);
                lhs_h += weight_omega(k, htr.horizon(), w) *
                         std::pow(2.0, k * (rho - sym.m)) * l1;
                lhs_u += std::pow(2.0, k * (rho - sym.m)) * l1u;
            }
            rw.add(lhs_h, weighted_norm_E(htr, rho, w, Component::height) *
                              time_space_norm(vtr, 1, {2, 2, 1}, Component::velocity));
            ru.add(lhs_u, time_space_norm(htr, 2, {rho + 1, 2, 1}, Component::velocity) *
                              time_space_norm(vtr, 2, {1, 2, 1}, Component::velocity));
        }
        rw.finalize();
        ru.finalize();
        reports.push_back(std::move(rw));
        reports.push_back(std::move(ru));
    }
    return reports;
}

// -------- logarithmic interpolation --------

inline std::vector<EstimateReport> verify_log_interpolation(const Grid2D& g,
                                                            const DyadicPartition& p,
                                                            const CorpusSpec& spec) {
    spec.validate();
    std::vector<EstimateReport> reports;
    const double s = 0;
    for (const auto& [eps, tag] : std::vector<std::pair<double, const char*>>{
             {0.25, "025"}, {0.5, "05"}, {1.0, "1"}}) {
        EstimateReport r{std::string("log-interpolation-eps") + tag, spec.seed};
        for (int i = 0; i < spec.count; ++i) {
            Trajectory a = harness_trajectory(g, p, spec, std::uint64_t(i), 0.5, 6, 5);
            for (double rho : {1.0, 2.0, kInf}) {
                double mid = time_space_norm(a, rho, {s, 2, kInf});
                if (mid == 0) {
                    ++r.skipped;
                    continue;
                }
                double lo = time_space_norm(a, rho, {s - eps, 2, kInf});
                double hi = time_space_norm(a, rho, {s + eps, 2, kInf});
                double lhs = time_space_norm(a, rho, {s, 2, 1});
                double rhs = (mid / eps) * std::log(std::exp(1.0) + (lo + hi) / mid);
                r.add(lhs, rhs);
            }
        }
        r.finalize();
        reports.push_back(std::move(r));
    }
    return reports;
}

// -------- weighted products --------

inline std::vector<EstimateReport> verify_weighted_products(const Grid2D& g,
                                                            const DyadicPartition& p,
                                                            const CorpusSpec& spec) {
    spec.validate();
    std::vector<EstimateReport> reports;
    EstimateReport r10{"weighted-product-sum", spec.seed};
    EstimateReport r11{"weighted-product-sup", spec.seed};
    const int tcount = std::max(2, spec.count / 4);
    for (int i = 0; i < tcount; ++i) {
        Trajectory a = harness_trajectory(g, p, spec, std::uint64_t(i), 0.5, 6, 6);
        Trajectory b = harness_trajectory(g, p, spec, std::uint64_t(i), 0.5, 6, 7);
        Trajectory fg = detail::product_trajectory(a, b, p);
        WeightParams w{0.125, a.horizon(), p.k_max()};
        const double T = a.horizon();
        // sum form: s1 <= 0, s2 <= 1, s1 + s2 > 0; (r1, r2) conjugate
        for (auto [ss1, ss2] : std::vector<std::pair<double, double>>{
                 {0.0, 1.0}, {-0.5, 1.0}, {0.0, 0.5}}) {
            for (auto [rr1, rr2] :
                 std::vector<std::pair<double, double>>{{kInf, 1.0}, {2.0, 2.0}}) {
                double lhs = 0, rhs_f = 0;
                for (int k = p.k_min(); k <= p.k_max(); ++k) {
                    std::vector<double> pk(fg.size()), fk(a.size());
                    for (std::size_t j = 0; j < fg.size(); ++j)
                        pk[j] = fg.block_record(Component::height, j, k);
                    for (std::size_t j = 0; j < a.size(); ++j)
                        fk[j] = a.block_record(Component::height, j, k);
                    lhs += weight_omega(k, T, w) * std::pow(2.0, k * (ss1 + ss2 - 1.0)) *
                           detail::time_lr(fg, pk, 1);
                    rhs_f += weight_omega(k, T, w) * std::pow(2.0, k * ss1) *
                             detail::time_lr(a, fk, rr1);
                }
                double rhs_g = 0;
                {
                    std::vector<double> gv(b.size());
                    for (std::size_t j = 0; j < b.size(); ++j)
                        gv[j] = besov_norm(b.sample(j).h, {ss2, 2, 1}, p);
                    rhs_g = detail::time_lr(b, gv, rr2);
                }
                r10.add(lhs, rhs_f * rhs_g);
            }
        }
        // sup form: s1 <= 0, s2 < 1, s1 + s2 >= 0
        for (auto [ss1, ss2] : std::vector<std::pair<double, double>>{
                 {0.0, 0.5}, {-0.5, 0.5}, {0.0, 0.0}}) {
            double lhs = 0;
            for (int k = p.k_min(); k <= p.k_max(); ++k) {
                std::vector<double> pk(fg.size());
                for (std::size_t j = 0; j < fg.size(); ++j)
                    pk[j] = fg.block_record(Component::height, j, k);
                lhs = std::max(lhs, weight_omega(k, T, w) *
                                        std::pow(2.0, k * (ss1 + ss2 - 1.0)) *
                                        detail::time_lr(fg, pk, 1));
            }
            r11.add(lhs, weighted_norm_E(a, ss1, w) *
                             time_space_norm(b, 1, {ss2, 2, kInf}));
        }
    }
    r10.finalize();
    r11.finalize();
    reports.push_back(std::move(r10));
    reports.push_back(std::move(r11));
    return reports;
}

// -------- twin-run divergence experiment --------

struct UniquenessReport {
    bool conclusive = false;
    bool identical = false;  // the two runs agree bitwise (zero perturbation)
    std::vector<double> times;
    std::vector<double> Z;          // divergence functional along time
    double Z_final = 0;
    double W_final = 0;             // accumulated velocity-strength functional
    double theta_sup = 0;           // sup-in-time weak norm of the height gap
    double monitor_height_gap = 0;  // ratio against the height-gap bound
    double osgood = 0;              // comparison bound at the horizon
    bool below_bound = false;
    bool osgood_saturated = false;
    std::string note;
};

namespace detail {

// Z(i) = sup_k 2^k int_0^{t_i} ||Dk w|| + sup_k (int_0^{t_i} ||Dk w||^2)^{1/2}
inline std::vector<double> divergence_functional(const Trajectory& w,
                                                 const DyadicPartition& p) {
    std::vector<double> out(w.size(), 0.0);
    std::vector<double> acc1(p.blocks(), 0.0), acc2(p.blocks(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i > 0) {
            double dt = w.time(i) - w.time(i - 1);
            for (int k = p.k_min(); k <= p.k_max(); ++k) {
                double a = w.block_record(Component::velocity, i - 1, k);
                double b = w.block_record(Component::velocity, i, k);
                acc1[k - p.k_min()] += 0.5 * dt * (a + b);
                acc2[k - p.k_min()] += 0.5 * dt * (a * a + b * b);
            }
        }
        double z1 = 0, z2 = 0;
        for (int k = p.k_min(); k <= p.k_max(); ++k) {
            z1 = std::max(z1, std::pow(2.0, k) * acc1[k - p.k_min()]);
            z2 = std::max(z2, std::sqrt(acc2[k - p.k_min()]));
        }
        out[i] = z1 + z2;
    }
    return out;
}

}  // namespace detail

inline UniquenessReport uniqueness_experiment(const SpectralField2D& h0,
                                              const VectorField2D& u0,
                                              const IterationConfig& cfg,
                                              const DyadicPartition& p,
                                              double perturbation) {
    UniquenessReport rep;
    PicardResult base = picard_iterate(h0, u0, cfg, p);
    // perturb the height in the highest resolved block, deterministically
    SpectralField2D h0p = h0;
    double a_scale = 0;
    if (perturbation != 0.0) {
        CorpusSpec pspec{777, 1, 0.0};
        SpectralField2D bump = random_block_field(h0.grid, p, p.k_max(), pspec, 0);
        double bn = l2_norm(bump);
        if (bn > 0) {
            double base_scale = std::max(l2_norm(h0) + l2_norm(u0), 1.0);
            bump *= perturbation * base_scale / bn;
            h0p += bump;
            a_scale = besov_norm(bump, {1, 2, kInf}, p) + besov_norm(bump, {0, 2, kInf}, p);
        }
    }
    PicardResult pert = picard_iterate(h0p, u0, cfg, p);

    if (!base.report.converged || !pert.report.converged) {
        rep.note = "one of the runs did not converge; experiment inconclusive";
        return rep;
    }
    rep.conclusive = true;

    const Trajectory& t1 = base.trajectory;
    const Trajectory& t2 = pert.trajectory;
    const std::size_t n = std::min(t1.size(), t2.size());

    rep.identical = true;
    for (std::size_t i = 0; i < n && rep.identical; ++i) {
        if (t1.sample(i).h.coef != t2.sample(i).h.coef ||
            t1.sample(i).u.u1.coef != t2.sample(i).u.u1.coef ||
            t1.sample(i).u.u2.coef != t2.sample(i).u.u2.coef)
            rep.identical = false;
    }

    Trajectory diff(t1.grid(), p);
    for (std::size_t i = 0; i < n; ++i)
        diff.append(t1.time(i), t2.sample(i).h - t1.sample(i).h,
                    t2.sample(i).u - t1.sample(i).u);
    auto Z = detail::divergence_functional(diff, p);
    rep.times.resize(n);
    for (std::size_t i = 0; i < n; ++i) rep.times[i] = diff.time(i);
    rep.Z = Z;
    rep.Z_final = Z.back();

    // W(t) = ||u||_{L1_t(B^0)} + ||u||_{L1_t(B^2)} of the base solution
    std::vector<double> Wt(n, 0.0);
    {
        double acc = 0;
        std::vector<double> inst(n);
        for (std::size_t i = 0; i < n; ++i)
            inst[i] = besov_norm(t1.sample(i).u, {0, 2, 1}, p) +
                      besov_norm(t1.sample(i).u, {2, 2, 1}, p);
        for (std::size_t i = 1; i < n; ++i) {
            acc += 0.5 * (t1.time(i) - t1.time(i - 1)) * (inst[i] + inst[i - 1]);
            Wt[i] = acc;
        }
    }
    rep.W_final = Wt.back();

    // weak-norm gap of the heights and its bound by the velocity gap
    {
        double theta = 0;
        std::vector<double> w_b1(n);
        double h1_b1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            theta = std::max(theta, besov_norm(diff.sample(i).h, {0, 2, kInf}, p));
            w_b1[i] = besov_norm(diff.sample(i).u, {1, 2, 1}, p);
            h1_b1 = std::max(h1_b1, besov_norm(t1.sample(i).h, {1, 2, 1}, p));
        }
        rep.theta_sup = theta;
        double w_l1 = 0;
        for (std::size_t i = 1; i < n; ++i)
            w_l1 += 0.5 * (diff.time(i) - diff.time(i - 1)) * (w_b1[i] + w_b1[i - 1]);
        double denom = w_l1 * (1.0 + h1_b1);
        rep.monitor_height_gap = denom > 0 ? theta / denom : 0.0;
    }

    if (perturbation != 0.0 && rep.Z_final > 0) {
        const double WT = rep.W_final;
        const double T = rep.times.back();
        // piecewise-linear W gives a piecewise-constant W'
        OsgoodProblem op;
        op.a = std::max(a_scale, 1e-300);
        op.t0 = 0;
        op.t1 = T;
        std::vector<double> times = rep.times;
        std::vector<double> Wv = Wt;
        op.gamma = [times, Wv](double t) {
            std::size_t i = 0;
            while (i + 2 < times.size() && times[i + 1] <= t) ++i;
            double dW = (Wv[i + 1] - Wv[i]) / (times[i + 1] - times[i]);
            return 1.0 + dW;
        };
        op.mu = [WT](double r) { return r * std::log(std::exp(1.0) + WT / r); };
        OsgoodResult ob = osgood_bound(op, T);
        rep.osgood = ob.bound;
        rep.osgood_saturated = ob.saturated;
        rep.below_bound = !ob.saturated && rep.Z_final <= ob.bound;
    }
    return rep;
}

}  // namespace swlab
