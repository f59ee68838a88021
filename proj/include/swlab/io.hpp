#pragma once

// Serialization: versioned binary field snapshots, trajectory block-norm
// tables (CSV), and deterministic JSONL report records. Report bodies carry
// no timestamps so identical runs produce identical bytes.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "swlab/besov.hpp"
#include "swlab/estimates.hpp"
#include "swlab/field.hpp"
#include "swlab/iteration.hpp"
#include "swlab/linear_solver.hpp"
#include "swlab/partition.hpp"

namespace swlab {

using json = nlohmann::ordered_json;

inline constexpr char kFieldMagic[8] = {'S', 'W', 'F', 'L', 'D', '0', '0', '1'};

inline void write_field(std::ostream& out, const SpectralField2D& f) {
    out.write(kFieldMagic, 8);
    std::int32_t n = f.grid.n;
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    out.write(reinterpret_cast<const char*>(&f.grid.period), sizeof(double));
    out.write(reinterpret_cast<const char*>(&f.mean), sizeof(double));
    out.write(reinterpret_cast<const char*>(f.coef.data()),
              std::streamsize(f.coef.size() * sizeof(cplx)));
    if (!out) throw std::runtime_error("write_field: stream failure");
}

inline void write_field(const std::string& path, const SpectralField2D& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_field: cannot open " + path);
    write_field(out, f);
}

inline SpectralField2D read_field(std::istream& in) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kFieldMagic, 8) != 0)
        throw std::runtime_error("read_field: bad magic (not a field snapshot)");
    std::int32_t n = 0;
    double L = 0, mean = 0;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&L), sizeof(L));
    in.read(reinterpret_cast<char*>(&mean), sizeof(mean));
    SpectralField2D f(Grid2D(n, L));
    f.mean = mean;
    in.read(reinterpret_cast<char*>(f.coef.data()),
            std::streamsize(f.coef.size() * sizeof(cplx)));
    if (!in) throw std::runtime_error("read_field: truncated snapshot");
    return f;
}

inline SpectralField2D read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_field: cannot open " + path);
    return read_field(in);
}

// -------- CSV tables --------

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

inline void write_block_spectrum_csv(std::ostream& out, const SpectralField2D& f,
                                     const DyadicPartition& p) {
    out << "k,l2,linf\n";
    for (int k = p.k_min(); k <= p.k_max(); ++k) {
        SpectralField2D b = dyadic_block(f, k, p);
        out << k << "," << detail::fmt(block_l2(f, k, p)) << ","
            << detail::fmt(lp_norm(b, kInf)) << "\n";
    }
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
    const auto& p = tr.partition();
    out << "# n=" << tr.grid().n << " L=" << detail::fmt(tr.grid().period)
        << " k_min=" << p.k_min() << " k_max=" << p.k_max() << "\n";
    out << "t,k,h_l2,u_l2\n";
    for (std::size_t i = 0; i < tr.size(); ++i)
        for (int k = p.k_min(); k <= p.k_max(); ++k)
            out << detail::fmt(tr.time(i)) << "," << k << ","
                << detail::fmt(tr.block_record(Component::height, i, k)) << ","
                << detail::fmt(tr.block_record(Component::velocity, i, k)) << "\n";
}

// -------- JSONL records --------

inline json to_json(const GateReport& g) {
    return json{{"r1", g.r1},   {"r2", g.r2},   {"r3", g.r3},
                {"r4", g.r4},   {"smallness", g.smallness},
                {"E0", g.E0},   {"Q0", g.Q0},
                {"omega_max", g.omega_max}, {"data_norm", g.data_norm}};
}

inline json to_json(const IterateRecord& r) {
    return json{{"n", r.n},
                {"u_linf_b0", r.u_linf_b0},
                {"u_l1_b2", r.u_l1_b2},
                {"u_l2_b1", r.u_l2_b1},
                {"h_linf_b01", r.h_linf_b01},
                {"h_l1_b21", r.h_l1_b21},
                {"h_e01", r.h_e01},
                {"min_height", r.min_height},
                {"diff", r.diff},
                {"triple_bound", r.triple_bound}};
}

inline json to_json(const IterationReport& rep) {
    json j{{"record", "summary"},
           {"E0", rep.E0},
           {"converged", rep.converged},
           {"converged_at", rep.converged_at},
           {"aborted", rep.aborted},
           {"abort_reason", rep.abort_reason},
           {"contraction", rep.contraction},
           {"gates", to_json(rep.gates)}};
    return j;
}

inline json to_json(const EstimateReport& r) {
    return json{{"record", "estimate"}, {"id", r.id},
                {"seed", r.seed},       {"samples", r.ratios.size()},
                {"skipped", r.skipped}, {"max_ratio", r.max_ratio},
                {"max_ratio_half", r.max_ratio_half}, {"verdict", r.verdict}};
}

inline json to_json(const SolveMonitor& m) {
    return json{{"record", "monitor"},
                {"sup_bound_lhs", m.apriori_34_lhs},
                {"sup_bound_rhs", m.apriori_34_rhs},
                {"weighted_bound_lhs", m.apriori_33_lhs},
                {"weighted_bound_rhs", m.apriori_33_rhs},
                {"aborted", m.aborted},
                {"last_good_time", m.last_good_time}};
}

inline json to_json(const UniquenessReport& r) {
    return json{{"record", "uniqueness"},
                {"conclusive", r.conclusive},
                {"identical", r.identical},
                {"Z_final", r.Z_final},
                {"W_final", r.W_final},
                {"theta_sup", r.theta_sup},
                {"monitor_height_gap", r.monitor_height_gap},
                {"osgood", r.osgood},
                {"below_bound", r.below_bound},
                {"osgood_saturated", r.osgood_saturated},
                {"note", r.note}};
}

inline void write_jsonl(std::ostream& out, const json& j) { out << j.dump() << "\n"; }

}  // namespace swlab
