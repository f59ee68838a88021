#pragma once

// Run configuration: flat INI-style sections mirroring the library layers.
// Unknown keys are rejected so typos surface instead of silently using a
// default.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "swlab/besov.hpp"
#include "swlab/corpus.hpp"
#include "swlab/field.hpp"
#include "swlab/iteration.hpp"
#include "swlab/partition.hpp"

namespace swlab {

struct RunConfig {
    // [grid]
    int n_points = 512;
    double L = 16.0 * kPi;
    // [partition]
    int k_min = -4;
    int k_max = 3;
    // [weights]
    double c = 0.125;
    double T = 0.25;
    // [solver]
    double nu = 1.0;
    double dt = 0.0125;
    double c_cfl = 0.5;
    // [iteration]
    int N = 8;
    double eta = 0.05;
    double K = 4.0;
    double gate_C = 1.0;
    int max_iters = 15;
    double conv_tol = 1e-7;
    double hbar0 = 1.0;
    // [corpus]
    std::uint64_t seed = 1;
    int count = 50;
    double decay = 1.0;
    // [output]
    std::string out_dir = ".";
    std::string experiment = "run";

    Grid2D grid() const { return Grid2D(n_points, L); }
    DyadicPartition partition() const { return DyadicPartition(grid(), k_min, k_max); }
    WeightParams weights() const { return WeightParams{c, T, k_max}; }
    CorpusSpec corpus() const { return CorpusSpec{seed, count, decay}; }

    IterationConfig iteration() const {
        IterationConfig ic;
        ic.N = N;
        ic.T = T;
        ic.eta = eta;
        ic.K = K;
        ic.nu = nu;
        ic.hbar0 = hbar0;
        ic.max_iters = max_iters;
        ic.conv_tol = conv_tol;
        ic.c = c;
        ic.dt = dt;
        ic.c_cfl = c_cfl;
        ic.gate_C = gate_C;
        return ic;
    }

    void validate() const {
        (void)grid();
        (void)partition();
        weights().validate();
        corpus().validate();
        iteration().validate();
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline void apply_config_key(RunConfig& cfg, const std::string& section,
                             const std::string& key, const std::string& value) {
    const std::string id = section + "." + key;
    auto bad = [&]() -> std::invalid_argument {
        return std::invalid_argument("config: bad value for '" + id + "'");
    };
    auto as_int = [&] {
        try { return std::stoi(value); } catch (...) { throw bad(); }
    };
    auto as_real = [&] {
        try { return std::stod(value); } catch (...) { throw bad(); }
    };
    auto as_u64 = [&] {
        try { return std::stoull(value); } catch (...) { throw bad(); }
    };
    if (id == "grid.n_points") cfg.n_points = as_int();
    else if (id == "grid.L") cfg.L = as_real();
    else if (id == "partition.k_min") cfg.k_min = as_int();
    else if (id == "partition.k_max") cfg.k_max = as_int();
    else if (id == "weights.c") cfg.c = as_real();
    else if (id == "weights.T") cfg.T = as_real();
    else if (id == "solver.nu") cfg.nu = as_real();
    else if (id == "solver.dt") cfg.dt = as_real();
    else if (id == "solver.c_cfl") cfg.c_cfl = as_real();
    else if (id == "iteration.N") cfg.N = as_int();
    else if (id == "iteration.eta") cfg.eta = as_real();
    else if (id == "iteration.K") cfg.K = as_real();
    else if (id == "iteration.gate_C") cfg.gate_C = as_real();
    else if (id == "iteration.max_iters") cfg.max_iters = as_int();
    else if (id == "iteration.conv_tol") cfg.conv_tol = as_real();
    else if (id == "iteration.hbar0") cfg.hbar0 = as_real();
    else if (id == "corpus.seed") cfg.seed = as_u64();
    else if (id == "corpus.count") cfg.count = as_int();
    else if (id == "corpus.decay") cfg.decay = as_real();
    else if (id == "output.dir") cfg.out_dir = value;
    else if (id == "output.experiment") cfg.experiment = value;
    else throw std::invalid_argument("config: unknown key '" + id + "'");
}

inline RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = detail::trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: malformed line " + std::to_string(lineno));
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        try {
            apply_config_key(cfg, section, key, value);
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad value for '" + section + "." + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    return parse_config(in);
}

}  // namespace swlab
