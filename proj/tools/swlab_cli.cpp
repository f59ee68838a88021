// Batch experiment runner: decompose | norms | solve | iterate | verify |
// uniqueness. Reports are JSONL/CSV written under --out; reruns with the same
// config and seed produce byte-identical bodies.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swlab/config.hpp"
#include "swlab/corpus.hpp"
#include "swlab/estimates.hpp"
#include "swlab/io.hpp"
#include "swlab/iteration.hpp"
#include "swlab/linear_solver.hpp"

namespace {

// exit codes: 0 ok, 1 usage/runtime error, 2 gate failure, 3 vacuum
// proximity, 4 divergence/unbounded trend, 5 inconclusive
constexpr int kExitGate = 2;
constexpr int kExitVacuum = 3;
constexpr int kExitDivergence = 4;
constexpr int kExitInconclusive = 5;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

swlab::RunConfig load(const CommonOpts& o) {
    swlab::RunConfig cfg = o.config_path.empty() ? swlab::RunConfig{}
                                                 : swlab::load_config(o.config_path);
    if (o.seed_set) cfg.seed = o.seed;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    std::filesystem::create_directories(cfg.out_dir);
    return cfg;
}

std::ofstream open_out(const swlab::RunConfig& cfg, const std::string& suffix) {
    std::string path = cfg.out_dir + "/" + cfg.experiment + suffix;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    return out;
}

// initial data: band-limited random pair scaled to a requested size
void make_data(const swlab::RunConfig& cfg, const swlab::DyadicPartition& p, double scale,
               swlab::SpectralField2D& h0, swlab::VectorField2D& u0) {
    swlab::CorpusSpec spec = cfg.corpus();
    h0 = swlab::random_field(cfg.grid(), p, spec, 0, 11);
    u0 = swlab::random_vector_field(cfg.grid(), p, spec, 1);
    double nrm = swlab::hybrid_norm(h0, {0, 1}, p) + swlab::besov_norm(u0, {0, 2, 1}, p);
    if (nrm > 0) {
        h0 *= scale / nrm;
        u0 *= scale / nrm;
    }
}

int cmd_decompose(const CommonOpts& o, const std::string& input, std::uint64_t index) {
    swlab::RunConfig cfg = load(o);
    swlab::DyadicPartition p = cfg.partition();
    swlab::SpectralField2D f = input.empty()
                                   ? swlab::random_field(cfg.grid(), p, cfg.corpus(), index)
                                   : swlab::read_field(input);
    auto out = open_out(cfg, "_spectrum.csv");
    swlab::write_block_spectrum_csv(out, f, p);
    return 0;
}

int cmd_norms(const CommonOpts& o, std::uint64_t index) {
    swlab::RunConfig cfg = load(o);
    swlab::DyadicPartition p = cfg.partition();
    swlab::Trajectory tr =
        swlab::random_trajectory(cfg.grid(), p, cfg.corpus(), index, cfg.T, 6);
    auto out = open_out(cfg, "_norms.jsonl");
    swlab::WeightParams w = cfg.weights();
    using swlab::Component;
    auto line = [&](const std::string& name, double v) {
        swlab::write_jsonl(out, swlab::json{{"record", "norm"}, {"name", name}, {"value", v}});
    };
    line("u:linf_t:b0", swlab::time_outside_norm(tr, swlab::kInf, {0, 2, 1}, Component::velocity));
    line("u:l1_t:b2", swlab::time_outside_norm(tr, 1, {2, 2, 1}, Component::velocity));
    line("u:l2_t:b1", swlab::time_outside_norm(tr, 2, {1, 2, 1}, Component::velocity));
    line("u:tilde_l2_t:b1", swlab::time_space_norm(tr, 2, {1, 2, 1}, Component::velocity));
    line("h:linf_t:hybrid01", swlab::time_hybrid_norm(tr, swlab::kInf, {0, 1}, Component::height));
    line("h:l1_t:hybrid21", swlab::time_hybrid_norm(tr, 1, {2, 1}, Component::height));
    line("h:weighted_e01", swlab::weighted_norm_E_hybrid(tr, 0, 1, w, Component::height));
    return 0;
}

int cmd_solve(const CommonOpts& o, double scale) {
    swlab::RunConfig cfg = load(o);
    swlab::DyadicPartition p = cfg.partition();
    swlab::SpectralField2D h0;
    swlab::VectorField2D u0;
    make_data(cfg, p, scale, h0, u0);
    swlab::LinearizedProblem prob;
    prob.initial = swlab::State{0.0, std::move(h0), std::move(u0), cfg.nu};
    prob.dt = cfg.dt;
    prob.T = cfg.T;
    prob.c_cfl = cfg.c_cfl;
    swlab::SolveResult res = swlab::solve_linearized(prob, p, cfg.weights());
    {
        auto out = open_out(cfg, "_trajectory.csv");
        swlab::write_trajectory_csv(out, res.trajectory);
    }
    {
        auto out = open_out(cfg, "_monitor.jsonl");
        swlab::write_jsonl(out, swlab::to_json(res.monitor));
    }
    return res.monitor.aborted ? kExitDivergence : 0;
}

int cmd_iterate(const CommonOpts& o, double scale) {
    swlab::RunConfig cfg = load(o);
    swlab::DyadicPartition p = cfg.partition();
    swlab::SpectralField2D h0;
    swlab::VectorField2D u0;
    make_data(cfg, p, scale, h0, u0);
    swlab::PicardResult res = swlab::picard_iterate(h0, u0, cfg.iteration(), p);
    auto out = open_out(cfg, "_iterate.jsonl");
    for (const auto& r : res.report.iterates) swlab::write_jsonl(out, swlab::to_json(r));
    swlab::write_jsonl(out, swlab::to_json(res.report));
    if (res.report.aborted) {
        return res.report.abort_reason.find("vacuum") != std::string::npos ||
                       res.report.abort_reason.find("height") != std::string::npos
                   ? kExitVacuum
                   : kExitDivergence;
    }
    if (!res.report.gates.all()) return kExitGate;
    if (!res.report.converged) return kExitInconclusive;
    return 0;
}

int cmd_verify(const CommonOpts& o, const std::string& select) {
    swlab::RunConfig cfg = load(o);
    swlab::DyadicPartition p = cfg.partition();
    swlab::CorpusSpec spec = cfg.corpus();
    swlab::Grid2D g = cfg.grid();
    std::vector<swlab::EstimateReport> reports;
    auto want = [&](const std::string& name) {
        return select.empty() || select == name || select == "all";
    };
    if (want("products"))
        for (auto& r : swlab::verify_product_estimates(g, p, spec)) reports.push_back(std::move(r));
    if (want("composition"))
        for (auto& r : swlab::verify_composition(g, p, spec)) reports.push_back(std::move(r));
    if (want("commutators"))
        for (auto& r : swlab::verify_commutator_estimates(g, p, spec)) reports.push_back(std::move(r));
    if (want("interpolation"))
        for (auto& r : swlab::verify_log_interpolation(g, p, spec)) reports.push_back(std::move(r));
    if (want("weighted"))
        for (auto& r : swlab::verify_weighted_products(g, p, spec)) reports.push_back(std::move(r));
    if (reports.empty()) {
        std::cerr << "verify: unknown selection '" << select << "'\n";
        return 1;
    }
    auto out = open_out(cfg, "_verify.jsonl");
    bool unbounded = false, inconclusive = false;
    for (const auto& r : reports) {
        swlab::write_jsonl(out, swlab::to_json(r));
        if (r.verdict == "unbounded-trend") unbounded = true;
        if (r.verdict == "inconclusive") inconclusive = true;
    }
    if (unbounded) return kExitDivergence;
    if (inconclusive) return kExitInconclusive;
    return 0;
}

int cmd_uniqueness(const CommonOpts& o, double perturbation, double scale) {
    swlab::RunConfig cfg = load(o);
    swlab::DyadicPartition p = cfg.partition();
    swlab::SpectralField2D h0;
    swlab::VectorField2D u0;
    make_data(cfg, p, scale, h0, u0);
    swlab::UniquenessReport rep =
        swlab::uniqueness_experiment(h0, u0, cfg.iteration(), p, perturbation);
    auto out = open_out(cfg, "_uniqueness.jsonl");
    swlab::write_jsonl(out, swlab::to_json(rep));
    if (!rep.conclusive) return kExitInconclusive;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral shallow-water laboratory"};
    app.require_subcommand(1);

    CommonOpts common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "configuration file");
        sub->add_option("--out", common.out_dir, "output directory");
        sub->add_option("--seed", common.seed, "corpus seed override")
            ->each([&](const std::string&) { common.seed_set = true; });
    };

    std::string input, select;
    std::uint64_t index = 0;
    double scale = 1e-3, perturbation = 1e-10;

    auto* dec = app.add_subcommand("decompose", "block spectrum of a field");
    add_common(dec);
    dec->add_option("--input", input, "field snapshot path (default: builtin generator)");
    dec->add_option("--index", index, "builtin generator index");

    auto* nrm = app.add_subcommand("norms", "norm table of a synthetic trajectory");
    add_common(nrm);
    nrm->add_option("--index", index, "builtin generator index");

    auto* slv = app.add_subcommand("solve", "linear system run with monitors");
    add_common(slv);
    slv->add_option("--scale", scale, "initial data size");

    auto* itr = app.add_subcommand("iterate", "successive-approximation run");
    add_common(itr);
    itr->add_option("--scale", scale, "initial data size");

    auto* ver = app.add_subcommand("verify", "inequality verification harness");
    add_common(ver);
    ver->add_option("--select", select,
                    "family: products|composition|commutators|interpolation|weighted|all");

    auto* unq = app.add_subcommand("uniqueness", "twin-run divergence experiment");
    add_common(unq);
    unq->add_option("--perturbation", perturbation, "relative size of the data perturbation");
    unq->add_option("--scale", scale, "initial data size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dec->parsed()) return cmd_decompose(common, input, index);
        if (nrm->parsed()) return cmd_norms(common, index);
        if (slv->parsed()) return cmd_solve(common, scale);
        if (itr->parsed()) return cmd_iterate(common, scale);
        if (ver->parsed()) return cmd_verify(common, select);
        if (unq->parsed()) return cmd_uniqueness(common, perturbation, scale);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
