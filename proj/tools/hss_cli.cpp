#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hss/cluster_tree.hpp"
#include "hss/compression.hpp"
#include "hss/dense_kernels.hpp"
#include "hss/flops.hpp"
#include "hss/generators.hpp"
#include "hss/hss_form.hpp"
#include "hss/mapping.hpp"
#include "hss/matvec.hpp"
#include "hss/rng.hpp"
#include "hss/ulv.hpp"

using nlohmann::ordered_json;
using clock_type = std::chrono::steady_clock;

namespace {

struct Options {
    std::string matrix = "synthetic";
    int n = 1024;
    bool n_given = false;
    double eps = 1e-8;
    int leaf_size = 128;
    std::string tree_kind = "binary";
    std::vector<int> leaf_sizes;
    int d0 = 128;
    int delta_d = 64;
    int gap = -1;
    int max_d = 4096;
    std::uint64_t seed = 1;
    int rhs = 1;
    double ir_tol = 1e-10;
    int ir_max = 50;
    int p = 64;
    std::string weights = "uniform";
    std::string json_path;
    bool compare_dense = false;
    bool timings = false;
    std::string file_path;
    int rank = 16;
    double spacing = 1.0;
    double tol = 1e-8;
    int power_max_iters = 40000;
    std::string save_hss, load_hss;
    std::string kind = "randomized";
    double comm_r = 100.0;
};

double elapsed_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct CheckSet {
    ordered_json j = ordered_json::object();
    bool all_pass = true;

    void add(const std::string& name, bool pass, double value, double threshold) {
        ordered_json e;
        e["pass"] = pass;
        e["value"] = value;
        e["threshold"] = threshold;
        j[name] = e;
        all_pass = all_pass && pass;
    }
    void add_flag(const std::string& name, bool pass) {
        ordered_json e;
        e["pass"] = pass;
        j[name] = e;
        all_pass = all_pass && pass;
    }
};

struct Problem {
    std::unique_ptr<hss::MatrixSource> source;
    std::optional<hss::SyntheticHss> synthetic;  // keeps ground truth alive
    hss::ClusterTree tree;
};

hss::ClusterTree make_tree(const Options& o) {
    if (o.tree_kind == "binary") return hss::build_balanced_tree(o.n, o.leaf_size);
    if (o.tree_kind == "comb") {
        if (o.leaf_sizes.empty())
            throw CLI::ValidationError("--tree comb requires --leaf-sizes");
        return hss::build_comb_tree(o.n, o.leaf_sizes);
    }
    throw CLI::ValidationError("unknown --tree kind: " + o.tree_kind);
}

Problem make_problem(Options& o) {
    Problem pr;
    if (o.matrix == "file") {
        // The file knows its own order; --n may only confirm it.
        if (o.file_path.empty()) throw CLI::ValidationError("--matrix file requires --file");
        pr.source = hss::load_matrix_file(o.file_path);
        if (o.n_given && pr.source->n() != o.n)
            throw CLI::ValidationError("--n disagrees with the loaded matrix order");
        o.n = pr.source->n();
    }
    pr.tree = make_tree(o);
    if (o.matrix == "toeplitz-simple") {
        pr.source = hss::toeplitz_simple(o.n);
    } else if (o.matrix == "toeplitz-qchem") {
        pr.source = hss::toeplitz_qchem(o.n, o.spacing);
    } else if (o.matrix == "synthetic") {
        pr.synthetic = hss::make_synthetic_hss(pr.tree, o.rank, hss::mix_seed(o.seed, 0x5e));
        pr.source = pr.synthetic->source();
    } else if (o.matrix != "file") {
        throw CLI::ValidationError("unknown --matrix kind: " + o.matrix);
    }
    if (pr.source->n() != pr.tree.n)
        throw CLI::ValidationError("matrix order and tree order disagree");
    return pr;
}

hss::SamplingConfig make_sampling(const Options& o) {
    hss::SamplingConfig cfg;
    cfg.d0 = o.d0;
    cfg.delta_d = o.delta_d;
    cfg.gap = o.gap;
    cfg.max_d = o.max_d;
    cfg.seed = o.seed;
    return cfg;
}

ordered_json params_json(const Options& o, const std::string& command) {
    ordered_json p;
    p["command"] = command;
    p["matrix"] = o.matrix;
    p["n"] = o.n;
    p["eps"] = o.eps;
    p["leaf_size"] = o.leaf_size;
    p["tree"] = o.tree_kind;
    if (!o.leaf_sizes.empty()) p["leaf_sizes"] = o.leaf_sizes;
    p["d0"] = o.d0;
    p["delta_d"] = o.delta_d;
    p["gap"] = o.gap;
    p["max_d"] = o.max_d;
    p["seed"] = o.seed;
    p["rhs"] = o.rhs;
    p["ir_tol"] = o.ir_tol;
    return p;
}

ordered_json compression_json(const hss::CompressionReport& r, bool timings) {
    ordered_json c;
    c["max_rank"] = r.max_rank;
    c["d_final"] = r.d_final;
    c["restarts"] = r.restarts;
    c["node_ranks"] = r.node_ranks;
    c["flops"] = r.flops;
    c["bytes"] = r.bytes;
    if (timings) c["seconds"] = r.seconds;
    return c;
}

ordered_json memory_json(std::uint64_t hss_bytes, std::uint64_t ulvb, std::uint64_t aux,
                         std::uint64_t dense) {
    ordered_json m;
    m["hss_bytes"] = hss_bytes;
    m["ulv_bytes"] = ulvb;
    m["aux_bytes"] = aux;
    m["dense_bytes"] = dense;
    m["overhead"] = hss::memory_overhead(hss_bytes, ulvb, aux, dense);
    m["overhead_alt"] = hss::memory_overhead_alt(hss_bytes, ulvb, aux, dense);
    return m;
}

int finish(const Options& o, ordered_json& report, const CheckSet& checks) {
    report["checks"] = checks.j;
    report["pass"] = checks.all_pass;
    const std::string text = report.dump(2) + "\n";
    if (!o.json_path.empty()) {
        std::ofstream out(o.json_path, std::ios::binary);
        out << text;
    } else {
        std::fputs(text.c_str(), stdout);
    }
    std::fprintf(stderr, "%s\n", checks.all_pass ? "all checks passed" : "CHECKS FAILED");
    return checks.all_pass ? 0 : 1;
}

ordered_json new_report(const Options& o, const std::string& command) {
    ordered_json report;
    report["schema"] = 1;
    report["params"] = params_json(o, command);
    return report;
}

hss::Matrix densify_capped(const hss::MatrixSource& src) {
    if (src.n() > 4096)
        throw CLI::ValidationError("--compare-dense refused for n > 4096");
    return hss::densify(src);
}

int cmd_compress(Options& o) {
    Problem pr = make_problem(o);
    hss::reset_flops();
    auto res = hss::compress(*pr.source, pr.tree, o.eps, make_sampling(o));
    ordered_json report = new_report(o, "compress");
    report["compression"] = compression_json(res.report, o.timings);
    const std::uint64_t dense_bytes = std::uint64_t(8) * o.n * o.n;
    const std::uint64_t aux = std::uint64_t(32) * o.n * res.report.d_final;
    report["memory"] = memory_json(res.report.bytes, 0, aux, dense_bytes);
    CheckSet checks;
    checks.add_flag("compressed", true);
    if (o.compare_dense) {
        hss::Matrix a = densify_capped(*pr.source);
        hss::Matrix rec = hss::reconstruct_dense(res.form);
        const double rel = (rec - a).frob_norm() / a.frob_norm();
        report["reconstruct_rel_err"] = rel;
        checks.add("reconstruction", rel <= 100.0 * o.eps, rel, 100.0 * o.eps);
    }
    if (!o.save_hss.empty()) hss::save_hss_file(o.save_hss, res.form);
    return finish(o, report, checks);
}

int cmd_solve(Options& o) {
    Problem pr = make_problem(o);
    hss::reset_flops();
    ordered_json report = new_report(o, "solve");
    CheckSet checks;

    hss::HssForm form;
    hss::CompressionReport crep;
    if (!o.load_hss.empty()) {
        form = hss::load_hss_file(o.load_hss);
        if (form.tree.n != pr.source->n())
            throw CLI::ValidationError("loaded form order disagrees with the matrix");
    } else {
        auto res = hss::compress(*pr.source, pr.tree, o.eps, make_sampling(o));
        form = std::move(res.form);
        crep = res.report;
        report["compression"] = compression_json(crep, o.timings);
    }

    const auto t_factor = clock_type::now();
    hss::UlvFactors f = hss::ulv_factor(form);
    const double factor_seconds = elapsed_since(t_factor);
    ordered_json fj;
    fj["root_size"] = f.root_size;
    fj["ulv_bytes"] = hss::ulv_bytes(f);
    if (o.timings) fj["seconds"] = factor_seconds;
    report["factor"] = fj;

    hss::Matrix b = hss::generate_random(o.n, o.rhs, hss::mix_seed(o.seed, 0xb));
    const auto t_solve = clock_type::now();
    hss::RefinementResult ir = hss::iterative_refinement(*pr.source, f, b, o.ir_tol, o.ir_max);
    const double solve_seconds = elapsed_since(t_solve);
    ordered_json sj;
    sj["ir_steps"] = ir.iterations;
    sj["ir_residuals"] = ir.residuals;
    sj["converged"] = ir.converged;
    sj["diverged"] = ir.diverged;
    if (o.timings) sj["seconds"] = solve_seconds;
    report["solve"] = sj;

    const std::uint64_t dense_bytes = std::uint64_t(8) * o.n * o.n;
    const std::uint64_t aux = std::uint64_t(32) * o.n * form.d_used;
    report["memory"] = memory_json(hss::factor_bytes(form), hss::ulv_bytes(f), aux, dense_bytes);

    checks.add("ir_converged", ir.converged, ir.residuals.back(), o.ir_tol);
    if (o.compare_dense) {
        hss::Matrix a = densify_capped(*pr.source);
        hss::PluFactors lu = hss::plu_factor(a);
        hss::Matrix xd = hss::solve_plu(lu, b);
        hss::Matrix x_direct = hss::ulv_solve(f, b);
        const double rel_direct = (x_direct - xd).frob_norm() / xd.frob_norm();
        const double rel = (ir.x - xd).frob_norm() / xd.frob_norm();
        report["solution_rel_diff_direct"] = rel_direct;
        report["solution_rel_diff"] = rel;
        checks.add("dense_agreement", rel <= 1e-8, rel, 1e-8);
    }
    if (!o.save_hss.empty()) hss::save_hss_file(o.save_hss, form);
    return finish(o, report, checks);
}

int cmd_matvec_bench(Options& o) {
    Problem pr = make_problem(o);
    hss::reset_flops();
    ordered_json report = new_report(o, "matvec-bench");
    CheckSet checks;

    hss::HssForm form;
    if (!o.load_hss.empty()) {
        form = hss::load_hss_file(o.load_hss);
    } else {
        auto res = hss::compress(*pr.source, pr.tree, o.eps, make_sampling(o));
        form = std::move(res.form);
        report["compression"] = compression_json(res.report, o.timings);
    }

    hss::Matrix X = hss::generate_random(o.n, o.rhs, hss::mix_seed(o.seed, 0xa));
    const long long flops_before = hss::flop_count();
    const auto t_hss = clock_type::now();
    hss::Matrix bh = hss::hss_matvec(form, X);
    const double hss_seconds = elapsed_since(t_hss);
    const long long hss_flops = hss::flop_count() - flops_before;

    ordered_json mj;
    mj["columns"] = o.rhs;
    mj["hss_flops"] = hss_flops;
    if (o.timings) mj["hss_seconds"] = hss_seconds;

    const long long dense_flops_analytic = 2LL * o.n * o.n * o.rhs;
    mj["dense_flops_analytic"] = dense_flops_analytic;

    if (o.compare_dense) {
        const auto t_dense = clock_type::now();
        hss::Matrix bd = pr.source->multiply(X);
        if (o.timings) mj["dense_seconds"] = elapsed_since(t_dense);
        const double rel = (bh - bd).frob_norm() / bd.frob_norm();
        mj["rel_err"] = rel;
        checks.add("matvec_accuracy", rel <= 100.0 * o.eps, rel, 100.0 * o.eps);
    }
    report["matvec"] = mj;
    return finish(o, report, checks);
}

int cmd_power(Options& o) {
    Problem pr = make_problem(o);
    hss::reset_flops();
    ordered_json report = new_report(o, "power");
    report["params"]["tol"] = o.tol;
    CheckSet checks;

    hss::HssForm form;
    if (!o.load_hss.empty()) {
        form = hss::load_hss_file(o.load_hss);
    } else {
        auto res = hss::compress(*pr.source, pr.tree, o.eps, make_sampling(o));
        form = std::move(res.form);
        report["compression"] = compression_json(res.report, o.timings);
    }

    const std::uint64_t start_seed = hss::mix_seed(o.seed, 0xe);
    const auto t_hss = clock_type::now();
    hss::PowerMethodResult ph = hss::power_method(form, o.tol, o.power_max_iters, start_seed);
    const double hss_seconds = elapsed_since(t_hss);
    ordered_json pj;
    pj["hss_eigenvalue"] = ph.eigenvalue;
    pj["hss_iterations"] = ph.iterations;
    pj["hss_converged"] = ph.converged;
    if (o.timings) pj["hss_seconds"] = hss_seconds;
    checks.add_flag("hss_converged", ph.converged);

    if (o.compare_dense) {
        const auto t_dense = clock_type::now();
        hss::PowerMethodResult pd =
            hss::power_method(*pr.source, o.tol, o.power_max_iters, start_seed);
        if (o.timings) pj["dense_seconds"] = elapsed_since(t_dense);
        pj["dense_eigenvalue"] = pd.eigenvalue;
        pj["dense_iterations"] = pd.iterations;
        pj["dense_converged"] = pd.converged;
        const double rel =
            std::fabs(ph.eigenvalue - pd.eigenvalue) / std::fabs(pd.eigenvalue);
        pj["eigenvalue_rel_diff"] = rel;
        pj["iteration_diff"] = ph.iterations - pd.iterations;
        checks.add("eigenvalue_agreement", rel <= 1e-6, rel, 1e-6);
        checks.add("iteration_parity", std::abs(ph.iterations - pd.iterations) <= 1,
                   double(std::abs(ph.iterations - pd.iterations)), 1.0);
    }
    report["power"] = pj;
    return finish(o, report, checks);
}

std::vector<double> weights_for(const Options& o, const hss::ClusterTree& tree,
                                const std::vector<int>* node_ranks) {
    if (o.weights == "uniform") return hss::uniform_weights(tree);
    if (o.weights.rfind("right:", 0) == 0) {
        const double f = std::stod(o.weights.substr(6));
        return hss::fraction_weights(tree, f);
    }
    if (o.weights == "ranks") {
        if (!node_ranks)
            throw CLI::ValidationError("--weights ranks requires a compressed form");
        return hss::rank_weights(tree, *node_ranks);
    }
    throw CLI::ValidationError("unknown --weights: " + o.weights);
}

int cmd_map_plan(Options& o) {
    // Rank weighting compresses first, which may also pin down n for file
    // inputs, so the report and tree are built afterwards.
    std::vector<int> node_ranks;
    const std::vector<int>* ranks_ptr = nullptr;
    ordered_json comp_json;
    if (o.weights == "ranks") {
        Problem pr = make_problem(o);
        auto res = hss::compress(*pr.source, pr.tree, o.eps, make_sampling(o));
        node_ranks = res.report.node_ranks;
        ranks_ptr = &node_ranks;
        comp_json = compression_json(res.report, o.timings);
    }

    ordered_json report = new_report(o, "map-plan");
    report["params"]["p"] = o.p;
    report["params"]["weights"] = o.weights;
    if (!comp_json.is_null()) report["compression"] = comp_json;
    CheckSet checks;

    hss::ClusterTree tree = make_tree(o);
    hss::MappingPlan plan = hss::proportional_map(tree, o.p, weights_for(o, tree, ranks_ptr));
    report["tree"] = ordered_json::parse(hss::tree_to_json(tree));
    report["plan"] = ordered_json::parse(hss::plan_to_json(plan, tree));

    bool partitions = true;
    for (int id = 0; id < tree.num_nodes(); ++id) {
        const hss::TreeNode& nd = tree.node(id);
        const hss::NodeAssignment& a = plan.nodes[id];
        if (nd.is_leaf()) continue;
        const hss::NodeAssignment& a1 = plan.nodes[nd.child[0]];
        const hss::NodeAssignment& a2 = plan.nodes[nd.child[1]];
        if (a.last - a.first >= 2) {
            partitions = partitions && a1.first == a.first && a2.last == a.last &&
                         a1.last == a2.first;
        }
    }
    checks.add_flag("children_partition_parent", partitions);
    return finish(o, report, checks);
}

int cmd_comm_model(const Options& o) {
    ordered_json report = new_report(o, "comm-model");
    report["params"]["p"] = o.p;
    report["params"]["kind"] = o.kind;
    report["params"]["r"] = o.comm_r;
    CheckSet checks;

    hss::CommKind kind;
    if (o.kind == "dense-lu") kind = hss::CommKind::DenseLu;
    else if (o.kind == "nonrandomized") kind = hss::CommKind::HssNonrandomized;
    else if (o.kind == "randomized") kind = hss::CommKind::HssRandomized;
    else throw CLI::ValidationError("unknown --kind: " + o.kind);

    hss::CommModelResult r = hss::comm_model(kind, double(o.n), double(o.p), o.comm_r);
    report["model"] = ordered_json::parse(hss::comm_to_json(r));
    if (o.p >= 1 && (o.p & (o.p - 1)) == 0) {
        hss::CommCost ex = hss::distribution_cost_exact(double(o.n), o.p);
        ordered_json ej;
        ej["messages"] = ex.messages;
        ej["words"] = ex.words;
        report["distribution_exact"] = ej;
    }
    checks.add_flag("evaluated", true);
    return finish(o, report, checks);
}

int cmd_comb_demo(const Options& o) {
    if (o.n % 8 != 0) throw CLI::ValidationError("comb-demo requires n divisible by 8");
    ordered_json report = new_report(o, "comb-demo");
    report["params"]["p"] = o.p;
    CheckSet checks;

    const double s = double(o.n) / 4000.0;
    const int r_deep = int(std::lround(70.0 * s));
    const int r_mid = int(std::lround(60.0 * s));
    const int r_top = int(std::lround(40.0 * s));
    const std::vector<int> sizes = {o.n / 8, o.n / 8, o.n / 4, o.n / 2};

    hss::ClusterTree comb = hss::build_comb_tree(o.n, sizes);
    // chain ids: root 0, top internal 1, widest leaf 2, mid internal 3,
    // mid leaf 4, deep pair 5 and 6
    std::vector<int> ranks(comb.num_nodes(), 0);
    ranks[1] = r_top;
    ranks[2] = r_top;
    ranks[3] = r_mid;
    ranks[4] = r_mid;
    ranks[5] = r_deep;
    ranks[6] = r_deep;
    hss::SyntheticHss syn =
        hss::make_synthetic_hss(comb, ranks, hss::mix_seed(o.seed, 0xc0));
    hss::DenseSource src(syn.dense);

    hss::SamplingConfig comb_cfg = make_sampling(o);
    comb_cfg.d0 = 128;
    comb_cfg.max_d = std::max(comb_cfg.max_d, 2048);
    hss::reset_flops();
    auto comb_res = hss::compress(src, comb, 1e-10, comb_cfg);
    report["comb"] = compression_json(comb_res.report, o.timings);

    hss::ClusterTree binary = hss::build_balanced_tree(o.n, o.n / 8);
    hss::SamplingConfig bin_cfg = make_sampling(o);
    bin_cfg.d0 = o.n / 4 + 24;
    bin_cfg.max_d = std::max(bin_cfg.max_d, o.n / 2);
    hss::reset_flops();
    auto bin_res = hss::compress(src, binary, 1e-10, bin_cfg);
    report["binary"] = compression_json(bin_res.report, o.timings);

    hss::MappingPlan uni = hss::proportional_map(comb, o.p, hss::uniform_weights(comb));
    hss::MappingPlan wfrac = hss::proportional_map(comb, o.p, hss::fraction_weights(comb, 0.75));
    hss::MappingPlan wrank = hss::remap_with_ranks(comb, uni, comb_res.report.node_ranks);
    ordered_json mj;
    mj["uniform"] = ordered_json::parse(hss::plan_to_json(uni, comb));
    mj["right_0.75"] = ordered_json::parse(hss::plan_to_json(wfrac, comb));
    mj["ranks"] = ordered_json::parse(hss::plan_to_json(wrank, comb));
    report["mapping"] = mj;

    const int lo_band = r_deep, hi_band = r_deep + 10;
    checks.add("comb_max_rank", comb_res.report.max_rank >= lo_band &&
                                    comb_res.report.max_rank <= hi_band,
               double(comb_res.report.max_rank), double(hi_band));
    checks.add("binary_max_rank", bin_res.report.max_rank == o.n / 4,
               double(bin_res.report.max_rank), double(o.n / 4));
    const double ratio = double(bin_res.report.max_rank) /
                         double(std::max(1, comb_res.report.max_rank));
    checks.add("rank_ratio", ratio >= 10.0, ratio, 10.0);

    const int root_right = wfrac.nodes[comb.node(comb.root_id).child[1]].last -
                           wfrac.nodes[comb.node(comb.root_id).child[1]].first;
    checks.add("weighted_right_share", root_right == (o.p * 3) / 4, double(root_right),
               double((o.p * 3) / 4));
    return finish(o, report, checks);
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--matrix", o.matrix,
                    "matrix kind: toeplitz-simple|toeplitz-qchem|synthetic|file");
    cmd->add_option("--n", o.n, "matrix order (taken from the file for --matrix file)")
        ->each([&o](const std::string&) { o.n_given = true; });
    cmd->add_option("--eps", o.eps, "compression tolerance");
    cmd->add_option("--leaf-size", o.leaf_size, "balanced-tree leaf size");
    cmd->add_option("--tree", o.tree_kind, "tree kind: binary|comb");
    cmd->add_option("--leaf-sizes", o.leaf_sizes, "comb leaf sizes")->delimiter(',');
    cmd->add_option("--d0", o.d0, "initial sample count");
    cmd->add_option("--delta-d", o.delta_d, "sample increment per restart");
    cmd->add_option("--gap", o.gap, "required d - rank slack (-1: oversampling default)");
    cmd->add_option("--max-d", o.max_d, "sample count cap");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--rhs", o.rhs, "right-hand-side columns");
    cmd->add_option("--ir-tol", o.ir_tol, "refinement residual tolerance");
    cmd->add_option("--json", o.json_path, "write the JSON report here");
    cmd->add_flag("--compare-dense", o.compare_dense, "run the dense oracle comparisons");
    cmd->add_flag("--timings", o.timings, "include wall-clock seconds in the report");
    cmd->add_option("--file", o.file_path, "matrix file path for --matrix file");
    cmd->add_option("--rank", o.rank, "prescribed rank for --matrix synthetic");
    cmd->add_option("--spacing", o.spacing, "grid spacing for --matrix toeplitz-qchem");
    cmd->add_option("--save-hss", o.save_hss, "save the compressed form here");
    cmd->add_option("--load-hss", o.load_hss, "load a compressed form instead of compressing");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchically semi-separable matrix toolkit"};
    app.require_subcommand(1);
    Options o;

    CLI::App* c_compress = app.add_subcommand("compress", "compress a matrix");
    add_common(c_compress, o);

    CLI::App* c_solve = app.add_subcommand("solve", "compress, factor, solve, refine");
    add_common(c_solve, o);

    CLI::App* c_matvec = app.add_subcommand("matvec-bench", "multiply through the compressed form");
    add_common(c_matvec, o);

    CLI::App* c_power = app.add_subcommand("power", "dominant eigenvalue by power iteration");
    add_common(c_power, o);
    c_power->add_option("--tol", o.tol, "relative change tolerance");
    c_power->add_option("--max-iters", o.power_max_iters, "iteration cap");

    CLI::App* c_map = app.add_subcommand("map-plan", "proportional process mapping plan");
    add_common(c_map, o);
    c_map->add_option("--p", o.p, "process count");
    c_map->add_option("--weights", o.weights, "uniform|right:FRACTION|ranks");

    CLI::App* c_comm = app.add_subcommand("comm-model", "communication cost model");
    add_common(c_comm, o);
    c_comm->add_option("--p", o.p, "process count");
    c_comm->add_option("--kind", o.kind, "dense-lu|nonrandomized|randomized");
    c_comm->add_option("--r", o.comm_r, "HSS rank parameter");

    CLI::App* c_comb = app.add_subcommand("comb-demo", "comb-versus-binary clustering demo");
    add_common(c_comb, o);
    c_comb->add_option("--p", o.p, "process count for the mapping rows");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_compress->parsed()) return cmd_compress(o);
        if (c_solve->parsed()) return cmd_solve(o);
        if (c_matvec->parsed()) return cmd_matvec_bench(o);
        if (c_power->parsed()) return cmd_power(o);
        if (c_map->parsed()) return cmd_map_plan(o);
        if (c_comm->parsed()) return cmd_comm_model(o);
        if (c_comb->parsed()) return cmd_comb_demo(o);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const hss::RankBudgetError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
