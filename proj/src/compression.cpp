#include "hss/compression.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>
#include <utility>

#include "hss/dense_kernels.hpp"
#include "hss/errors.hpp"
#include "hss/flops.hpp"
#include "hss/rng.hpp"

namespace hss {

void SamplingConfig::validate() const {
    if (d0 < 1) throw std::invalid_argument("sampling: d0 must be >= 1");
    if (delta_d < 1) throw std::invalid_argument("sampling: delta_d must be >= 1");
    if (effective_gap() < 1) throw std::invalid_argument("sampling: gap must be >= 1");
    if (max_d < d0) throw std::invalid_argument("sampling: max_d must be >= d0");
}

namespace {

enum class NodeState { Untouched, Partial, Compressed };

struct NodeWork {
    NodeState state = NodeState::Untouched;
    Matrix Sr_loc, Sc_loc;  // cached local samples until the node compresses
    std::vector<int> Jr, Jc;
    Matrix Sr, Sc;  // reduced samples, rows selected by Jr / Jc
    Matrix Rr, Rc;  // reduced random blocks V^T R^r and U^T R^c
    int cols = 0;   // sample columns folded into the reduced matrices
};

std::vector<int> iota_range(int lo, int hi) {
    std::vector<int> v(hi - lo);
    for (int i = lo; i < hi; ++i) v[i - lo] = i;
    return v;
}

std::vector<int> apply_selection(const std::vector<int>& base, const std::vector<int>& J) {
    std::vector<int> out(J.size());
    for (std::size_t t = 0; t < J.size(); ++t) out[t] = base[J[t]];
    return out;
}

}  // namespace

CompressionResult compress(const MatrixSource& source, const ClusterTree& tree, double eps,
                           const SamplingConfig& cfg) {
    cfg.validate();
    if (source.n() != tree.n) throw std::invalid_argument("compress: source size does not match tree");
    if (auto bad = validate_tree(tree)) throw std::invalid_argument("compress: " + *bad);

    const auto t_start = std::chrono::steady_clock::now();
    const long long flops_at_entry = flop_count();

    const int n = tree.n;
    const int gap = cfg.effective_gap();
    const int num_nodes = tree.num_nodes();
    const std::vector<int> order = postorder(tree);

    HssForm form;
    form.tree = tree;
    form.eps = eps;
    form.D.assign(num_nodes, Matrix());
    form.U.assign(num_nodes, PermutedBasis());
    form.V.assign(num_nodes, PermutedBasis());
    form.B12.assign(num_nodes, Matrix());
    form.B21.assign(num_nodes, Matrix());
    form.Ir.assign(num_nodes, {});
    form.Ic.assign(num_nodes, {});

    CompressionReport report;
    report.node_ranks.assign(num_nodes, 0);

    const std::uint64_t seed_r = mix_seed(cfg.seed, 1);
    const std::uint64_t seed_c = mix_seed(cfg.seed, 2);

    int d = cfg.d0;
    Matrix Rr = generate_random(n, d, seed_r);
    Matrix Rc = generate_random(n, d, seed_c);
    Matrix Sr = source.multiply(Rr);
    Matrix Sc = source.multiply_transpose(Rc);

    std::vector<NodeWork> work(num_nodes);

    // Columns [c0, d) of the local samples at a node, with the diagonal or
    // sibling-coupling contribution subtracted. For a non-leaf this reads
    // the children's reduced data, which the sweep keeps at width d.
    auto fresh_local_cols = [&](int id, int c0) -> std::pair<Matrix, Matrix> {
        const TreeNode& nd = tree.node(id);
        const int width = d - c0;
        if (nd.is_leaf()) {
            const int m = nd.length();
            Matrix sr = Sr.block(nd.lo, c0, m, width) -
                        matmul(form.D[id], Rr.block(nd.lo, c0, m, width));
            Matrix sc = Sc.block(nd.lo, c0, m, width) -
                        matmul(form.D[id], Rc.block(nd.lo, c0, m, width), true, false);
            return {std::move(sr), std::move(sc)};
        }
        const NodeWork& w1 = work[nd.child[0]];
        const NodeWork& w2 = work[nd.child[1]];
        Matrix sr1 = w1.Sr.block(0, c0, w1.Sr.rows(), width) -
                     matmul(form.B12[id], w2.Rr.block(0, c0, w2.Rr.rows(), width));
        Matrix sr2 = w2.Sr.block(0, c0, w2.Sr.rows(), width) -
                     matmul(form.B21[id], w1.Rr.block(0, c0, w1.Rr.rows(), width));
        Matrix sc1 = w1.Sc.block(0, c0, w1.Sc.rows(), width) -
                     matmul(form.B21[id], w2.Rc.block(0, c0, w2.Rc.rows(), width), true, false);
        Matrix sc2 = w2.Sc.block(0, c0, w2.Sc.rows(), width) -
                     matmul(form.B12[id], w1.Rc.block(0, c0, w1.Rc.rows(), width), true, false);
        return {vstack(sr1, sr2), vstack(sc1, sc2)};
    };

    // Columns [c0, d) of the local random blocks the node's bases act on.
    auto local_randoms = [&](int id, int c0) -> std::pair<Matrix, Matrix> {
        const TreeNode& nd = tree.node(id);
        const int width = d - c0;
        if (nd.is_leaf()) {
            const int m = nd.length();
            return {Rr.block(nd.lo, c0, m, width), Rc.block(nd.lo, c0, m, width)};
        }
        const NodeWork& w1 = work[nd.child[0]];
        const NodeWork& w2 = work[nd.child[1]];
        return {vstack(w1.Rr.block(0, c0, w1.Rr.rows(), width),
                       w2.Rr.block(0, c0, w2.Rr.rows(), width)),
                vstack(w1.Rc.block(0, c0, w1.Rc.rows(), width),
                       w2.Rc.block(0, c0, w2.Rc.rows(), width))};
    };

    // Fold sample columns [cols, d) into an already-compressed node.
    auto merge_update = [&](int id) {
        NodeWork& w = work[id];
        const int c0 = w.cols;
        if (c0 == d) return;
        auto [sr_new, sc_new] = fresh_local_cols(id, c0);
        w.Sr.append_cols(sr_new.select_rows(w.Jr));
        w.Sc.append_cols(sc_new.select_rows(w.Jc));
        auto [rr_new, rc_new] = local_randoms(id, c0);
        w.Rr.append_cols(form.V[id].apply_transpose(rr_new));
        w.Rc.append_cols(form.U[id].apply_transpose(rc_new));
        w.cols = d;
    };

    // Returns true when the node's revealed ranks were accepted and its
    // generators are final.
    auto process_node = [&](int id) -> bool {
        const TreeNode& nd = tree.node(id);
        NodeWork& w = work[id];
        if (w.state == NodeState::Untouched) {
            if (nd.is_leaf()) {
                const std::vector<int> span = iota_range(nd.lo, nd.hi);
                form.D[id] = source.extract(span, span);
            } else {
                form.B12[id] = source.extract(form.Ir[nd.child[0]], form.Ic[nd.child[1]]);
                form.B21[id] = source.extract(form.Ir[nd.child[1]], form.Ic[nd.child[0]]);
            }
            auto [sr, sc] = fresh_local_cols(id, 0);
            w.Sr_loc = std::move(sr);
            w.Sc_loc = std::move(sc);
        } else if (w.Sr_loc.cols() < d) {
            auto [sr, sc] = fresh_local_cols(id, w.Sr_loc.cols());
            w.Sr_loc.append_cols(sr);
            w.Sc_loc.append_cols(sc);
        }

        const InterpolativeDecomposition idr = id_compress(w.Sr_loc.transpose(), eps);
        const InterpolativeDecomposition idc = id_compress(w.Sc_loc.transpose(), eps);
        const bool ok_r = (d - idr.rank >= gap) || (idr.rank == w.Sr_loc.rows());
        const bool ok_c = (d - idc.rank >= gap) || (idc.rank == w.Sc_loc.rows());
        if (!ok_r || !ok_c) {
            w.state = NodeState::Partial;
            return false;
        }

        form.U[id] = basis_from_id(idr);
        form.V[id] = basis_from_id(idc);
        w.Jr = idr.J;
        w.Jc = idc.J;
        w.Sr = w.Sr_loc.select_rows(w.Jr);
        w.Sc = w.Sc_loc.select_rows(w.Jc);
        auto [rr_loc, rc_loc] = local_randoms(id, 0);
        w.Rr = form.V[id].apply_transpose(rr_loc);
        w.Rc = form.U[id].apply_transpose(rc_loc);
        if (nd.is_leaf()) {
            const std::vector<int> span = iota_range(nd.lo, nd.hi);
            form.Ir[id] = apply_selection(span, w.Jr);
            form.Ic[id] = apply_selection(span, w.Jc);
        } else {
            std::vector<int> br = form.Ir[nd.child[0]];
            br.insert(br.end(), form.Ir[nd.child[1]].begin(), form.Ir[nd.child[1]].end());
            std::vector<int> bc = form.Ic[nd.child[0]];
            bc.insert(bc.end(), form.Ic[nd.child[1]].begin(), form.Ic[nd.child[1]].end());
            form.Ir[id] = apply_selection(br, w.Jr);
            form.Ic[id] = apply_selection(bc, w.Jc);
        }
        w.Sr_loc = Matrix();
        w.Sc_loc = Matrix();
        w.state = NodeState::Compressed;
        w.cols = d;
        report.node_ranks[id] = std::max(idr.rank, idc.rank);
        return true;
    };

    auto finish_report = [&]() {
        report.d_final = d;
        report.max_rank = *std::max_element(report.node_ranks.begin(), report.node_ranks.end());
        report.flops = flop_count() - flops_at_entry;
        report.bytes = factor_bytes(form);
        report.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    bool done = false;
    while (!done) {
        bool restarted = false;
        for (int id : order) {
            if (tree.is_root(id)) {
                const TreeNode& nd = tree.node(id);
                if (nd.is_leaf()) {
                    const std::vector<int> span = iota_range(nd.lo, nd.hi);
                    form.D[id] = source.extract(span, span);
                } else {
                    form.B12[id] = source.extract(form.Ir[nd.child[0]], form.Ic[nd.child[1]]);
                    form.B21[id] = source.extract(form.Ir[nd.child[1]], form.Ic[nd.child[0]]);
                }
                continue;
            }
            NodeWork& w = work[id];
            if (w.state == NodeState::Compressed) {
                merge_update(id);
                continue;
            }
            if (process_node(id)) continue;

            if (d >= cfg.max_d) {
                finish_report();
                throw RankBudgetError(
                    "compression: rank budget exhausted, a block is still not compressed at d = " +
                        std::to_string(d),
                    report);
            }
            int partial_nodes = 0;
            for (const NodeWork& x : work) partial_nodes += (x.state == NodeState::Partial);
            if (partial_nodes != 1)
                throw ContractError(
                    "compression: more than one partially compressed node at a restart");

            const int d_new = std::min(d + cfg.delta_d, cfg.max_d);
            const int grow = d_new - d;
            Matrix rr_new = generate_random(n, grow, seed_r, d);
            Matrix rc_new = generate_random(n, grow, seed_c, d);
            Sr.append_cols(source.multiply(rr_new));
            Sc.append_cols(source.multiply_transpose(rc_new));
            Rr.append_cols(rr_new);
            Rc.append_cols(rc_new);
            d = d_new;
            report.restarts.push_back(d);
            restarted = true;
            break;
        }
        if (!restarted) done = true;
    }

    form.d_used = d;
    finish_report();
    return {std::move(form), std::move(report)};
}

}  // namespace hss
