#include "hss/ulv.hpp"

#include <stdexcept>
#include <utility>

#include "hss/errors.hpp"
#include "hss/flops.hpp"

namespace hss {

namespace {

// out = [-E I; I 0] * Pi^T * M without forming the transform densely:
// gather rows in pivot order, then fold the first k gathered rows into the
// rest through E.
Matrix apply_row_transform(const PermutedBasis& u, const Matrix& M) {
    const int m = u.expanded_rows();
    const int k = u.rank;
    const int q = M.cols();
    if (M.rows() != m) throw ContractError("ulv: row transform size mismatch");
    Matrix T(m, q);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < q; ++j) T(i, j) = M(u.perm[i], j);
    if (k == 0) return T;
    Matrix top = T.top_rows(k);
    Matrix out(m, q);
    if (m > k) {
        Matrix folded = T.bottom_rows(m - k) - matmul(u.E, top);
        out.set_block(0, 0, folded);
    }
    out.set_block(m - k, 0, top);
    return out;
}

}  // namespace

UlvFactors ulv_factor(const HssForm& h) {
    const ClusterTree& tree = h.tree;
    UlvFactors f;
    f.tree = tree;
    f.n = tree.n;
    const int nn = tree.num_nodes();
    f.omega = h.U;
    f.vsmall = h.V;
    f.B12 = h.B12;
    f.B21 = h.B21;
    f.W.assign(nn, Matrix());
    f.L.assign(nn, Matrix());
    f.Q.assign(nn, Matrix());
    f.Vt.assign(nn, Matrix());
    f.Vhat.assign(nn, Matrix());
    f.Dtilde.assign(nn, Matrix());
    f.krow.assign(nn, 0);

    for (int id : postorder(tree)) {
        const TreeNode& nd = tree.node(id);
        const bool root = tree.is_root(id);
        Matrix Dblk;
        Matrix Vhat;
        if (nd.is_leaf()) {
            Dblk = h.D[id];
            if (!root) Vhat = h.V[id].expand();
        } else {
            const int c1 = nd.child[0], c2 = nd.child[1];
            const Matrix& Vt1 = f.Vt[c1];
            const Matrix& Vt2 = f.Vt[c2];
            const int k1 = f.krow[c1], k2 = f.krow[c2];
            Matrix V1b = Vt1.bottom_rows(k1);
            Matrix V2b = Vt2.bottom_rows(k2);
            Dblk = vstack(hstack(f.Dtilde[c1], matmul(h.B12[id], V2b, false, true)),
                          hstack(matmul(h.B21[id], V1b, false, true), f.Dtilde[c2]));
            if (!root) {
                Matrix vx = h.V[id].expand();
                const int rc1 = V1b.cols(), rc2 = V2b.cols();
                if (vx.rows() != rc1 + rc2)
                    throw ContractError("ulv_factor: column basis does not match child ranks");
                Vhat = vstack(matmul(V1b, vx.top_rows(rc1)), matmul(V2b, vx.bottom_rows(rc2)));
            }
        }

        if (root) {
            f.root_size = Dblk.rows();
            f.root_plu = plu_factor(Dblk);
            continue;
        }

        const PermutedBasis& u = h.U[id];
        const int m = Dblk.rows();
        if (u.expanded_rows() != m)
            throw ContractError("ulv_factor: diagonal block and row basis disagree");
        const int k = u.rank;
        f.krow[id] = k;
        f.Vhat[id] = Vhat;

        Matrix Wfull = apply_row_transform(u, Dblk);
        LqFactors lf = lq_factor(Wfull.top_rows(m - k));
        f.L[id] = std::move(lf.L);
        f.Vt[id] = matmul(lf.Q, Vhat);
        f.Dtilde[id] = matmul(Wfull.bottom_rows(k), lf.Q.bottom_rows(k), false, true);
        f.Q[id] = std::move(lf.Q);
        f.W[id] = std::move(Wfull);
    }
    return f;
}

Matrix ulv_solve(const UlvFactors& f, const Matrix& b) {
    const ClusterTree& tree = f.tree;
    if (b.rows() != f.n) throw std::invalid_argument("ulv_solve: rows(b) must equal n");
    const int q = b.cols();
    const std::vector<int> order = postorder(tree);
    const int nn = tree.num_nodes();

    std::vector<Matrix> y(nn), z(nn), bbot(nn);
    Matrix root_rhs;

    for (int id : order) {
        const TreeNode& nd = tree.node(id);
        Matrix bt;
        if (nd.is_leaf()) {
            bt = b.block(nd.lo, 0, nd.length(), q);
        } else {
            const int c1 = nd.child[0], c2 = nd.child[1];
            const int k1 = f.krow[c1], k2 = f.krow[c2];
            const int m1 = f.Q[c1].rows(), m2 = f.Q[c2].rows();
            Matrix top = bbot[c1] -
                         matmul(f.W[c1].bottom_rows(k1),
                                matmul(f.Q[c1].top_rows(m1 - k1), y[c1], true, false)) -
                         matmul(f.B12[id], z[c2]);
            Matrix bot = bbot[c2] - matmul(f.B21[id], z[c1]) -
                         matmul(f.W[c2].bottom_rows(k2),
                                matmul(f.Q[c2].top_rows(m2 - k2), y[c2], true, false));
            bt = vstack(top, bot);
        }
        if (tree.is_root(id)) {
            root_rhs = std::move(bt);
            continue;
        }
        const PermutedBasis& u = f.omega[id];
        const int m = u.expanded_rows(), k = u.rank;
        Matrix btil = apply_row_transform(u, bt);
        y[id] = solve_lower(f.L[id], btil.top_rows(m - k));
        bbot[id] = btil.bottom_rows(k);
        Matrix zloc = matmul(f.Vt[id].top_rows(m - k), y[id], true, false);
        if (!nd.is_leaf())
            zloc = zloc + f.vsmall[id].apply_transpose(vstack(z[nd.child[0]], z[nd.child[1]]));
        z[id] = std::move(zloc);
    }

    Matrix xroot = solve_plu(f.root_plu, root_rhs);
    const TreeNode& rootnd = tree.node(tree.root_id);
    if (rootnd.is_leaf()) return xroot;

    std::vector<Matrix> xpart(nn);
    xpart[rootnd.child[0]] = xroot.top_rows(f.krow[rootnd.child[0]]);
    xpart[rootnd.child[1]] = xroot.bottom_rows(f.krow[rootnd.child[1]]);

    Matrix x(f.n, q);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int id = *it;
        if (tree.is_root(id)) continue;
        const TreeNode& nd = tree.node(id);
        Matrix xt = matmul(f.Q[id], vstack(y[id], xpart[id]), true, false);
        if (nd.is_leaf()) {
            x.set_block(nd.lo, 0, xt);
        } else {
            xpart[nd.child[0]] = xt.top_rows(f.krow[nd.child[0]]);
            xpart[nd.child[1]] = xt.bottom_rows(f.krow[nd.child[1]]);
        }
    }
    return x;
}

RefinementResult iterative_refinement(const MatrixSource& source, const UlvFactors& f,
                                      const Matrix& b, double tol, int max_iters) {
    RefinementResult r;
    const double bnorm = b.frob_norm();
    if (bnorm == 0.0) {
        r.x = Matrix(b.rows(), b.cols());
        r.residuals.push_back(0.0);
        r.converged = true;
        return r;
    }
    r.x = ulv_solve(f, b);
    double prev = 0.0;
    bool have_prev = false;
    int bad_streak = 0;
    for (int it = 0;; ++it) {
        Matrix res = b - source.multiply(r.x);
        const double rel = res.frob_norm() / bnorm;
        r.residuals.push_back(rel);
        r.iterations = it;
        if (rel <= tol) {
            r.converged = true;
            break;
        }
        if (it == max_iters) break;
        if (have_prev && rel >= prev) {
            if (++bad_streak >= 3) {
                r.diverged = true;
                break;
            }
        } else {
            bad_streak = 0;
        }
        prev = rel;
        have_prev = true;
        r.x = r.x + ulv_solve(f, res);
    }
    return r;
}

std::uint64_t ulv_bytes(const UlvFactors& f) {
    auto mat = [](const Matrix& m) { return std::uint64_t(m.rows()) * std::uint64_t(m.cols()); };
    std::uint64_t reals = 0, idx = 0;
    for (const Matrix& m : f.W) reals += mat(m);
    for (const Matrix& m : f.L) reals += mat(m);
    for (const Matrix& m : f.Q) reals += mat(m);
    for (const Matrix& m : f.Vt) reals += mat(m);
    for (const Matrix& m : f.Vhat) reals += mat(m);
    for (const Matrix& m : f.Dtilde) reals += mat(m);
    reals += mat(f.root_plu.L) + mat(f.root_plu.U);
    idx += f.root_plu.perm.size();
    return 8 * (reals + idx);
}

}  // namespace hss
