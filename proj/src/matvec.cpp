#include "hss/matvec.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hss/dense_kernels.hpp"
#include "hss/flops.hpp"
#include "hss/rng.hpp"

namespace hss {

Matrix hss_matvec(const HssForm& h, const Matrix& X) {
    const ClusterTree& tree = h.tree;
    if (X.rows() != tree.n) throw std::invalid_argument("hss_matvec: rows(X) must equal n");
    const int q = X.cols();
    const std::vector<int> order = postorder(tree);

    if (tree.node(tree.root_id).is_leaf()) return matmul(h.D[tree.root_id], X);

    std::vector<Matrix> y(tree.num_nodes());
    for (int id : order) {
        if (tree.is_root(id)) continue;
        const TreeNode& nd = tree.node(id);
        if (nd.is_leaf()) {
            y[id] = h.V[id].apply_transpose(X.block(nd.lo, 0, nd.length(), q));
        } else {
            y[id] = h.V[id].apply_transpose(vstack(y[nd.child[0]], y[nd.child[1]]));
        }
    }

    std::vector<Matrix> z(tree.num_nodes());
    Matrix b(tree.n, q);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int id = *it;
        const TreeNode& nd = tree.node(id);
        if (nd.is_leaf()) {
            Matrix out = h.U[id].apply(z[id]) + matmul(h.D[id], X.block(nd.lo, 0, nd.length(), q));
            b.set_block(nd.lo, 0, out);
            continue;
        }
        const int c1 = nd.child[0], c2 = nd.child[1];
        Matrix z1 = matmul(h.B12[id], y[c2]);
        Matrix z2 = matmul(h.B21[id], y[c1]);
        if (!tree.is_root(id)) {
            Matrix uz = h.U[id].apply(z[id]);
            z1 = z1 + uz.top_rows(z1.rows());
            z2 = z2 + uz.bottom_rows(z2.rows());
        }
        z[c1] = std::move(z1);
        z[c2] = std::move(z2);
    }
    return b;
}

PowerMethodResult power_method(const std::function<Matrix(const Matrix&)>& apply, int n,
                               double tol, int max_iters, std::uint64_t seed) {
    PowerMethodResult res;
    Matrix v = generate_random(n, 1, seed);
    const double nv = v.frob_norm();
    v = (1.0 / nv) * v;

    double lambda_prev = 0.0;
    bool have_prev = false;
    for (int it = 1; it <= max_iters; ++it) {
        Matrix w = apply(v);
        double lambda = 0.0;
        for (int i = 0; i < n; ++i) lambda += v(i, 0) * w(i, 0);
        res.eigenvalue = lambda;
        res.iterations = it;
        if (have_prev) {
            const double denom = std::fabs(lambda);
            if (std::fabs(lambda - lambda_prev) <= tol * denom ||
                (lambda == 0.0 && lambda_prev == 0.0)) {
                res.converged = true;
                res.iterations = it - 1;  // the estimate stopped changing one step earlier
                break;
            }
        }
        lambda_prev = lambda;
        have_prev = true;
        const double nw = w.frob_norm();
        if (nw == 0.0) {
            res.eigenvalue = 0.0;
            res.converged = true;
            break;
        }
        v = (1.0 / nw) * w;
    }
    return res;
}

PowerMethodResult power_method(const MatrixSource& source, double tol, int max_iters,
                               std::uint64_t seed) {
    return power_method([&](const Matrix& x) { return source.multiply(x); }, source.n(), tol,
                        max_iters, seed);
}

PowerMethodResult power_method(const HssForm& h, double tol, int max_iters, std::uint64_t seed) {
    return power_method([&](const Matrix& x) { return hss_matvec(h, x); }, h.tree.n, tol,
                        max_iters, seed);
}

}  // namespace hss
