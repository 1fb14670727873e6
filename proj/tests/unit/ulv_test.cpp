#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "hss/cluster_tree.hpp"
#include "hss/compression.hpp"
#include "hss/dense_kernels.hpp"
#include "hss/generators.hpp"
#include "hss/hss_form.hpp"
#include "hss/matrix.hpp"
#include "hss/matrix_source.hpp"
#include "hss/rng.hpp"
#include "hss/ulv.hpp"

using hss::Matrix;
using testutil::dense_omega;
using testutil::naive_matmul;
using testutil::rel_fro;

namespace {

Matrix diagonal_dominant(int n, unsigned long long seed) {
    Matrix a = hss::generate_random(n, n, seed);
    for (int i = 0; i < n; ++i) a(i, i) += 2.0 * n;
    return a;
}

hss::CompressionResult compress_dense(const Matrix& a, int leaf_size, double eps,
                                      hss::SamplingConfig cfg = {}) {
    hss::DenseSource src(a);
    hss::ClusterTree tree = hss::build_balanced_tree(a.rows(), leaf_size);
    return hss::compress(src, tree, eps, cfg);
}

// Block-diagonal embedding helpers for the dense transform expansion.
Matrix block_diag(const std::vector<Matrix>& blocks) {
    int n = 0;
    for (const auto& b : blocks) n += b.rows();
    Matrix out(n, n);
    int off = 0;
    for (const auto& b : blocks) {
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j) out(off + i, off + j) = b(i, j);
        off += b.rows();
    }
    return out;
}

// Permutation that swaps two adjacent segments [a, a+la) and [a+la, a+la+lb)
// inside an n-length identity.
Matrix swap_segments(int n, int a, int la, int lb) {
    Matrix p(n, n);
    std::vector<int> dest(n);
    int idx = 0;
    for (int i = 0; i < a; ++i) dest[idx++] = i;
    for (int i = 0; i < lb; ++i) dest[idx++] = a + la + i;
    for (int i = 0; i < la; ++i) dest[idx++] = a + i;
    for (int i = a + la + lb; i < n; ++i) dest[idx++] = i;
    for (int r = 0; r < n; ++r) p(r, dest[r]) = 1.0;
    return p;
}

}  // namespace

TEST_CASE("identity system solves to the right-hand side") {
    hss::SamplingConfig cfg;
    cfg.d0 = 16;
    auto res = compress_dense(Matrix::identity(64), 16, 1e-10, cfg);
    hss::UlvFactors f = hss::ulv_factor(res.form);
    Matrix b = hss::generate_random(64, 2, 51);
    CHECK((hss::ulv_solve(f, b) - b).max_abs() <= 1e-13);
}

TEST_CASE("block-diagonal system decouples into leaf solves") {
    const int n = 48, leaf = 12;
    hss::ClusterTree tree = hss::build_balanced_tree(n, leaf);
    Matrix a(n, n);
    for (int base = 0; base < n; base += leaf) {
        Matrix blk = diagonal_dominant(leaf, 52 + base);
        for (int i = 0; i < leaf; ++i)
            for (int j = 0; j < leaf; ++j) a(base + i, base + j) = blk(i, j);
    }
    hss::DenseSource src(a);
    hss::SamplingConfig cfg;
    cfg.d0 = 12;
    auto res = hss::compress(src, tree, 1e-10, cfg);
    REQUIRE(res.report.max_rank == 0);

    hss::UlvFactors f = hss::ulv_factor(res.form);
    Matrix b = hss::generate_random(n, 1, 53);
    Matrix x = hss::ulv_solve(f, b);

    for (int base = 0; base < n; base += leaf) {
        Matrix blk = a.block(base, base, leaf, leaf);
        Matrix bloc = b.block(base, 0, leaf, 1);
        Matrix xloc = hss::solve_plu(hss::plu_factor(blk), bloc);
        Matrix got = x.block(base, 0, leaf, 1);
        CHECK((got - xloc).frob_norm() <= 1e-12 * xloc.frob_norm());
    }
}

TEST_CASE("reduced root block collects the children's row ranks") {
    hss::ClusterTree tree = hss::build_balanced_tree(512, 128);
    hss::SyntheticHss syn = hss::make_synthetic_hss(tree, 11, 54);
    hss::DenseSource src(syn.dense);
    auto res = hss::compress(src, tree, 1e-10, {});
    hss::UlvFactors f = hss::ulv_factor(res.form);
    const auto& root = tree.node(tree.root_id);
    CHECK(f.root_size ==
          res.form.row_rank(root.child[0]) + res.form.row_rank(root.child[1]));
}

TEST_CASE("elimination transform is the permuted coefficient stack") {
    hss::ClusterTree tree = hss::build_balanced_tree(96, 24);
    hss::SyntheticHss syn = hss::make_synthetic_hss(tree, 4, 55);
    hss::DenseSource src(syn.dense);
    auto res = hss::compress(src, tree, 1e-10, {});
    hss::UlvFactors f = hss::ulv_factor(res.form);

    for (const auto& nd : tree.nodes) {
        if (!nd.is_leaf() || nd.id == tree.root_id) continue;
        Matrix omega = dense_omega(res.form.U[nd.id]);
        const int m = nd.length(), k = res.form.row_rank(nd.id);
        // Annihilation: omega applied to the expanded basis leaves [0; I].
        Matrix ou = naive_matmul(omega, res.form.U[nd.id].expand());
        for (int i = 0; i < m - k; ++i)
            for (int j = 0; j < k; ++j) CHECK(std::fabs(ou(i, j)) <= 1e-13);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                CHECK(ou(m - k + i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
        // The stored W is omega times the leaf diagonal block.
        Matrix w_dense = naive_matmul(omega, res.form.D[nd.id]);
        CHECK((f.W[nd.id] - w_dense).max_abs() <= 1e-12);
    }
}

TEST_CASE("eliminated rows factor as a lower-triangular times orthonormal rows") {
    hss::ClusterTree tree = hss::build_balanced_tree(256, 64);
    hss::SyntheticHss syn = hss::make_synthetic_hss(tree, 7, 56);
    hss::DenseSource src(syn.dense);
    auto res = hss::compress(src, tree, 1e-10, {});
    hss::UlvFactors f = hss::ulv_factor(res.form);
    for (const auto& nd : tree.nodes) {
        if (nd.id == tree.root_id) continue;
        const int k = res.form.row_rank(nd.id);
        const int m = f.W[nd.id].rows();
        CHECK(f.krow[nd.id] == k);
        Matrix wt = f.W[nd.id].top_rows(m - k);
        Matrix rec = hss::matmul(f.L[nd.id], f.Q[nd.id].top_rows(m - k));
        if (wt.rows() == 0) continue;
        CHECK((rec - wt).frob_norm() <= 1e-12 * std::max(1.0, wt.frob_norm()));
        Matrix qqt = hss::matmul(f.Q[nd.id], f.Q[nd.id], false, true);
        CHECK((qqt - Matrix::identity(f.Q[nd.id].rows())).frob_norm() <= 1e-11);
    }
}

TEST_CASE("dense expansion of the two-stage transformation") {
    // Three-level tree, small enough to expand every factor densely.
    const int n = 64, leaf = 16;
    hss::ClusterTree tree = hss::build_balanced_tree(n, leaf);
    REQUIRE(tree.num_nodes() == 7);
    hss::SyntheticHss syn = hss::make_synthetic_hss(tree, 3, 57);
    hss::DenseSource src(syn.dense);
    auto res = hss::compress(src, tree, 1e-12, {});
    hss::UlvFactors f = hss::ulv_factor(res.form);
    const hss::HssForm& h = res.form;

    // ids: root 0, internal 1 and 2, leaves 3..6 left to right.
    auto krow = [&](int id) { return h.row_rank(id); };
    const int k3 = krow(3), k4 = krow(4), k5 = krow(5), k6 = krow(6);
    const int k1 = krow(1), k2 = krow(2);

    // Left transform: leaf eliminations, sibling swaps, then the internal
    // level's eliminations acting on the surviving rows.
    Matrix left_leaf = block_diag({dense_omega(h.U[3]), dense_omega(h.U[4]),
                                   dense_omega(h.U[5]), dense_omega(h.U[6])});
    Matrix swap_l = naive_matmul(swap_segments(n, 16 - k3, k3, 16 - k4),
                                 swap_segments(n, 32 + 16 - k5, k5, 16 - k6));
    const int t1 = 32 - k3 - k4;  // rows already finished in the left half
    const int t2 = 32 - k5 - k6;
    Matrix mid = block_diag({Matrix::identity(t1), dense_omega(h.U[1]),
                             Matrix::identity(t2), dense_omega(h.U[2])});
    // Move the left node's surviving rows past everything the right half has
    // already finished, so the reduced root rows end up contiguous at the tail.
    Matrix swap_root =
        swap_segments(n, t1 + (k3 + k4 - k1), k1, t2 + (k5 + k6 - k2));
    Matrix t_left =
        naive_matmul(swap_root, naive_matmul(mid, naive_matmul(swap_l, left_leaf)));

    // Right transform mirrors it with the orthogonal factors.
    Matrix right_leaf = block_diag({f.Q[3].transpose(), f.Q[4].transpose(),
                                    f.Q[5].transpose(), f.Q[6].transpose()});
    const int kc3 = h.col_rank(3), kc4 = h.col_rank(4), kc5 = h.col_rank(5),
              kc6 = h.col_rank(6);
    Matrix swap_r = naive_matmul(swap_segments(n, 16 - kc3, kc3, 16 - kc4),
                                 swap_segments(n, 32 + 16 - kc5, kc5, 16 - kc6));
    const int s1 = 32 - kc3 - kc4, s2 = 32 - kc5 - kc6;
    Matrix mid_r = block_diag({Matrix::identity(s1), f.Q[1].transpose(),
                               Matrix::identity(s2), f.Q[2].transpose()});
    const int kc1 = h.col_rank(1), kc2 = h.col_rank(2);
    Matrix swap_root_r =
        swap_segments(n, s1 + (kc3 + kc4 - kc1), kc1, s2 + (kc5 + kc6 - kc2));
    Matrix t_right = naive_matmul(naive_matmul(naive_matmul(right_leaf, swap_r.transpose()),
                                               mid_r),
                                  swap_root_r.transpose());

    Matrix m = naive_matmul(naive_matmul(t_left, syn.dense), t_right);

    // With equal row and column ranks the diagonal blocks are square and lower
    // triangular, so every entry strictly above the diagonal in the leading
    // rows must vanish.
    REQUIRE(k3 == kc3);
    REQUIRE(k4 == kc4);
    REQUIRE(k5 == kc5);
    REQUIRE(k6 == kc6);
    REQUIRE(k1 == kc1);
    REQUIRE(k2 == kc2);
    const int reduced = k1 + k2;
    const double scale = syn.dense.frob_norm();
    double worst_upper = 0.0;
    for (int i = 0; i < n - reduced; ++i)
        for (int j = i + 1; j < n; ++j)
            worst_upper = std::max(worst_upper, std::fabs(m(i, j)));
    CHECK(worst_upper <= 1e-9 * scale);

    // The surviving diagonal blocks are exactly the stored triangular factors,
    // in elimination order: both leaf pairs, then the internal nodes.
    struct Slot {
        int id, offset;
    };
    const Slot slots[] = {{3, 0},
                          {4, 16 - k3},
                          {1, t1},
                          {5, t1 + (k3 + k4 - k1)},
                          {6, t1 + (k3 + k4 - k1) + (16 - k5)},
                          {2, t1 + (k3 + k4 - k1) + (32 - k5 - k6)}};
    for (const Slot& s : slots) {
        const Matrix& l = f.L[s.id];
        Matrix got = m.block(s.offset, s.offset, l.rows(), l.cols());
        CHECK((got - l).max_abs() <= 1e-9 * scale);
    }

    // Trailing reduced block equals the root system that was LU-factored.
    Matrix d0(reduced, reduced);
    for (int i = 0; i < reduced; ++i)
        for (int j = 0; j < reduced; ++j) d0(i, j) = m(n - reduced + i, n - reduced + j);
    // Rebuild D_0 from its stored pivoted factorization.
    Matrix lu = naive_matmul(f.root_plu.L, f.root_plu.U);
    Matrix d0_stored(reduced, reduced);
    for (int i = 0; i < reduced; ++i)
        for (int j = 0; j < reduced; ++j) d0_stored(f.root_plu.perm[i], j) = lu(i, j);
    CHECK((d0 - d0_stored).frob_norm() <= 1e-10 * std::max(1.0, d0_stored.frob_norm()));

    // And solving through the dense transform agrees with the structured solve.
    Matrix b = hss::generate_random(n, 1, 58);
    Matrix x_struct = hss::ulv_solve(f, b);
    Matrix w = hss::solve_plu(hss::plu_factor(m), naive_matmul(t_left, b));
    Matrix x_dense = naive_matmul(t_right, w);
    CHECK((x_struct - x_dense).frob_norm() <= 1e-9 * x_dense.frob_norm());
}

TEST_CASE("structured solve matches a dense factorization") {
    const int n = 512;
    hss::ClusterTree tree = hss::build_balanced_tree(n, 128);
    hss::SyntheticHss syn = hss::make_synthetic_hss(tree, 13, 59);
    // Shift the diagonal so the system is comfortably nonsingular.
    Matrix a = syn.dense;
    for (int i = 0; i < n; ++i) a(i, i) += 4.0;
    hss::DenseSource src(a);
    auto res = hss::compress(src, tree, 1e-10, {});
    hss::UlvFactors f = hss::ulv_factor(res.form);
    Matrix b = hss::generate_random(n, 2, 60);
    Matrix x = hss::ulv_solve(f, b);

    Matrix xd = hss::solve_plu(hss::plu_factor(a), b);
    CHECK(rel_fro(x, xd) <= 1e-7);
    Matrix r = src.multiply(x) - b;
    CHECK(r.frob_norm() / b.frob_norm() <= 1e-8);
}

TEST_CASE("structured solve agrees with dense over many seeds") {
    const int n = 256;
    hss::ClusterTree tree = hss::build_balanced_tree(n, 64);
    for (int trial = 0; trial < 50; ++trial) {
        hss::SyntheticHss syn = hss::make_synthetic_hss(tree, 3 + trial % 8, 600 + trial);
        Matrix a = syn.dense;
        for (int i = 0; i < n; ++i) a(i, i) += 3.0;
        hss::DenseSource src(a);
        hss::SamplingConfig cfg;
        cfg.d0 = 32;
        auto res = hss::compress(src, tree, 1e-12, cfg);
        hss::UlvFactors f = hss::ulv_factor(res.form);
        Matrix b = hss::generate_random(n, 1, 700 + trial);
        Matrix x = hss::ulv_solve(f, b);
        Matrix xd = hss::solve_plu(hss::plu_factor(a), b);
        CHECK(rel_fro(x, xd) <= 1e-8);
    }
}

TEST_CASE("refinement converges immediately on a tight factorization") {
    const int n = 384;
    hss::ClusterTree tree = hss::build_balanced_tree(n, 96);
    hss::SyntheticHss syn = hss::make_synthetic_hss(tree, 6, 61);
    Matrix a = syn.dense;
    for (int i = 0; i < n; ++i) a(i, i) += 3.0;
    hss::DenseSource src(a);
    auto res = hss::compress(src, tree, 1e-12, {});
    hss::UlvFactors f = hss::ulv_factor(res.form);
    Matrix b = hss::generate_random(n, 1, 62);
    auto ir = hss::iterative_refinement(src, f, b, 1e-12, 10);
    CHECK(ir.converged);
    CHECK(ir.iterations <= 2);
    CHECK(ir.residuals.back() <= 1e-12);
    for (size_t i = 1; i < ir.residuals.size(); ++i)
        CHECK(ir.residuals[i] <= ir.residuals[i - 1]);
}

TEST_CASE("refinement polishes a loose factorization") {
    const int n = 256;
    hss::ClusterTree tree = hss::build_balanced_tree(n, 64);
    hss::SyntheticHss syn = hss::make_synthetic_hss(tree, 8, 63);
    Matrix a = syn.dense;
    for (int i = 0; i < n; ++i) a(i, i) += 5.0;
    hss::DenseSource src(a);
    auto res = hss::compress(src, tree, 1e-4, {});
    hss::UlvFactors f = hss::ulv_factor(res.form);
    Matrix b = hss::generate_random(n, 1, 64);
    auto ir = hss::iterative_refinement(src, f, b, 1e-12, 25);
    CHECK(ir.converged);
    CHECK(ir.iterations <= 25);
    CHECK(ir.residuals.back() <= 1e-12);
}

TEST_CASE("refinement flags divergence instead of spinning") {
    // Factor one matrix but refine against a different operator: the
    // correction loop cannot make progress and must flag divergence.
    const int n = 128;
    hss::ClusterTree tree = hss::build_balanced_tree(n, 32);
    hss::SyntheticHss syn = hss::make_synthetic_hss(tree, 5, 65);
    Matrix a = syn.dense;
    for (int i = 0; i < n; ++i) a(i, i) += 3.0;
    hss::DenseSource src(a);
    auto res = hss::compress(src, tree, 1e-10, {});
    hss::UlvFactors f = hss::ulv_factor(res.form);

    Matrix wrong = hss::generate_random(n, n, 66);
    for (int i = 0; i < n; ++i) wrong(i, i) += 3.0;
    hss::DenseSource other(wrong);
    Matrix b = hss::generate_random(n, 1, 67);
    auto ir = hss::iterative_refinement(other, f, b, 1e-12, 50);
    CHECK_FALSE(ir.converged);
    CHECK(ir.diverged);
    CHECK(ir.iterations < 50);
}

TEST_CASE("zero right-hand side returns a zero solution") {
    hss::ClusterTree tree = hss::build_balanced_tree(96, 24);
    hss::SyntheticHss syn = hss::make_synthetic_hss(tree, 3, 68);
    Matrix a = syn.dense;
    for (int i = 0; i < 96; ++i) a(i, i) += 2.0;
    hss::DenseSource src(a);
    auto res = hss::compress(src, tree, 1e-10, {});
    hss::UlvFactors f = hss::ulv_factor(res.form);
    Matrix zero(96, 1);
    auto ir = hss::iterative_refinement(src, f, zero, 1e-12, 5);
    CHECK(ir.converged);
    CHECK(hss::ulv_solve(f, zero).max_abs() == 0.0);
}
