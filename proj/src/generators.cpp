#include "hss/generators.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "hss/dense_kernels.hpp"
#include "hss/errors.hpp"
#include "hss/flops.hpp"
#include "hss/rng.hpp"

namespace hss {

namespace {

// Banded-by-offset dense matrix a(i,j) = val[i - j + n - 1].
class ToeplitzSource : public MatrixSource {
public:
    ToeplitzSource(int n, std::vector<double> by_offset)
        : n_(n), val_(std::move(by_offset)) {}

    int n() const override { return n_; }

    Matrix multiply(const Matrix& X) const override { return apply(X, false); }
    Matrix multiply_transpose(const Matrix& X) const override { return apply(X, true); }

    Matrix extract(const std::vector<int>& rows, const std::vector<int>& cols) const override {
        Matrix b(int(rows.size()), int(cols.size()));
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j) b(i, j) = val_[rows[i] - cols[j] + n_ - 1];
        return b;
    }

private:
    Matrix apply(const Matrix& X, bool transpose) const {
        if (X.rows() != n_) throw std::invalid_argument("toeplitz multiply: dimension mismatch");
        int q = X.cols();
        Matrix Y(n_, q);
        add_flops(2LL * n_ * n_ * q);
        const double* xv = X.data();
        double* yv = Y.data();
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n_; ++i) {
            double* yrow = yv + std::size_t(i) * q;
            for (int j = 0; j < n_; ++j) {
                double a = transpose ? val_[j - i + n_ - 1] : val_[i - j + n_ - 1];
                const double* xrow = xv + std::size_t(j) * q;
                for (int c = 0; c < q; ++c) yrow[c] += a * xrow[c];
            }
        }
        return Y;
    }

    int n_;
    std::vector<double> val_;
};

// Orthonormal basis for the column span of g (full column rank assumed).
Matrix orthonormal_columns(const Matrix& g) {
    LqFactors f = lq_factor(g.transpose());
    return f.Qt().transpose();
}

}  // namespace

std::unique_ptr<MatrixSource> toeplitz_simple(int n) {
    if (n < 1) throw std::invalid_argument("toeplitz_simple: n must be positive");
    std::vector<double> val(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d) val[d + n - 1] = double(d);
    val[n - 1] = double(n) * double(n);
    return std::make_unique<ToeplitzSource>(n, std::move(val));
}

std::unique_ptr<MatrixSource> toeplitz_qchem(int n, double d) {
    if (n < 1) throw std::invalid_argument("toeplitz_qchem: n must be positive");
    if (d <= 0.0) throw std::invalid_argument("toeplitz_qchem: spacing must be positive");
    constexpr double pi = 3.14159265358979323846;
    std::vector<double> val(2 * n - 1);
    for (int k = -(n - 1); k <= n - 1; ++k) {
        if (k == 0)
            val[k + n - 1] = pi * pi / 6.0;
        else
            val[k + n - 1] = ((k % 2 == 0) ? 1.0 : -1.0) / (double(k) * double(k) * d * d);
    }
    return std::make_unique<ToeplitzSource>(n, std::move(val));
}

SyntheticHss make_synthetic_hss(const ClusterTree& tree, int rank, std::uint64_t seed) {
    std::vector<int> ranks(tree.num_nodes(), rank);
    ranks[tree.root_id] = 0;
    return make_synthetic_hss(tree, ranks, seed);
}

SyntheticHss make_synthetic_hss(const ClusterTree& tree, const std::vector<int>& node_ranks,
                                std::uint64_t seed) {
    if (auto bad = validate_tree(tree)) throw std::invalid_argument("make_synthetic_hss: " + *bad);
    if (int(node_ranks.size()) != tree.num_nodes())
        throw std::invalid_argument("make_synthetic_hss: one rank per node required");

    SyntheticHss s;
    s.tree = tree;
    s.node_ranks = node_ranks;
    s.node_ranks[tree.root_id] = 0;
    int nn = tree.num_nodes();
    s.D.resize(nn);
    s.U_small.resize(nn);
    s.V_small.resize(nn);
    s.B12.resize(nn);
    s.B21.resize(nn);

    std::vector<Matrix> ubig(nn), vbig(nn);
    for (int id : postorder(tree)) {
        const TreeNode& nd = tree.node(id);
        int r = s.node_ranks[id];
        if (nd.is_leaf()) {
            int m = nd.length();
            s.D[id] = generate_random(m, m, mix_seed(seed, id, 1));
            if (tree.is_root(id)) continue;
            if (r > m) throw std::invalid_argument("make_synthetic_hss: rank exceeds leaf size");
            s.U_small[id] = orthonormal_columns(generate_random(m, r, mix_seed(seed, id, 2)));
            s.V_small[id] = orthonormal_columns(generate_random(m, r, mix_seed(seed, id, 3)));
            ubig[id] = s.U_small[id];
            vbig[id] = s.V_small[id];
        } else {
            int c0 = nd.child[0], c1 = nd.child[1];
            int r0 = s.node_ranks[c0], r1 = s.node_ranks[c1];
            s.B12[id] = generate_random(r0, r1, mix_seed(seed, id, 4));
            s.B21[id] = generate_random(r1, r0, mix_seed(seed, id, 5));
            if (tree.is_root(id)) continue;
            if (r > r0 + r1)
                throw std::invalid_argument("make_synthetic_hss: rank exceeds children rank sum");
            s.U_small[id] = orthonormal_columns(generate_random(r0 + r1, r, mix_seed(seed, id, 6)));
            s.V_small[id] = orthonormal_columns(generate_random(r0 + r1, r, mix_seed(seed, id, 7)));
            ubig[id] = vstack(matmul(ubig[c0], s.U_small[id].top_rows(r0)),
                              matmul(ubig[c1], s.U_small[id].bottom_rows(r1)));
            vbig[id] = vstack(matmul(vbig[c0], s.V_small[id].top_rows(r0)),
                              matmul(vbig[c1], s.V_small[id].bottom_rows(r1)));
        }
    }

    s.dense = Matrix(tree.n, tree.n);
    for (int id = 0; id < nn; ++id) {
        const TreeNode& nd = tree.node(id);
        if (nd.is_leaf()) {
            s.dense.set_block(nd.lo, nd.lo, s.D[id]);
        } else {
            const TreeNode& n0 = tree.node(nd.child[0]);
            const TreeNode& n1 = tree.node(nd.child[1]);
            s.dense.set_block(n0.lo, n1.lo, matmul(matmul(ubig[nd.child[0]], s.B12[id]),
                                                   vbig[nd.child[1]], false, true));
            s.dense.set_block(n1.lo, n0.lo, matmul(matmul(ubig[nd.child[1]], s.B21[id]),
                                                   vbig[nd.child[0]], false, true));
        }
    }
    return s;
}

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw FormatError("matrix file: truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

}  // namespace

void save_matrix_file(const std::string& path, const Matrix& a) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("matrix file: cannot open " + path + " for writing");
    out.write("STRUDNS1", 8);
    put_u64(out, std::uint64_t(a.rows()));
    put_u64(out, std::uint64_t(a.cols()));
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) put_u64(out, std::bit_cast<std::uint64_t>(a(i, j)));
    if (!out) throw FormatError("matrix file: write failed for " + path);
}

Matrix load_matrix_dense(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("matrix file: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "STRUDNS1") throw FormatError("matrix file: bad magic");
    std::uint64_t rows = get_u64(in), cols = get_u64(in);
    if (rows > (1u << 20) || cols > (1u << 20)) throw FormatError("matrix file: implausible shape");
    Matrix a{int(rows), int(cols)};
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) a(i, j) = std::bit_cast<double>(get_u64(in));
    return a;
}

std::unique_ptr<MatrixSource> load_matrix_file(const std::string& path) {
    Matrix a = load_matrix_dense(path);
    if (a.rows() != a.cols()) throw FormatError("matrix file: source must be square");
    return std::make_unique<DenseSource>(std::move(a));
}

}  // namespace hss
