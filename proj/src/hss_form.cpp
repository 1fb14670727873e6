#include "hss/hss_form.hpp"

#include <bit>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "hss/errors.hpp"
#include "hss/flops.hpp"

namespace hss {

Matrix PermutedBasis::expand() const {
    int m = expanded_rows();
    Matrix u(m, rank);
    for (int i = 0; i < rank; ++i) u(perm[i], i) = 1.0;
    for (int t = 0; t < E.rows(); ++t)
        for (int j = 0; j < rank; ++j) u(perm[rank + t], j) = E(t, j);
    return u;
}

Matrix PermutedBasis::apply(const Matrix& w) const {
    if (w.rows() != rank) throw std::invalid_argument("PermutedBasis::apply: dimension mismatch");
    int m = expanded_rows(), q = w.cols();
    Matrix out(m, q);
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < q; ++j) out(perm[i], j) = w(i, j);
    if (E.rows() > 0) {
        Matrix ew = matmul(E, w);
        for (int t = 0; t < E.rows(); ++t)
            for (int j = 0; j < q; ++j) out(perm[rank + t], j) = ew(t, j);
    }
    return out;
}

Matrix PermutedBasis::apply_transpose(const Matrix& v) const {
    int m = expanded_rows(), q = v.cols();
    if (v.rows() != m) throw std::invalid_argument("PermutedBasis::apply_transpose: dimension mismatch");
    Matrix out(rank, q);
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < q; ++j) out(i, j) = v(perm[i], j);
    if (E.rows() > 0) {
        Matrix vb(E.rows(), q);
        for (int t = 0; t < E.rows(); ++t)
            for (int j = 0; j < q; ++j) vb(t, j) = v(perm[rank + t], j);
        out = out + matmul(E, vb, true, false);
    }
    return out;
}

PermutedBasis basis_from_id(const InterpolativeDecomposition& id) {
    PermutedBasis b;
    b.perm = id.perm;
    b.rank = id.rank;
    int m = int(id.perm.size());
    b.E = Matrix(m - id.rank, id.rank);
    for (int t = 0; t < b.E.rows(); ++t)
        for (int i = 0; i < id.rank; ++i) b.E(t, i) = id.X(i, id.perm[id.rank + t]);
    return b;
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ContractError("corrupt form: " + what);
}

}  // namespace

Matrix reconstruct_dense(const HssForm& h) {
    const ClusterTree& tree = h.tree;
    int nn = tree.num_nodes();
    std::vector<Matrix> ubig(nn), vbig(nn);

    for (int id : postorder(tree)) {
        const TreeNode& nd = tree.node(id);
        if (tree.is_root(id)) continue;
        const PermutedBasis& u = h.U[id];
        const PermutedBasis& v = h.V[id];
        if (nd.is_leaf()) {
            require(u.expanded_rows() == nd.length(), "leaf U rows != interval length");
            require(v.expanded_rows() == nd.length(), "leaf V rows != interval length");
            ubig[id] = u.expand();
            vbig[id] = v.expand();
        } else {
            int c0 = nd.child[0], c1 = nd.child[1];
            int r0 = h.row_rank(c0), r1 = h.row_rank(c1);
            int s0 = h.col_rank(c0), s1 = h.col_rank(c1);
            require(u.expanded_rows() == r0 + r1, "nested U rows != children row rank sum");
            require(v.expanded_rows() == s0 + s1, "nested V rows != children col rank sum");
            Matrix ue = u.expand(), ve = v.expand();
            ubig[id] = vstack(matmul(ubig[c0], ue.top_rows(r0)), matmul(ubig[c1], ue.bottom_rows(r1)));
            vbig[id] = vstack(matmul(vbig[c0], ve.top_rows(s0)), matmul(vbig[c1], ve.bottom_rows(s1)));
        }
    }

    Matrix a(tree.n, tree.n);
    for (int id = 0; id < nn; ++id) {
        const TreeNode& nd = tree.node(id);
        if (nd.is_leaf()) {
            require(h.D[id].rows() == nd.length() && h.D[id].cols() == nd.length(),
                    "leaf D shape mismatch");
            a.set_block(nd.lo, nd.lo, h.D[id]);
        } else {
            int c0 = nd.child[0], c1 = nd.child[1];
            require(h.B12[id].rows() == h.row_rank(c0) && h.B12[id].cols() == h.col_rank(c1),
                    "B12 shape mismatch");
            require(h.B21[id].rows() == h.row_rank(c1) && h.B21[id].cols() == h.col_rank(c0),
                    "B21 shape mismatch");
            const TreeNode& n0 = tree.node(c0);
            const TreeNode& n1 = tree.node(c1);
            a.set_block(n0.lo, n1.lo, matmul(matmul(ubig[c0], h.B12[id]), vbig[c1], false, true));
            a.set_block(n1.lo, n0.lo, matmul(matmul(ubig[c1], h.B21[id]), vbig[c0], false, true));
        }
    }
    return a;
}

int hss_max_rank(const HssForm& h) {
    int r = 0;
    for (int id = 0; id < h.tree.num_nodes(); ++id) {
        if (h.tree.is_root(id)) continue;
        r = std::max(r, std::max(h.U[id].rank, h.V[id].rank));
    }
    return r;
}

std::uint64_t factor_bytes(const HssForm& h) {
    std::uint64_t reals = 0, indices = 0;
    for (int id = 0; id < h.tree.num_nodes(); ++id) {
        const TreeNode& nd = h.tree.node(id);
        if (nd.is_leaf()) reals += std::uint64_t(h.D[id].rows()) * h.D[id].cols();
        if (!nd.is_leaf()) {
            reals += std::uint64_t(h.B12[id].rows()) * h.B12[id].cols();
            reals += std::uint64_t(h.B21[id].rows()) * h.B21[id].cols();
        }
        if (!h.tree.is_root(id)) {
            reals += std::uint64_t(h.U[id].E.rows()) * h.U[id].E.cols();
            reals += std::uint64_t(h.V[id].E.rows()) * h.V[id].E.cols();
            indices += h.U[id].perm.size() + h.V[id].perm.size();
        }
        indices += h.Ir[id].size() + h.Ic[id].size();
    }
    return 8 * (reals + indices);
}

double memory_overhead(std::uint64_t hss_bytes, std::uint64_t ulv_bytes, std::uint64_t aux_bytes,
                       std::uint64_t dense_bytes) {
    double str = double(hss_bytes + ulv_bytes + aux_bytes);
    if (str == 0.0) return 0.0;
    return (str - double(dense_bytes)) / str;
}

double memory_overhead_alt(std::uint64_t hss_bytes, std::uint64_t ulv_bytes, std::uint64_t aux_bytes,
                           std::uint64_t dense_bytes) {
    double str = double(hss_bytes + ulv_bytes + aux_bytes);
    if (dense_bytes == 0) return 0.0;
    return (str - double(dense_bytes)) / double(dense_bytes);
}

int hankel_rank_oracle(const MatrixSource& source, const ClusterTree& tree, int node_id,
                       double eps, int dense_cap) {
    if (source.n() > dense_cap)
        throw std::invalid_argument("hankel_rank_oracle: n exceeds the dense formation cap");
    const TreeNode& nd = tree.node(node_id);
    std::vector<int> rows, cols;
    for (int i = nd.lo; i < nd.hi; ++i) rows.push_back(i);
    for (int i = 0; i < tree.n; ++i)
        if (i < nd.lo || i >= nd.hi) cols.push_back(i);
    if (cols.empty()) return 0;
    Matrix strip = source.extract(rows, cols);
    return id_compress(strip, eps).rank;
}

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}

void put_i64(std::ofstream& out, std::int64_t v) { put_u64(out, std::uint64_t(v)); }
void put_f64(std::ofstream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void put_matrix(std::ofstream& out, const Matrix& m) {
    put_u64(out, std::uint64_t(m.rows()));
    put_u64(out, std::uint64_t(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) put_f64(out, m(i, j));
}

void put_ints(std::ofstream& out, const std::vector<int>& v) {
    put_u64(out, v.size());
    for (int x : v) put_i64(out, x);
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw FormatError("hss file: truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}

std::int64_t get_i64(std::ifstream& in) { return std::int64_t(get_u64(in)); }
double get_f64(std::ifstream& in) { return std::bit_cast<double>(get_u64(in)); }

Matrix get_matrix(std::ifstream& in) {
    std::uint64_t rows = get_u64(in), cols = get_u64(in);
    if (rows > (1u << 20) || cols > (1u << 20)) throw FormatError("hss file: implausible shape");
    Matrix m{int(rows), int(cols)};
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = get_f64(in);
    return m;
}

std::vector<int> get_ints(std::ifstream& in) {
    std::uint64_t len = get_u64(in);
    if (len > (1u << 24)) throw FormatError("hss file: implausible index list");
    std::vector<int> v(len);
    for (auto& x : v) x = int(get_i64(in));
    return v;
}

}  // namespace

void save_hss_file(const std::string& path, const HssForm& h) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("hss file: cannot open " + path + " for writing");
    out.write("HSSF0001", 8);
    put_u64(out, std::uint64_t(h.tree.n));
    put_f64(out, h.eps);
    put_u64(out, std::uint64_t(h.d_used));
    put_u64(out, std::uint64_t(h.tree.num_nodes()));
    put_u64(out, std::uint64_t(h.tree.root_id));
    for (const auto& nd : h.tree.nodes) {
        put_u64(out, std::uint64_t(nd.lo));
        put_u64(out, std::uint64_t(nd.hi));
        put_i64(out, nd.child[0]);
        put_i64(out, nd.child[1]);
    }
    for (int id : postorder(h.tree)) {
        const TreeNode& nd = h.tree.node(id);
        put_u64(out, std::uint64_t(id));
        if (nd.is_leaf()) put_matrix(out, h.D[id]);
        if (!h.tree.is_root(id)) {
            put_ints(out, h.U[id].perm);
            put_u64(out, std::uint64_t(h.U[id].rank));
            put_matrix(out, h.U[id].E);
            put_ints(out, h.V[id].perm);
            put_u64(out, std::uint64_t(h.V[id].rank));
            put_matrix(out, h.V[id].E);
        }
        if (!nd.is_leaf()) {
            put_matrix(out, h.B12[id]);
            put_matrix(out, h.B21[id]);
        }
        put_ints(out, h.Ir[id]);
        put_ints(out, h.Ic[id]);
    }
    if (!out) throw FormatError("hss file: write failed for " + path);
}

HssForm load_hss_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("hss file: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "HSSF0001") throw FormatError("hss file: bad magic");

    HssForm h;
    h.tree.n = int(get_u64(in));
    h.eps = get_f64(in);
    h.d_used = int(get_u64(in));
    std::uint64_t nn = get_u64(in);
    if (nn > (1u << 22)) throw FormatError("hss file: implausible node count");
    h.tree.root_id = int(get_u64(in));
    h.tree.nodes.resize(nn);
    for (int i = 0; i < int(nn); ++i) {
        TreeNode& nd = h.tree.nodes[i];
        nd.id = i;
        nd.lo = int(get_u64(in));
        nd.hi = int(get_u64(in));
        nd.child[0] = int(get_i64(in));
        nd.child[1] = int(get_i64(in));
    }
    for (auto& nd : h.tree.nodes)
        if (!nd.is_leaf())
            for (int c : nd.child) {
                if (c < 0 || c >= int(nn)) throw FormatError("hss file: child id out of range");
                h.tree.nodes[c].parent = nd.id;
            }
    if (auto bad = validate_tree(h.tree)) throw FormatError("hss file: " + *bad);

    h.D.resize(nn);
    h.U.resize(nn);
    h.V.resize(nn);
    h.B12.resize(nn);
    h.B21.resize(nn);
    h.Ir.resize(nn);
    h.Ic.resize(nn);
    for (int k = 0; k < int(nn); ++k) {
        int id = int(get_u64(in));
        if (id < 0 || id >= int(nn)) throw FormatError("hss file: node id out of range");
        const TreeNode& nd = h.tree.node(id);
        if (nd.is_leaf()) h.D[id] = get_matrix(in);
        if (!h.tree.is_root(id)) {
            h.U[id].perm = get_ints(in);
            h.U[id].rank = int(get_u64(in));
            h.U[id].E = get_matrix(in);
            h.V[id].perm = get_ints(in);
            h.V[id].rank = int(get_u64(in));
            h.V[id].E = get_matrix(in);
        }
        if (!nd.is_leaf()) {
            h.B12[id] = get_matrix(in);
            h.B21[id] = get_matrix(in);
        }
        h.Ir[id] = get_ints(in);
        h.Ic[id] = get_ints(in);
    }
    return h;
}

}  // namespace hss
