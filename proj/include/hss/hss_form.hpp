#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hss/cluster_tree.hpp"
#include "hss/dense_kernels.hpp"
#include "hss/matrix.hpp"
#include "hss/matrix_source.hpp"

namespace hss {

// Structured basis Pi * [I; E]. Row perm[i] of the expansion carries row i
// of [I; E]; E may have zero rows when the block is exactly full rank.
struct PermutedBasis {
    std::vector<int> perm;  // full pivot sequence, length = expanded rows
    Matrix E;               // (rows - rank) x rank
    int rank = 0;

    int expanded_rows() const { return int(perm.size()); }
    Matrix expand() const;
    Matrix apply(const Matrix& w) const;            // (rank x q) -> (rows x q)
    Matrix apply_transpose(const Matrix& v) const;  // (rows x q) -> (rank x q)
};

PermutedBasis basis_from_id(const InterpolativeDecomposition& id);

// Hierarchical representation: leaf diagonal blocks, nested row/column bases
// U, V for every non-root node, coupling blocks B for every non-leaf, and
// the selected global row/column indices that the sampling picked per node.
struct HssForm {
    ClusterTree tree;
    double eps = 0.0;
    int d_used = 0;
    std::vector<Matrix> D;             // by leaf id
    std::vector<PermutedBasis> U, V;   // by non-root id
    std::vector<Matrix> B12, B21;      // by non-leaf id
    std::vector<std::vector<int>> Ir, Ic;  // by node id; empty at root

    int row_rank(int id) const { return tree.is_root(id) ? 0 : U[id].rank; }
    int col_rank(int id) const { return tree.is_root(id) ? 0 : V[id].rank; }
};

// Expands the nested bases and assembles the represented matrix densely.
// Testing oracle; the bases are never materialized anywhere else.
Matrix reconstruct_dense(const HssForm& h);

int hss_max_rank(const HssForm& h);

// 8-byte reals and 8-byte indices; counts E blocks, permutations, D, B and
// the selected index sets.
std::uint64_t factor_bytes(const HssForm& h);

// (mem_str - mem_sca) / mem_str with mem_str = hss + ulv + aux bytes and
// mem_sca = dense bytes; the _alt variant divides by mem_sca instead.
double memory_overhead(std::uint64_t hss_bytes, std::uint64_t ulv_bytes,
                       std::uint64_t aux_bytes, std::uint64_t dense_bytes);
double memory_overhead_alt(std::uint64_t hss_bytes, std::uint64_t ulv_bytes,
                           std::uint64_t aux_bytes, std::uint64_t dense_bytes);

// Ground-truth eps-rank of the off-diagonal row strip A(I_tau, [0,n) \ I_tau),
// formed densely. Refuses n beyond the cap.
int hankel_rank_oracle(const MatrixSource& source, const ClusterTree& tree, int node_id,
                       double eps, int dense_cap = 4096);

// Versioned binary container, magic "HSSF0001", little-endian, per-node
// records in postorder.
void save_hss_file(const std::string& path, const HssForm& h);
HssForm load_hss_file(const std::string& path);

}  // namespace hss
