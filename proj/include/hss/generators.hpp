#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hss/cluster_tree.hpp"
#include "hss/matrix.hpp"
#include "hss/matrix_source.hpp"

namespace hss {

// a_ii = n^2, a_ij = i - j. Diagonally dominant, very low off-diagonal rank.
std::unique_ptr<MatrixSource> toeplitz_simple(int n);

// a_ii = pi^2/6, a_ij = (-1)^(i-j) / ((i-j)^2 d^2). Symmetric, ill-conditioned.
std::unique_ptr<MatrixSource> toeplitz_qchem(int n, double d = 1.0);

// Exact structured matrix built from random generators with the nested-basis
// layout along the given tree; every off-diagonal strip of node tau has rank
// exactly node_ranks[tau]. Generators are kept for white-box tests.
struct SyntheticHss {
    ClusterTree tree;
    std::vector<int> node_ranks;  // per node id; root entry is 0
    Matrix dense;                 // ground truth

    std::vector<Matrix> D;                 // per leaf id
    std::vector<Matrix> U_small, V_small;  // per non-root id
    std::vector<Matrix> B12, B21;          // per non-leaf id

    std::unique_ptr<MatrixSource> source() const { return std::make_unique<DenseSource>(dense); }
};

SyntheticHss make_synthetic_hss(const ClusterTree& tree, int rank, std::uint64_t seed);
SyntheticHss make_synthetic_hss(const ClusterTree& tree, const std::vector<int>& node_ranks,
                                std::uint64_t seed);

// Binary matrix file: magic "STRUDNS1", little-endian u64 rows and cols,
// then rows*cols doubles, row-major, little-endian.
void save_matrix_file(const std::string& path, const Matrix& a);
Matrix load_matrix_dense(const std::string& path);
std::unique_ptr<MatrixSource> load_matrix_file(const std::string& path);

}  // namespace hss
