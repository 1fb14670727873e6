#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hss/hss_form.hpp"
#include "hss/matrix.hpp"

namespace testutil {

// Deliberately naive product, independent of the library kernels.
inline hss::Matrix naive_matmul(const hss::Matrix& a, const hss::Matrix& b) {
    hss::Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (int k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline double rel_fro(const hss::Matrix& x, const hss::Matrix& ref) {
    return (x - ref).frob_norm() / ref.frob_norm();
}

// Independent recursive splitter used as an oracle for the balanced builder.
inline void midpoint_leaves(int lo, int hi, int leaf_size, std::vector<std::pair<int, int>>& out) {
    if (hi - lo <= leaf_size) {
        out.push_back({lo, hi});
        return;
    }
    int mid = (lo + hi) / 2;
    midpoint_leaves(lo, mid, leaf_size, out);
    midpoint_leaves(mid, hi, leaf_size, out);
}

inline int midpoint_node_count(int lo, int hi, int leaf_size) {
    if (hi - lo <= leaf_size) return 1;
    int mid = (lo + hi) / 2;
    return 1 + midpoint_node_count(lo, mid, leaf_size) + midpoint_node_count(mid, hi, leaf_size);
}

// Dense m-by-m elimination transform for a row basis u = P [I; E]: the matrix
// T with T u_expanded = [0; I], built as [[-E, I], [I, 0]] P^T.
inline hss::Matrix dense_omega(const hss::PermutedBasis& u) {
    const int m = u.expanded_rows();
    const int k = u.rank;
    hss::Matrix s(m, m);
    for (int i = 0; i < m - k; ++i) {
        for (int j = 0; j < k; ++j) s(i, j) = -u.E(i, j);
        s(i, k + i) = 1.0;
    }
    for (int i = 0; i < k; ++i) s(m - k + i, i) = 1.0;
    hss::Matrix pt(m, m);  // P^T: stacked index t lives at natural row perm[t]
    for (int t = 0; t < m; ++t) pt(t, u.perm[t]) = 1.0;
    return naive_matmul(s, pt);
}

}  // namespace testutil
