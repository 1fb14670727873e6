#pragma once

#include <optional>
#include <vector>

#include "hss/matrix.hpp"

namespace hss {

// Y ~= Y(:,J) * X with X = [I  R1^{-1}R2] * inv(Pi). X is rank x cols(Y),
// X(:,J) is exactly the identity, and perm is the full pivot sequence
// (perm[t] = original index of the column in pivot position t).
struct InterpolativeDecomposition {
    Matrix X;
    std::vector<int> J;
    int rank = 0;
    std::vector<int> perm;
};

// W = [L 0] * Q with Q square, orthonormal rows, diag(L) >= 0.
struct LqFactors {
    Matrix L;  // rows(W) x rows(W) lower-triangular (trapezoidal if cols < rows)
    Matrix Q;  // cols(W) x cols(W)
    int t_rows = 0;  // rows of the Q_t split = rows(W)

    Matrix Qt() const { return Q.top_rows(t_rows); }
    Matrix Qb() const { return Q.bottom_rows(Q.rows() - t_rows); }
};

// P*A = L*U with partial row pivoting; perm[i] is the source row of
// permuted row i.
struct PluFactors {
    std::vector<int> perm;
    Matrix L;  // unit lower-triangular
    Matrix U;  // upper-triangular
};

// Column-pivoted QR truncated at the first |R_ii| <= eps*|R_11| (Golub-
// Businger norm pivoting, running downdates with recomputation guard,
// ties broken by lowest index).
InterpolativeDecomposition id_compress(const Matrix& Y, double eps,
                                       std::optional<int> max_rank = std::nullopt);

LqFactors lq_factor(const Matrix& W);

PluFactors plu_factor(const Matrix& D);
Matrix solve_plu(const PluFactors& f, const Matrix& b);

// op(A) * op(B) where op is controlled by the transpose flags.
Matrix matmul(const Matrix& A, const Matrix& B, bool trans_a = false, bool trans_b = false);
// Reference implementation, kept for cross-checking the parallel kernel.
Matrix matmul_serial(const Matrix& A, const Matrix& B, bool trans_a = false, bool trans_b = false);

// Triangular solves with one or more right-hand-side columns.
Matrix solve_lower(const Matrix& L, const Matrix& B);       // general lower
Matrix solve_unit_lower(const Matrix& L, const Matrix& B);  // unit diagonal
Matrix solve_upper(const Matrix& U, const Matrix& B);

}  // namespace hss
