#include "hss/dense_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hss/errors.hpp"
#include "hss/flops.hpp"

namespace hss {

namespace {

constexpr double kParallelCutoff = 64.0 * 1024.0;

// Householder reflector for x = W(i0.., col) of length len, evaluated on the
// trailing columns [col+1, ncols). Returns |R_ii| (= norm of x) and leaves
// the reflector in v. The reflected column is overwritten with R_ii on the
// diagonal.
double apply_householder_step(Matrix& W, int i0, int col, std::vector<double>& v) {
    int m = W.rows(), n = W.cols();
    int len = m - i0;
    v.resize(len);
    double normx2 = 0.0;
    for (int i = 0; i < len; ++i) {
        v[i] = W(i0 + i, col);
        normx2 += v[i] * v[i];
    }
    double normx = std::sqrt(normx2);
    if (normx == 0.0) return 0.0;

    double x0 = v[0];
    double s = (x0 >= 0.0) ? 1.0 : -1.0;
    v[0] = x0 + s * normx;
    double vtv = 2.0 * normx * (normx + std::fabs(x0));

    W(i0, col) = -s * normx;
    for (int i = 1; i < len; ++i) W(i0 + i, col) = 0.0;

    int ntrail = n - col - 1;
    if (ntrail > 0 && vtv > 0.0) {
        double* wd = W.data();
        auto update_col = [&](int j) {
            double dot = 0.0;
            for (int i = 0; i < len; ++i) dot += v[i] * wd[std::size_t(i0 + i) * n + j];
            double c = 2.0 * dot / vtv;
            for (int i = 0; i < len; ++i) wd[std::size_t(i0 + i) * n + j] -= c * v[i];
        };
        if (double(len) * ntrail >= kParallelCutoff) {
#pragma omp parallel for schedule(static)
            for (int j = col + 1; j < n; ++j) update_col(j);
        } else {
            for (int j = col + 1; j < n; ++j) update_col(j);
        }
        add_flops(4LL * len * ntrail);
    }
    add_flops(5LL * len);
    return normx;
}

}  // namespace

InterpolativeDecomposition id_compress(const Matrix& Y, double eps, std::optional<int> max_rank) {
    if (!Y.all_finite()) throw std::invalid_argument("id_compress: non-finite input");
    if (eps < 0.0) throw std::invalid_argument("id_compress: eps must be >= 0");

    int m = Y.rows(), n = Y.cols();
    Matrix W = Y;
    std::vector<int> perm(n);
    for (int j = 0; j < n; ++j) perm[j] = j;

    std::vector<double> cn2(n), ref_norm(n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += W(i, j) * W(i, j);
        cn2[j] = s;
        ref_norm[j] = std::sqrt(s);
    }
    add_flops(2LL * m * n);

    const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    int kmax = std::min(m, n);
    if (max_rank) kmax = std::min(kmax, std::max(0, *max_rank));

    std::vector<double> v;
    double r11 = 0.0;
    int rank = 0;
    for (int i = 0; i < kmax; ++i) {
        int piv = i;
        for (int j = i + 1; j < n; ++j)
            if (cn2[j] > cn2[piv]) piv = j;
        if (piv != i) {
            for (int r = 0; r < m; ++r) std::swap(W(r, i), W(r, piv));
            std::swap(cn2[i], cn2[piv]);
            std::swap(ref_norm[i], ref_norm[piv]);
            std::swap(perm[i], perm[piv]);
        }

        double rii = apply_householder_step(W, i, i, v);
        if (i == 0) {
            r11 = rii;
            if (r11 == 0.0) break;
        } else if (rii <= eps * r11) {
            break;
        }
        rank = i + 1;

        for (int j = i + 1; j < n; ++j) {
            double d = W(i, j);
            cn2[j] -= d * d;
            if (cn2[j] < 0.0) cn2[j] = 0.0;
            if (std::sqrt(cn2[j]) <= sqrt_eps * ref_norm[j]) {
                double s = 0.0;
                for (int r = i + 1; r < m; ++r) s += W(r, j) * W(r, j);
                cn2[j] = s;
                ref_norm[j] = std::sqrt(s);
            }
        }
    }

    InterpolativeDecomposition id;
    id.rank = rank;
    id.perm = perm;
    id.J.assign(perm.begin(), perm.begin() + rank);

    // T = R1^{-1} R2, then X = [I T] scattered back through the pivoting.
    int ntrail = n - rank;
    Matrix T(rank, ntrail);
    if (rank > 0 && ntrail > 0) {
        auto solve_col = [&](int j) {
            for (int i = rank - 1; i >= 0; --i) {
                double s = W(i, rank + j);
                for (int l = i + 1; l < rank; ++l) s -= W(i, l) * T(l, j);
                T(i, j) = s / W(i, i);
            }
        };
        if (double(rank) * rank * ntrail >= kParallelCutoff) {
#pragma omp parallel for schedule(static)
            for (int j = 0; j < ntrail; ++j) solve_col(j);
        } else {
            for (int j = 0; j < ntrail; ++j) solve_col(j);
        }
        add_flops(1LL * rank * rank * ntrail);
    }

    id.X = Matrix(rank, n);
    for (int i = 0; i < rank; ++i) id.X(i, perm[i]) = 1.0;
    for (int j = 0; j < ntrail; ++j)
        for (int i = 0; i < rank; ++i) id.X(i, perm[rank + j]) = T(i, j);
    return id;
}

LqFactors lq_factor(const Matrix& W) {
    int r = W.rows(), c = W.cols();
    Matrix A = W.transpose();  // c x r, QR'd in place
    int steps = std::min(r, c);

    std::vector<std::vector<double>> reflectors(steps);
    std::vector<double> v;
    for (int i = 0; i < steps; ++i) {
        apply_householder_step(A, i, i, v);
        reflectors[i] = v;
    }

    LqFactors f;
    f.t_rows = r;
    int lcols = std::min(r, c);
    f.L = Matrix(r, r);
    for (int j = 0; j < lcols; ++j)
        for (int i = j; i < r; ++i) f.L(i, j) = A(j, i);  // L = R^T

    // Q = (H_{s-1} ... H_0 I)^T applied from the stored reflectors.
    Matrix Qhat = Matrix::identity(c);
    for (int i = steps - 1; i >= 0; --i) {
        const auto& vv = reflectors[i];
        int len = int(vv.size());
        double vtv = 0.0;
        for (double x : vv) vtv += x * x;
        if (vtv == 0.0) continue;
        auto update_col = [&](int j) {
            double dot = 0.0;
            for (int k = 0; k < len; ++k) dot += vv[k] * Qhat(i + k, j);
            double coef = 2.0 * dot / vtv;
            for (int k = 0; k < len; ++k) Qhat(i + k, j) -= coef * vv[k];
        };
        if (double(len) * c >= kParallelCutoff) {
#pragma omp parallel for schedule(static)
            for (int j = 0; j < c; ++j) update_col(j);
        } else {
            for (int j = 0; j < c; ++j) update_col(j);
        }
        add_flops(4LL * len * c);
    }
    f.Q = Qhat.transpose();

    for (int i = 0; i < lcols; ++i) {
        if (f.L(i, i) < 0.0) {
            for (int k = i; k < r; ++k) f.L(k, i) = -f.L(k, i);
            for (int j = 0; j < c; ++j) f.Q(i, j) = -f.Q(i, j);
        }
    }
    return f;
}

PluFactors plu_factor(const Matrix& D) {
    if (D.rows() != D.cols()) throw std::invalid_argument("plu_factor: matrix must be square");
    int n = D.rows();
    PluFactors f;
    f.perm.resize(n);
    for (int i = 0; i < n; ++i) f.perm[i] = i;
    if (n == 0) {
        f.L = Matrix(0, 0);
        f.U = Matrix(0, 0);
        return f;
    }

    double pivot_floor = 1e-14 * D.inf_norm();
    Matrix A = D;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::fabs(A(i, k)) > std::fabs(A(piv, k))) piv = i;
        if (std::fabs(A(piv, k)) <= pivot_floor)
            throw SingularMatrixError("plu_factor: pivot below threshold at step " + std::to_string(k));
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(f.perm[k], f.perm[piv]);
        }
        double d = A(k, k);
        int nt = n - k - 1;
        auto eliminate_row = [&](int i) {
            double m = A(i, k) / d;
            A(i, k) = m;
            for (int j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
        };
        if (double(nt) * nt >= kParallelCutoff) {
#pragma omp parallel for schedule(static)
            for (int i = k + 1; i < n; ++i) eliminate_row(i);
        } else {
            for (int i = k + 1; i < n; ++i) eliminate_row(i);
        }
        add_flops(2LL * nt * nt + nt);
    }

    f.L = Matrix(n, n);
    f.U = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        f.L(i, i) = 1.0;
        for (int j = 0; j < i; ++j) f.L(i, j) = A(i, j);
        for (int j = i; j < n; ++j) f.U(i, j) = A(i, j);
    }
    return f;
}

Matrix solve_plu(const PluFactors& f, const Matrix& b) {
    int n = f.L.rows();
    if (b.rows() != n) throw std::invalid_argument("solve_plu: dimension mismatch");
    Matrix pb(n, b.cols());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < b.cols(); ++j) pb(i, j) = b(f.perm[i], j);
    return solve_upper(f.U, solve_unit_lower(f.L, pb));
}

namespace {

enum class Tri { kLower, kUnitLower, kUpper };

Matrix solve_triangular(const Matrix& T, const Matrix& B, Tri kind) {
    int n = T.rows();
    if (T.cols() != n) throw std::invalid_argument("triangular solve: matrix must be square");
    if (B.rows() != n) throw std::invalid_argument("triangular solve: dimension mismatch");
    Matrix X = B;
    int q = B.cols();
    auto solve_col = [&](int j) {
        if (kind == Tri::kUpper) {
            for (int i = n - 1; i >= 0; --i) {
                double s = X(i, j);
                for (int l = i + 1; l < n; ++l) s -= T(i, l) * X(l, j);
                X(i, j) = s / T(i, i);
            }
        } else {
            for (int i = 0; i < n; ++i) {
                double s = X(i, j);
                for (int l = 0; l < i; ++l) s -= T(i, l) * X(l, j);
                X(i, j) = (kind == Tri::kUnitLower) ? s : s / T(i, i);
            }
        }
    };
    if (kind != Tri::kUnitLower) {
        for (int i = 0; i < n; ++i)
            if (T(i, i) == 0.0) throw SingularMatrixError("triangular solve: zero diagonal");
    }
    if (double(n) * n * q >= kParallelCutoff) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j < q; ++j) solve_col(j);
    } else {
        for (int j = 0; j < q; ++j) solve_col(j);
    }
    add_flops(1LL * n * n * q);
    return X;
}

}  // namespace

Matrix solve_lower(const Matrix& L, const Matrix& B) { return solve_triangular(L, B, Tri::kLower); }
Matrix solve_unit_lower(const Matrix& L, const Matrix& B) { return solve_triangular(L, B, Tri::kUnitLower); }
Matrix solve_upper(const Matrix& U, const Matrix& B) { return solve_triangular(U, B, Tri::kUpper); }

namespace {

template <bool kParallel>
Matrix matmul_impl(const Matrix& A, const Matrix& B, bool ta, bool tb) {
    int m = ta ? A.cols() : A.rows();
    int k = ta ? A.rows() : A.cols();
    int kb = tb ? B.cols() : B.rows();
    int n = tb ? B.rows() : B.cols();
    if (k != kb) throw std::invalid_argument("matmul: inner dimensions disagree");
    Matrix C(m, n);
    if (m == 0 || n == 0) return C;
    add_flops(2LL * m * n * k);
    if (k == 0) return C;

    const int bcols = B.cols();
    const int acols = A.cols();
    const double* ad = A.data();
    const double* bd = B.data();
    double* cd = C.data();

    auto row_nn = [&](int i) {
        double* crow = cd + std::size_t(i) * n;
        for (int l = 0; l < k; ++l) {
            double a = ad[std::size_t(i) * acols + l];
            if (a == 0.0) continue;
            const double* brow = bd + std::size_t(l) * bcols;
            for (int j = 0; j < n; ++j) crow[j] += a * brow[j];
        }
    };
    auto row_tn = [&](int i) {
        double* crow = cd + std::size_t(i) * n;
        for (int l = 0; l < k; ++l) {
            double a = ad[std::size_t(l) * acols + i];
            if (a == 0.0) continue;
            const double* brow = bd + std::size_t(l) * bcols;
            for (int j = 0; j < n; ++j) crow[j] += a * brow[j];
        }
    };
    auto row_nt = [&](int i) {
        double* crow = cd + std::size_t(i) * n;
        const double* arow = ad + std::size_t(i) * acols;
        for (int j = 0; j < n; ++j) {
            const double* brow = bd + std::size_t(j) * bcols;
            double s = 0.0;
            for (int l = 0; l < k; ++l) s += arow[l] * brow[l];
            crow[j] = s;
        }
    };
    auto row_tt = [&](int i) {
        double* crow = cd + std::size_t(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* brow = bd + std::size_t(j) * bcols;
            double s = 0.0;
            for (int l = 0; l < k; ++l) s += ad[std::size_t(l) * acols + i] * brow[l];
            crow[j] = s;
        }
    };

    auto run = [&](auto&& body) {
        if (kParallel && double(m) * n * k >= kParallelCutoff) {
#pragma omp parallel for schedule(static)
            for (int i = 0; i < m; ++i) body(i);
        } else {
            for (int i = 0; i < m; ++i) body(i);
        }
    };
    if (!ta && !tb)
        run(row_nn);
    else if (ta && !tb)
        run(row_tn);
    else if (!ta && tb)
        run(row_nt);
    else
        run(row_tt);
    return C;
}

}  // namespace

Matrix matmul(const Matrix& A, const Matrix& B, bool trans_a, bool trans_b) {
    return matmul_impl<true>(A, B, trans_a, trans_b);
}

Matrix matmul_serial(const Matrix& A, const Matrix& B, bool trans_a, bool trans_b) {
    return matmul_impl<false>(A, B, trans_a, trans_b);
}

}  // namespace hss
