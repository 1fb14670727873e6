#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "helpers.hpp"
#include "hss/dense_kernels.hpp"
#include "hss/errors.hpp"
#include "hss/matrix.hpp"
#include "hss/rng.hpp"

using hss::id_compress;
using hss::lq_factor;
using hss::Matrix;
using hss::matmul;
using hss::plu_factor;
using hss::solve_plu;
using testutil::naive_matmul;
using testutil::rel_fro;

namespace {

// Reconstruction residual of an interpolative decomposition, computed with the
// naive product so the check does not lean on the kernel under test.
double id_residual(const Matrix& y, const hss::InterpolativeDecomposition& id) {
    Matrix yj = y.select_cols(id.J);
    Matrix rec = naive_matmul(yj, id.X);
    return (rec - y).frob_norm();
}

}  // namespace

TEST_CASE("interpolative decomposition of a zero matrix has rank zero") {
    Matrix y(3, 3);
    auto id = id_compress(y, 1e-8);
    CHECK(id.rank == 0);
    CHECK(id.J.empty());
    CHECK(id.X.rows() == 0);
    CHECK(id.X.cols() == 3);
}

TEST_CASE("interpolative decomposition of the identity is exact and orderly") {
    Matrix y = Matrix::identity(3);
    auto id = id_compress(y, 1e-8);
    CHECK(id.rank == 3);
    // Equal column norms: the lowest index wins each pivot round.
    CHECK(id.J == std::vector<int>{0, 1, 2});
    CHECK(id_residual(y, id) == 0.0);
}

TEST_CASE("rank-one outer product picks the largest column") {
    Matrix y(2, 3);
    const double u[2] = {1.0, 2.0};
    const double v[3] = {3.0, 4.0, 5.0};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) y(i, j) = u[i] * v[j];
    auto id = id_compress(y, 1e-10);
    CHECK(id.rank == 1);
    REQUIRE(id.J.size() == 1);
    CHECK(id.J[0] == 2);
    CHECK(id_residual(y, id) < 1e-12);
}

TEST_CASE("selected columns are reproduced by exact identity coefficients") {
    Matrix y = hss::generate_random(20, 30, 5);
    auto id = id_compress(y, 0.5);  // coarse tolerance forces truncation
    REQUIRE(id.rank > 0);
    REQUIRE(id.rank < 20);
    for (int t = 0; t < id.rank; ++t)
        for (int i = 0; i < id.rank; ++i)
            CHECK(id.X(i, id.J[t]) == (i == t ? 1.0 : 0.0));
}

TEST_CASE("interpolation rank recovers the exact rank of random products") {
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 24, n = 36, k = 1 + trial % 12;
        Matrix left = hss::generate_random(m, k, 1000 + trial);
        Matrix right = hss::generate_random(k, n, 2000 + trial);
        Matrix y = naive_matmul(left, right);
        auto id = id_compress(y, 1e-12);
        CHECK(id.rank == k);
        CHECK(id_residual(y, id) <= 1e-10 * y.frob_norm());
    }
}

TEST_CASE("tighter tolerances never lower the interpolation rank") {
    Matrix y = hss::generate_random(30, 30, 77);
    // Grade the spectrum so intermediate tolerances truncate at varied ranks.
    for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) y(i, j) *= std::pow(10.0, -0.4 * j);
    int prev = -1;
    for (double eps : {1e-12, 1e-9, 1e-6, 1e-3, 1e-1}) {
        int r = id_compress(y, eps).rank;
        if (prev >= 0) CHECK(r <= prev);
        prev = r;
    }
}

TEST_CASE("interpolation honors an explicit rank cap") {
    Matrix y = hss::generate_random(16, 16, 8);
    auto id = id_compress(y, 0.0, 5);
    CHECK(id.rank == 5);
}

TEST_CASE("non-finite input to the interpolative decomposition is rejected") {
    Matrix y(2, 2);
    y(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(id_compress(y, 1e-8), std::invalid_argument);
    y(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(id_compress(y, 1e-8), std::invalid_argument);
}

TEST_CASE("pivot order is reproducible") {
    Matrix y = hss::generate_random(12, 18, 321);
    auto a = id_compress(y, 1e-4);
    auto b = id_compress(y, 1e-4);
    CHECK(a.J == b.J);
    CHECK((a.X - b.X).max_abs() == 0.0);
}

TEST_CASE("LQ of the identity is the identity") {
    auto f = lq_factor(Matrix::identity(2));
    CHECK((f.L - Matrix::identity(2)).max_abs() == 0.0);
    CHECK((f.Q - Matrix::identity(2)).max_abs() == 0.0);
}

TEST_CASE("LQ of a zero row keeps an identity completion") {
    Matrix w(1, 3);
    auto f = lq_factor(w);
    CHECK(f.L.rows() == 1);
    CHECK(f.L(0, 0) == 0.0);
    CHECK((f.Q - Matrix::identity(3)).max_abs() == 0.0);
}

TEST_CASE("LQ reproduces the input with orthonormal rows") {
    Matrix w = hss::generate_random(2, 4, 7);
    auto f = lq_factor(w);
    CHECK(f.t_rows == 2);
    // W = L * Q_t, with Q' square orthogonal.
    Matrix rec = naive_matmul(f.L, f.Qt());
    CHECK((rec - w).frob_norm() <= 1e-12 * w.frob_norm());
    Matrix qqt = naive_matmul(f.Q, f.Q.transpose());
    CHECK((qqt - Matrix::identity(4)).frob_norm() <= 1e-12);
    for (int i = 0; i < 2; ++i) {
        CHECK(f.L(i, i) >= 0.0);
        for (int j = i + 1; j < 2; ++j) CHECK(f.L(i, j) == 0.0);
    }
}

TEST_CASE("LQ handles rank-deficient and wide shapes") {
    Matrix base = hss::generate_random(1, 6, 9);
    Matrix w(3, 6);  // three copies of one row: rank 1
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 6; ++j) w(i, j) = base(0, j) * (i + 1);
    auto f = lq_factor(w);
    Matrix rec = naive_matmul(f.L, f.Qt());
    CHECK((rec - w).frob_norm() <= 1e-12 * w.frob_norm());
    Matrix qqt = naive_matmul(f.Q, f.Q.transpose());
    CHECK((qqt - Matrix::identity(6)).frob_norm() <= 1e-12);
}

TEST_CASE("pivoted LU solves the identity trivially") {
    Matrix b(3, 1);
    b(0, 0) = 1.0;
    auto f = plu_factor(Matrix::identity(3));
    Matrix x = solve_plu(f, b);
    CHECK((x - b).max_abs() == 0.0);
}

TEST_CASE("pivoted LU handles a pure permutation") {
    Matrix d(2, 2);
    d(0, 1) = 1.0;
    d(1, 0) = 1.0;
    Matrix b(2, 1);
    b(0, 0) = 1.0;
    b(1, 0) = 2.0;
    Matrix x = solve_plu(plu_factor(d), b);
    CHECK(x(0, 0) == doctest::Approx(2.0));
    CHECK(x(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("pivoted LU residual on a random system") {
    Matrix d = hss::generate_random(8, 8, 3);
    Matrix b = hss::generate_random(8, 2, 4);
    Matrix x = solve_plu(plu_factor(d), b);
    Matrix r = naive_matmul(d, x) - b;
    CHECK(r.frob_norm() <= 1e-12 * b.frob_norm());
}

TEST_CASE("singular input to the pivoted LU is reported") {
    Matrix z(3, 3);
    CHECK_THROWS_AS(plu_factor(z), hss::SingularMatrixError);
    Matrix d(2, 2);
    d(0, 0) = 1.0;
    d(0, 1) = 2.0;
    d(1, 0) = 2.0;
    d(1, 1) = 4.0;
    CHECK_THROWS_AS(plu_factor(d), hss::SingularMatrixError);
}

TEST_CASE("products match a naive triple loop in every transpose mode") {
    Matrix a = hss::generate_random(5, 7, 21);
    Matrix b = hss::generate_random(7, 4, 22);
    CHECK(rel_fro(matmul(a, b), naive_matmul(a, b)) <= 1e-14);
    CHECK(rel_fro(matmul(a.transpose(), b, true, false), naive_matmul(a, b)) <= 1e-14);
    CHECK(rel_fro(matmul(a, b.transpose(), false, true), naive_matmul(a, b)) <= 1e-14);
    CHECK(rel_fro(matmul(a.transpose(), b.transpose(), true, true), naive_matmul(a, b)) <= 1e-14);

    Matrix i5 = Matrix::identity(5);
    CHECK((matmul(i5, a) - a).max_abs() == 0.0);

    Matrix small_a(2, 3), small_b(3, 2);
    int v = 1;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j) small_a(i, j) = v++;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) small_b(i, j) = v++;
    Matrix prod = matmul(small_a, small_b);
    // Hand sums: row [1,2,3] against columns [7,9,11] and [8,10,12].
    CHECK(prod(0, 0) == 58.0);
    CHECK(prod(0, 1) == 64.0);
    CHECK(prod(1, 0) == 139.0);
    CHECK(prod(1, 1) == 154.0);
}

TEST_CASE("product rejects mismatched inner dimensions") {
    Matrix a(2, 3), b(4, 2);
    CHECK_THROWS_AS(matmul(a, b), std::invalid_argument);
}

TEST_CASE("serial product agrees with the parallel one") {
    Matrix a = hss::generate_random(64, 48, 31);
    Matrix b = hss::generate_random(48, 52, 32);
    CHECK((hss::matmul_serial(a, b) - matmul(a, b)).max_abs() == 0.0);
}

TEST_CASE("triangular solves invert their factors") {
    Matrix t = hss::generate_random(6, 6, 41);
    for (int i = 0; i < 6; ++i) {
        t(i, i) = 4.0 + i;  // well away from zero
        for (int j = i + 1; j < 6; ++j) t(i, j) = 0.0;
    }
    Matrix b = hss::generate_random(6, 2, 42);
    Matrix x = hss::solve_lower(t, b);
    CHECK((naive_matmul(t, x) - b).frob_norm() <= 1e-12 * b.frob_norm());

    Matrix u = t.transpose();
    Matrix xu = hss::solve_upper(u, b);
    CHECK((naive_matmul(u, xu) - b).frob_norm() <= 1e-12 * b.frob_norm());

    Matrix unit = t;
    for (int i = 0; i < 6; ++i) unit(i, i) = 1.0;
    Matrix xl = hss::solve_unit_lower(unit, b);
    CHECK((naive_matmul(unit, xl) - b).frob_norm() <= 1e-12 * b.frob_norm());
}
