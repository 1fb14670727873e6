#include "hss/matrix_source.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hss/dense_kernels.hpp"
#include "hss/errors.hpp"
#include "hss/rng.hpp"

namespace hss {

DenseSource::DenseSource(Matrix a) : a_(std::move(a)) {
    if (a_.rows() != a_.cols()) throw std::invalid_argument("DenseSource: matrix must be square");
}

Matrix DenseSource::multiply(const Matrix& X) const { return matmul(a_, X); }

Matrix DenseSource::multiply_transpose(const Matrix& X) const { return matmul(a_, X, true, false); }

Matrix DenseSource::extract(const std::vector<int>& rows, const std::vector<int>& cols) const {
    Matrix b(int(rows.size()), int(cols.size()));
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) b(i, j) = a_(rows[i], cols[j]);
    return b;
}

Matrix densify(const MatrixSource& source) {
    std::vector<int> all(source.n());
    std::iota(all.begin(), all.end(), 0);
    return source.extract(all, all);
}

void check_source_consistency(const MatrixSource& source, int probes, double tol,
                              unsigned long long seed) {
    int n = source.n();
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int t = 0; t < probes; ++t) {
        int j = int(mix_seed(seed, t) % (unsigned long long)(n));
        Matrix e(n, 1);
        e(j, 0) = 1.0;
        Matrix col = source.multiply(e);
        Matrix ref = source.extract(all, {j});
        double err = (col - ref).max_abs();
        double scale = std::max(1.0, ref.max_abs());
        if (err > tol * scale)
            throw ContractError("matrix source: multiply disagrees with extract on column " +
                                std::to_string(j));
    }
}

}  // namespace hss
