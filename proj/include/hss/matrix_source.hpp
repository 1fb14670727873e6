#pragma once

#include <memory>
#include <vector>

#include "hss/matrix.hpp"

namespace hss {

// Matrix-free access contract: a product routine plus element extraction.
class MatrixSource {
public:
    virtual ~MatrixSource() = default;
    virtual int n() const = 0;
    virtual Matrix multiply(const Matrix& X) const = 0;            // A * X
    virtual Matrix multiply_transpose(const Matrix& X) const = 0;  // A^T * X
    virtual Matrix extract(const std::vector<int>& rows, const std::vector<int>& cols) const = 0;
};

class DenseSource : public MatrixSource {
public:
    explicit DenseSource(Matrix a);

    int n() const override { return a_.rows(); }
    Matrix multiply(const Matrix& X) const override;
    Matrix multiply_transpose(const Matrix& X) const override;
    Matrix extract(const std::vector<int>& rows, const std::vector<int>& cols) const override;

    const Matrix& dense() const { return a_; }

private:
    Matrix a_;
};

// Materializes the full matrix through extract().
Matrix densify(const MatrixSource& source);

// Checks multiply against extract on random unit-vector probes; throws
// ContractError on disagreement beyond tol.
void check_source_consistency(const MatrixSource& source, int probes, double tol,
                              unsigned long long seed);

}  // namespace hss
