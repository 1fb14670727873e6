#pragma once

#include <cstddef>
#include <vector>

namespace hss {

// Dense double-precision matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(std::size_t(rows) * cols, 0.0) {}

    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(int i, int j) { return a_[std::size_t(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[std::size_t(i) * cols_ + j]; }

    double* data() { return a_.data(); }
    const double* data() const { return a_.data(); }
    double* row_ptr(int i) { return a_.data() + std::size_t(i) * cols_; }
    const double* row_ptr(int i) const { return a_.data() + std::size_t(i) * cols_; }

    Matrix transpose() const;

    // A(idx, :) and A(:, idx)
    Matrix select_rows(const std::vector<int>& idx) const;
    Matrix select_cols(const std::vector<int>& idx) const;

    Matrix block(int r0, int c0, int nr, int nc) const;
    void set_block(int r0, int c0, const Matrix& b);

    // First nr rows / last nr rows (row splits used throughout the solver).
    Matrix top_rows(int nr) const { return block(0, 0, nr, cols_); }
    Matrix bottom_rows(int nr) const { return block(rows_ - nr, 0, nr, cols_); }

    void append_cols(const Matrix& b);

    double frob_norm() const;
    double max_abs() const;
    double inf_norm() const;  // max absolute row sum

    bool all_finite() const;

    friend bool operator==(const Matrix& x, const Matrix& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

Matrix operator+(const Matrix& x, const Matrix& y);
Matrix operator-(const Matrix& x, const Matrix& y);
Matrix operator*(double s, const Matrix& x);

Matrix vstack(const Matrix& top, const Matrix& bottom);
Matrix hstack(const Matrix& left, const Matrix& right);

}  // namespace hss
