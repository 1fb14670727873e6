#include "hss/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace hss {

Matrix Matrix::identity(int n) {
    Matrix I(n, n);
    for (int i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::select_rows(const std::vector<int>& idx) const {
    Matrix r(int(idx.size()), cols_);
    for (int i = 0; i < r.rows(); ++i) {
        if (idx[i] < 0 || idx[i] >= rows_) throw std::invalid_argument("row index out of range");
        for (int j = 0; j < cols_; ++j) r(i, j) = (*this)(idx[i], j);
    }
    return r;
}

Matrix Matrix::select_cols(const std::vector<int>& idx) const {
    Matrix r(rows_, int(idx.size()));
    for (int j = 0; j < r.cols(); ++j)
        if (idx[j] < 0 || idx[j] >= cols_) throw std::invalid_argument("col index out of range");
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < r.cols(); ++j) r(i, j) = (*this)(i, idx[j]);
    return r;
}

Matrix Matrix::block(int r0, int c0, int nr, int nc) const {
    if (r0 < 0 || c0 < 0 || nr < 0 || nc < 0 || r0 + nr > rows_ || c0 + nc > cols_)
        throw std::invalid_argument("block out of range");
    Matrix b(nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

void Matrix::set_block(int r0, int c0, const Matrix& b) {
    if (r0 < 0 || c0 < 0 || r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
        throw std::invalid_argument("block out of range");
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

void Matrix::append_cols(const Matrix& b) {
    if (rows_ == 0 && cols_ == 0) {
        *this = b;
        return;
    }
    if (b.rows() != rows_) throw std::invalid_argument("append_cols: row mismatch");
    Matrix r(rows_, cols_ + b.cols());
    r.set_block(0, 0, *this);
    r.set_block(0, cols_, b);
    *this = r;
}

double Matrix::frob_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
}

double Matrix::inf_norm() const {
    double m = 0.0;
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

bool Matrix::all_finite() const {
    for (double v : a_)
        if (!std::isfinite(v)) return false;
    return true;
}

Matrix operator+(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) throw std::invalid_argument("shape mismatch");
    Matrix r(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) r(i, j) = x(i, j) + y(i, j);
    return r;
}

Matrix operator-(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) throw std::invalid_argument("shape mismatch");
    Matrix r(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) r(i, j) = x(i, j) - y(i, j);
    return r;
}

Matrix operator*(double s, const Matrix& x) {
    Matrix r(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) r(i, j) = s * x(i, j);
    return r;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    if (top.rows() == 0) return bottom;
    if (bottom.rows() == 0) return top;
    if (top.cols() != bottom.cols()) throw std::invalid_argument("vstack: col mismatch");
    Matrix r(top.rows() + bottom.rows(), top.cols());
    r.set_block(0, 0, top);
    r.set_block(top.rows(), 0, bottom);
    return r;
}

Matrix hstack(const Matrix& left, const Matrix& right) {
    if (left.cols() == 0) return right;
    if (right.cols() == 0) return left;
    if (left.rows() != right.rows()) throw std::invalid_argument("hstack: row mismatch");
    Matrix r(left.rows(), left.cols() + right.cols());
    r.set_block(0, 0, left);
    r.set_block(0, left.cols(), right);
    return r;
}

}  // namespace hss
