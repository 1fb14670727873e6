#pragma once

#include <cstdint>
#include <functional>

#include "hss/hss_form.hpp"
#include "hss/matrix_source.hpp"

namespace hss {

// b = A_hat * X through the generators: one upward sweep collecting
// V^T-projected pieces, one downward sweep distributing coupling products.
// X may carry any number of columns.
Matrix hss_matvec(const HssForm& h, const Matrix& X);

struct PowerMethodResult {
    double eigenvalue = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Normalized power iteration with Rayleigh-quotient estimates; stops when
// successive estimates agree to a relative tol, or flags non-convergence.
// The start vector is seeded-random so distinct operators can share it.
PowerMethodResult power_method(const std::function<Matrix(const Matrix&)>& apply, int n,
                               double tol, int max_iters, std::uint64_t seed);
PowerMethodResult power_method(const MatrixSource& source, double tol, int max_iters,
                               std::uint64_t seed);
PowerMethodResult power_method(const HssForm& h, double tol, int max_iters, std::uint64_t seed);

}  // namespace hss
