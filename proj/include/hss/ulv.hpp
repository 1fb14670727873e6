#pragma once

#include <cstdint>
#include <vector>

#include "hss/cluster_tree.hpp"
#include "hss/dense_kernels.hpp"
#include "hss/hss_form.hpp"
#include "hss/matrix.hpp"
#include "hss/matrix_source.hpp"

namespace hss {

// Factorization data. The row-reducing transform at each node reuses the
// permutation and interpolation block of the node's row basis and is only
// ever applied implicitly. Row splits: at a node whose transformed diagonal
// block has m rows and whose row basis has rank k, "top" means the first
// m - k rows and "bottom" the last k.
struct UlvFactors {
    ClusterTree tree;
    int n = 0;

    // carried over from the compressed form for use during the solve
    std::vector<PermutedBasis> omega;   // by non-root id: row basis driving the transform
    std::vector<PermutedBasis> vsmall;  // by non-root id: column interpolation factor
    std::vector<Matrix> B12, B21;       // by non-leaf id

    // produced by the factorization
    std::vector<Matrix> W;       // by non-root id: transformed diagonal block
    std::vector<Matrix> L;       // by non-root id: lower-triangular factor of top(W)
    std::vector<Matrix> Q;       // by non-root id: square orthogonal factor
    std::vector<Matrix> Vt;      // by non-root id: column transform accumulated through Q
    std::vector<Matrix> Vhat;    // by non-root id: expanded column basis fed into the LQ stage
    std::vector<Matrix> Dtilde;  // by non-root id: k x k reduced diagonal block
    std::vector<int> krow;       // by id: bottom-split size = rank of the row basis
    PluFactors root_plu;
    int root_size = 0;
};

UlvFactors ulv_factor(const HssForm& h);

// Multi-column right-hand sides supported.
Matrix ulv_solve(const UlvFactors& f, const Matrix& b);

struct RefinementResult {
    Matrix x;
    std::vector<double> residuals;  // relative true residual, entry 0 is the direct solve
    int iterations = 0;             // correction steps applied
    bool converged = false;
    bool diverged = false;  // residual failed to decrease three times in a row
};

// Refines the direct solution against the exact operator product, so the
// history reports true backward error rather than the compressed model's.
RefinementResult iterative_refinement(const MatrixSource& source, const UlvFactors& f,
                                      const Matrix& b, double tol, int max_iters);

std::uint64_t ulv_bytes(const UlvFactors& f);

}  // namespace hss
