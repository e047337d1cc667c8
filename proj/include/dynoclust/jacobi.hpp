#pragma once

#include "dynoclust/common.hpp"

namespace dynoclust {

struct EigenDecomposition {
    Vec values;   // descending
    Mat vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

// Full symmetric eigendecomposition by cyclic Jacobi rotations. Sweeps run
// until the off-diagonal Frobenius norm drops below 1e-10 * ||G||_F, with
// individual rotations skipped once their entry is already negligible.
// Throws after 100 sweeps without convergence (with the residual attained).
EigenDecomposition sym_eigendecomp(const Mat& g);

}  // namespace dynoclust
