#pragma once

#include <cstdint>
#include <vector>

#include "ile/matrix.hpp"
#include "ile/operators.hpp"

namespace ile {

struct EigenPairs {
  std::vector<double> eigenvalues;  // ascending
  Mat vectors;                      // n x k, column j pairs with eigenvalues[j]
  std::vector<double> residuals;    // ||M z - lambda z|| per pair
  std::int64_t iterations = 0;      // operator applications spent on the basis
  // Indices j whose gap eigenvalues[j+1] - eigenvalues[j] falls under 1e-6;
  // eigenvectors within such clusters are only defined up to rotation.
  std::vector<std::int32_t> degenerate_gaps;
};

struct SolveOptions {
  double tol = 1e-8;           // absolute residual target
  // Cap on restart cycles of the Krylov basis; <= 0 picks min(n, 10*k + 100).
  std::int64_t max_iter = -1;
  std::uint64_t seed = 0;      // start-vector seed
};

// k smallest eigenpairs by Lanczos with full reorthogonalization and thick
// restarts, run on the spectrally flipped operator c*I - M (c the Gershgorin
// upper bound) so the wanted end is extremal.  Deterministic per
// (operator, k, options); throws NoConvergenceError when the iteration
// budget runs out.
EigenPairs smallest_k(const InterpolatedOperator& op, std::int32_t k,
                      const SolveOptions& opts = {});

// k largest eigenpairs (still reported ascending), via smallest_k of -M.
EigenPairs largest_k(const InterpolatedOperator& op, std::int32_t k,
                     const SolveOptions& opts = {});

// Full dense eigendecomposition; the plumbing oracle for the iterative path.
// Throws TooLargeError above dense_limit.
EigenPairs dense_eig(const InterpolatedOperator& op,
                     std::int32_t dense_limit = 2000);

// Flips each column so its largest-magnitude entry is positive.  Entries
// within a 1e-6 relative band of the maximum count as tied and the lowest
// such index decides, so symmetric vectors like P3's Fiedler (a, 0, -a) pick
// the same sign regardless of round-off in a and -a.  Idempotent; throws
// InvalidArgument on a zero column.
void canonicalize_sign(Mat& vectors);

double gershgorin_upper_bound(const InterpolatedOperator& op);

}  // namespace ile
