#pragma once

#include "types.hpp"

namespace anvar {

/// Minimizer of ||W H - Y||_F^2 + gamma ||W||_F^2 over W (d x f), solved in
/// closed form as Y H^T (H H^T + gamma I)^{-1} via Cholesky of the Gram
/// matrix. H is f x n (one sample per column), Y is d x n.
///
/// Throws SolverError when the factorization is not positive definite
/// (rank-deficient H with gamma too small) or when the normal-equation
/// residual exceeds 1e-8 relative.
Mat ridge_solve(ConstMatRef H, ConstMatRef Y, double gamma);

/// Same system solved from a precomputed Gram matrix G = H H^T and cross
/// matrix C = Y H^T; lets a grid search factor per gamma without rebuilding
/// the products.
Mat ridge_solve_gram(ConstMatRef G, ConstMatRef C, double gamma);

} // namespace anvar
