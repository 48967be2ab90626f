#include "linalg.hpp"

#include "error.hpp"

#include <Eigen/Cholesky>
#include <string>

namespace anvar {

Mat ridge_solve_gram(ConstMatRef G, ConstMatRef C, double gamma) {
  if (gamma < 0.0) throw InvalidArgumentError("ridge gamma must be >= 0");
  if (G.rows() != G.cols()) throw DimensionError("Gram matrix must be square");
  if (C.cols() != G.rows())
    throw DimensionError("cross matrix has " + std::to_string(C.cols()) +
                         " columns, Gram matrix is " + std::to_string(G.rows()) + "x" +
                         std::to_string(G.cols()));

  Mat A = G;
  A.diagonal().array() += gamma;
  const Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success)
    throw SolverError("ridge system is not positive definite; increase gamma "
                      "(rank-deficient features with gamma=" +
                      std::to_string(gamma) + ")");
  Mat Wt = llt.solve(C.transpose());

  // Enforce the advertised normal-equation accuracy.
  const double ref = C.norm();
  const double resid = (Wt.transpose() * A - C).norm();
  if (ref > 0.0 && resid > 1e-8 * ref)
    throw SolverError("ridge solve residual " + std::to_string(resid / ref) +
                      " exceeds 1e-8 relative; system too ill-conditioned");
  return Wt.transpose();
}

Mat ridge_solve(ConstMatRef H, ConstMatRef Y, double gamma) {
  if (H.cols() < 1) throw InvalidArgumentError("ridge needs at least one sample");
  if (Y.cols() != H.cols())
    throw DimensionError("H has " + std::to_string(H.cols()) + " samples, Y has " +
                         std::to_string(Y.cols()));
  Mat G(H.rows(), H.rows());
  G.noalias() = H * H.transpose();
  Mat C(Y.rows(), H.rows());
  C.noalias() = Y * H.transpose();
  return ridge_solve_gram(G, C, gamma);
}

} // namespace anvar
