#pragma once

#include <Eigen/Dense>

namespace syk::linalg {

/// Eigenvalues (ascending) of a dense Hermitian matrix; vectors overwrite `a`
/// column-wise when requested. Backed by LAPACK zheevd.
Eigen::VectorXd hermitian_eigen(Eigen::MatrixXcd& a, bool want_vectors);

/// Eigenvalues of a real symmetric tridiagonal matrix, with eigenvectors in `z`.
Eigen::VectorXd tridiagonal_eigen(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                                  Eigen::MatrixXd& z);

}  // namespace syk::linalg
