#include "syk/linalg.hpp"

#include <lapacke.h>

#include <string>

#include "syk/errors.hpp"

namespace syk::linalg {

Eigen::VectorXd hermitian_eigen(Eigen::MatrixXcd& a, bool want_vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  if (a.cols() != a.rows()) throw DomainError("hermitian_eigen: matrix not square");
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'U', n,
                     reinterpret_cast<lapack_complex_double*>(a.data()), n, w.data());
  if (info != 0) throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
  return w;
}

Eigen::VectorXd tridiagonal_eigen(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                                  Eigen::MatrixXd& z) {
  const auto n = static_cast<lapack_int>(diag.size());
  Eigen::VectorXd d = diag;
  Eigen::VectorXd e(std::max<lapack_int>(n, 1));
  e.head(n > 0 ? n - 1 : 0) = offdiag.head(n > 0 ? n - 1 : 0);
  z.resize(n, n);
  if (n == 0) return d;
  const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, d.data(), e.data(), z.data(), n);
  if (info != 0) throw std::runtime_error("dstev failed, info=" + std::to_string(info));
  return d;
}

}  // namespace syk::linalg
