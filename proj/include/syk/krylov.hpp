#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "syk/fock.hpp"
#include "syk/sparse.hpp"
#include "syk/spectral.hpp"

namespace syk {

struct KrylovOptions {
  int subspace_dim = 30;
  /// Local error bound per accepted step (absolute, for a unit-norm state).
  double tolerance = 1e-10;
};

/// Dimension up to which evolve() prefers the eigendecomposition path.
inline constexpr Eigen::Index kEigenPathMaxDim = 5000;

/// exp(-i H t) acting on vectors, either through a full eigendecomposition or
/// through short-iterative Lanczos steps with adaptive time step.
class Propagator {
 public:
  static Propagator eigen(std::shared_ptr<const SparseHermitian> h);
  static Propagator krylov(std::shared_ptr<const SparseHermitian> h, KrylovOptions options = {});
  /// Eigen path when dim <= kEigenPathMaxDim, Krylov otherwise.
  static Propagator automatic(std::shared_ptr<const SparseHermitian> h,
                              KrylovOptions options = {});

  bool uses_eigen() const { return eig_ != nullptr; }
  Eigen::Index dim() const { return h_->dim(); }
  const SparseHermitian& hamiltonian() const { return *h_; }

  /// exp(-i H t) psi; t may be negative.
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi, double t) const;

  /// States at each time of an ascending grid (first entry may be 0).
  std::vector<Eigen::VectorXcd> evolve_grid(const Eigen::VectorXcd& psi0,
                                            std::span<const double> times) const;

  /// Cumulative number of sparse products issued by the Krylov path.
  std::size_t matvec_count() const { return *matvecs_; }

 private:
  Propagator() = default;
  void krylov_sweep(Eigen::VectorXcd psi, double direction, std::span<const double> targets,
                    const std::function<void(std::size_t, const Eigen::VectorXcd&)>& emit) const;

  std::shared_ptr<const SparseHermitian> h_;
  std::shared_ptr<const EigenSystem> eig_;
  KrylovOptions options_;
  std::shared_ptr<std::size_t> matvecs_ = std::make_shared<std::size_t>(0);
};

/// exp(-i H t)|psi>; picks the eigen path for small dimensions.
fock::PureState evolve(const SparseHermitian& h, const fock::PureState& psi0, double t);

}  // namespace syk
