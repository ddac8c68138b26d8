#include "syk/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "syk/errors.hpp"
#include "syk/linalg.hpp"

namespace syk {

Propagator Propagator::eigen(std::shared_ptr<const SparseHermitian> h) {
  Propagator p;
  p.eig_ = std::make_shared<const EigenSystem>(diagonalize(*h, true));
  p.h_ = std::move(h);
  return p;
}

Propagator Propagator::krylov(std::shared_ptr<const SparseHermitian> h, KrylovOptions options) {
  if (options.subspace_dim < 2) throw DomainError("krylov: subspace dimension must be >= 2");
  Propagator p;
  p.h_ = std::move(h);
  p.options_ = options;
  return p;
}

Propagator Propagator::automatic(std::shared_ptr<const SparseHermitian> h,
                                 KrylovOptions options) {
  return h->dim() <= kEigenPathMaxDim ? eigen(std::move(h)) : krylov(std::move(h), options);
}

Eigen::VectorXcd Propagator::evolve(const Eigen::VectorXcd& psi, double t) const {
  if (psi.size() != dim()) throw DomainError("evolve: dimension mismatch");
  if (t == 0.0) return psi;
  if (eig_) {
    const Eigen::MatrixXcd& v = *eig_->vectors;
    Eigen::VectorXcd c = v.adjoint() * psi;
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -eig_->values[k] * t);
    return v * c;
  }
  Eigen::VectorXcd out;
  const double target = std::abs(t);
  krylov_sweep(psi, t < 0 ? -1.0 : 1.0, std::span<const double>(&target, 1),
               [&](std::size_t, const Eigen::VectorXcd& x) { out = x; });
  return out;
}

std::vector<Eigen::VectorXcd> Propagator::evolve_grid(const Eigen::VectorXcd& psi0,
                                                      std::span<const double> times) const {
  std::vector<Eigen::VectorXcd> out;
  out.reserve(times.size());
  if (eig_) {
    const Eigen::MatrixXcd& v = *eig_->vectors;
    const Eigen::VectorXcd c0 = v.adjoint() * psi0;
    for (double t : times) {
      Eigen::VectorXcd c = c0;
      for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -eig_->values[k] * t);
      out.push_back(v * c);
    }
    return out;
  }
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0))
    throw DomainError("evolve_grid: times must be ascending and non-negative");
  out.resize(times.size());
  krylov_sweep(psi0, 1.0, times, [&](std::size_t i, const Eigen::VectorXcd& x) { out[i] = x; });
  return out;
}

void Propagator::krylov_sweep(Eigen::VectorXcd psi, double direction,
                              std::span<const double> targets,
                              const std::function<void(std::size_t, const Eigen::VectorXcd&)>& emit) const {
  const SparseHermitian& h = *h_;
  const Eigen::Index n = h.dim();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(options_.subspace_dim, n));
  const double hnorm = std::max(h.norm_bound(), 1e-300);
  double dt_guess = m_max / (4.0 * hnorm);
  double now = 0.0;
  std::size_t next = 0;

  Eigen::MatrixXcd v(n, m_max + 1);
  Eigen::VectorXcd w(n);
  while (next < targets.size()) {
    if (targets[next] <= now) {
      emit(next++, psi);
      continue;
    }
    const double scale = psi.norm();
    if (scale == 0.0) {
      emit(next++, psi);
      continue;
    }
    // Lanczos basis with full reorthogonalization.
    Eigen::VectorXd alpha(m_max), beta(m_max);
    v.col(0) = psi / scale;
    int k = 0;
    bool invariant = false;
    for (; k < m_max; ++k) {
      h.apply(v.col(k).data(), w.data());
      ++*matvecs_;
      alpha[k] = v.col(k).dot(w).real();
      w -= alpha[k] * v.col(k);
      if (k > 0) w -= beta[k - 1] * v.col(k - 1);
      w -= v.leftCols(k + 1) * (v.leftCols(k + 1).adjoint() * w);
      beta[k] = w.norm();
      if (beta[k] < 1e-13 * hnorm) {
        ++k;
        invariant = true;
        break;
      }
      v.col(k + 1) = w / beta[k];
    }
    Eigen::MatrixXd s;
    const Eigen::VectorXd theta = linalg::tridiagonal_eigen(alpha.head(k), beta.head(k), s);
    const Eigen::VectorXd s0 = s.row(0).transpose();
    auto coefficients = [&](double dt) {
      Eigen::VectorXcd c(k);
      for (int j = 0; j < k; ++j) c[j] = std::polar(s0[j], -direction * theta[j] * dt);
      return Eigen::VectorXcd(s.cast<cplx>() * c);
    };
    const double remaining = targets.back() - now;
    double dt = invariant ? remaining : std::min(dt_guess, remaining);
    if (!invariant) {
      int shrink = 0;
      while (beta[k - 1] * std::abs(coefficients(dt)[k - 1]) > options_.tolerance) {
        dt *= 0.5;
        if (++shrink > 60)
          throw std::runtime_error("krylov: step size collapsed; Krylov subspace too small");
      }
      dt_guess = shrink == 0 ? dt * 1.5 : dt;
    }
    // Every requested time inside the accepted step comes from the same basis.
    while (next < targets.size() && targets[next] - now <= dt * (1 + 1e-14)) {
      emit(next, Eigen::VectorXcd(scale * (v.leftCols(k) * coefficients(targets[next] - now))));
      ++next;
    }
    psi = scale * (v.leftCols(k) * coefficients(dt));
    now += dt;
  }
}

fock::PureState evolve(const SparseHermitian& h, const fock::PureState& psi0, double t) {
  if (h.dim() != psi0.amplitudes.size()) throw DomainError("evolve: dimension mismatch");
  auto shared = std::make_shared<const SparseHermitian>(h);
  const Propagator p = Propagator::automatic(shared);
  return {psi0.basis, p.evolve(psi0.amplitudes, t)};
}

}  // namespace syk
