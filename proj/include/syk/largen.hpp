#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "syk/fock.hpp"
#include "syk/spectral.hpp"

namespace syk {

struct SdConfig {
  double mixing = 0.3;
  double tolerance = 1e-10;
  int max_iterations = 5000;
  /// Grid half-size; 0 picks default_grid_size(beta J).
  int grid_half_size = 0;
  /// Halve the mixing whenever the residual grows (after the first 10 iterations).
  bool adaptive_mixing = true;

  void validate() const;
};

/// 2^14 up to beta J = 200, growing proportionally (power of two) above.
int default_grid_size(double beta_j);

/// Large-N Green's function and self-energy on the Matsubara grid
/// omega_n = (2n+1) pi / beta, n = -M..M-1 (array index n + M), and on the
/// uniform imaginary-time grid tau_k = k beta / 2M, k = 0..2M-1 (tau = 0+).
struct MatsubaraGreen {
  double beta = 0.0;
  double mu = 0.0;
  double coupling = 0.0;
  int half_size = 0;
  Eigen::VectorXcd g_iw;
  Eigen::VectorXcd sigma_iw;
  Eigen::VectorXcd g_tau;
  Eigen::VectorXcd sigma_tau;
  bool converged = false;
  int iterations = 0;
  int mixing_reductions = 0;
  std::vector<double> residual_history;

  double omega(Eigen::Index index) const;
  double tau(Eigen::Index k) const;
};

/// Self-consistent solution of G(iw) = 1/(iw + mu - Sigma(iw)),
/// Sigma(tau) = -J^2 G(tau)^2 G(-tau). `initial` (any grid size and beta)
/// seeds the iteration through its imaginary-time shape.
MatsubaraGreen solve_sd(double J, double mu, double beta, const SdConfig& config,
                        const MatsubaraGreen* initial = nullptr);

/// Large-N free energy per site, with the free-fermion part summed in closed form.
double free_energy_largen(const MatsubaraGreen& sol);

/// F(T) on a temperature grid and S = -dF/dT by central differences (one-sided at the ends).
ThermoCurve entropy_curve_largen(double J, double mu, std::span<const double> temperatures,
                                 const SdConfig& config);

/// Imaginary-time transform pair used by the solver, exposed for testing.
namespace matsubara {
/// G(tau_k) for k = 0..2M-1 from G(i omega_n); the free part 1/(i omega + mu) is
/// transformed analytically.
Eigen::VectorXcd to_tau(const Eigen::VectorXcd& g_iw, double beta, double mu);
/// int_0^beta e^{i omega_n tau} f(tau) dtau from samples at tau_k, k = 0..2M,
/// where f(0) means f(0+) and f(beta) means f(beta-). Piecewise-linear (Filon) quadrature.
Eigen::VectorXcd to_frequency(const Eigen::VectorXcd& f_tau_closed, double beta);
/// Free propagator -e^{mu tau}/(1 + e^{beta mu}) on 0 < tau < beta.
double free_g_tau(double tau, double beta, double mu);
}  // namespace matsubara

}  // namespace syk
