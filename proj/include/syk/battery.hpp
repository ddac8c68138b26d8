#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "syk/couplings.hpp"
#include "syk/fock.hpp"
#include "syk/krylov.hpp"
#include "syk/stats.hpp"

namespace syk {

enum class BatteryVariant { fermionic, bosonic };
enum class DickeMode { parallel, collective };

struct BatteryRun {
  std::vector<double> tau_grid;
  std::vector<double> energy;  // units of omega, zero at tau = 0
  std::vector<double> power;   // energy / tau, 0 at tau = 0
  std::vector<int> ergotropy_sizes;
  std::vector<std::vector<double>> ergotropy;  // [size index][tau index]
  Eigen::MatrixXd populations;                 // (levels) x |tau_grid|

  int n_sites = 0;
  double J = 0.0;
  double omega = 1.0;
  std::uint64_t seed = 0;
  std::string variant;
};

/// Extractable work of rho against H = diag(energies) in rho's basis:
/// Tr[rho H] minus the passive energy (descending eigenvalues of rho paired
/// with ascending energies). Throws DomainError when rho is not PSD.
double ergotropy(const fock::DensityMatrix& rho, std::span<const double> energies);

struct BatteryOptions {
  KrylovOptions krylov;
  // Sectors up to this size are diagonalized; larger ones use Krylov steps.
  Eigen::Index eigen_max_dim = 256;
};

/// SYK charging of N spins starting from the ground state of (omega/2) sum sigma^y.
/// Each charge sector is evolved on its own and the amplitudes recombined.
BatteryRun battery_charge_syk(const CouplingTensor& tensor, double omega,
                              std::span<const double> tau_grid, BatteryVariant variant,
                              std::span<const int> ergotropy_sizes = {},
                              const BatteryOptions& options = {});

/// Amplitudes of a full-space state rotated into the sigma^y product basis
/// (bit 1 = +y), in place.
void rotate_to_y_basis(Eigen::VectorXcd& psi, int n_sites);

/// 200 log-spaced points on [1e-2/J, 50/J] preceded by 0.
std::vector<double> default_tau_grid(double J = 1.0);

struct PowerPoint {
  int n_sites = 0;
  double p_star = 0.0;        // max over tau of the averaged power
  double p_star_error = 0.0;  // standard error at tau_star
  double tau_star = 0.0;
  double energy_at_tau_star = 0.0;
  double energy_plateau = 0.0;       // averaged energy over the last fifth of the grid
  double p_star_max_then_avg = 0.0;  // per-realization maxima, averaged
  int realizations = 0;
};

/// Average-then-maximize summary of runs of a single size.
PowerPoint summarize_power(const std::vector<BatteryRun>& runs);

/// Least-squares slope of ln P vs ln N. Throws DomainError with fewer than 3 sizes.
stats::LineFit power_law_fit(std::span<const double> sizes, std::span<const double> values);

struct PowerScaling {
  std::vector<PowerPoint> points;
  stats::LineFit fit;
};

PowerScaling battery_power_scaling(const DisorderEnsemble& ensemble, std::span<const int> sizes,
                                   double omega, BatteryVariant variant,
                                   std::span<const double> tau_grid, double J = 1.0);

struct DickeOptions {
  int photon_cutoff = 0;  // 0 selects max(4N, 16)
  double drift_tolerance = 1e-6;
};

/// Dicke charging from |g..g> x |N photons> (collective) or N independent
/// atom-cavity cells each starting from |g> x |1> (parallel).
/// Throws ResourceError when the photon cutoff is not converged.
BatteryRun battery_charge_dicke(int n_atoms, double omega, double lambda,
                                std::span<const double> tau_grid, DickeMode mode, bool rescale,
                                const DickeOptions& options = {});

}  // namespace syk
