#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "syk/battery.hpp"
#include "syk/errors.hpp"
#include "syk/hamiltonian.hpp"

namespace syk {

namespace {

// Atomic populations p(m_index, tau) for a given cutoff.
Eigen::MatrixXd atomic_populations(int n_atoms, double omega, double lambda,
                                   std::span<const double> tau_grid, DickeMode mode,
                                   bool rescale, int cutoff) {
  const int atoms = mode == DickeMode::collective ? n_atoms : 1;
  const DickeSpace space{atoms, cutoff};
  auto h = std::make_shared<const SparseHermitian>(
      mode == DickeMode::collective ? build_dicke(atoms, omega, lambda, cutoff, rescale)
                                    : build_rabi_cell(omega, lambda, cutoff));
  const Propagator prop = Propagator::automatic(h);
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(space.dim());
  psi0[space.index(0, atoms)] = 1.0;  // all atoms in |g>, one photon per atom
  const auto states = prop.evolve_grid(psi0, tau_grid);

  Eigen::MatrixXd pop = Eigen::MatrixXd::Zero(atoms + 1, static_cast<Eigen::Index>(tau_grid.size()));
  for (std::size_t t = 0; t < states.size(); ++t)
    for (int mi = 0; mi <= atoms; ++mi)
      for (int ph = 0; ph <= cutoff; ++ph)
        pop(mi, static_cast<Eigen::Index>(t)) += std::norm(states[t][space.index(mi, ph)]);
  return pop;
}

std::vector<double> excitation_energy(const Eigen::MatrixXd& pop, double omega) {
  std::vector<double> e(static_cast<std::size_t>(pop.cols()));
  for (Eigen::Index t = 0; t < pop.cols(); ++t) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < pop.rows(); ++k) acc += double(k) * pop(k, t);
    e[static_cast<std::size_t>(t)] = omega * acc;
  }
  return e;
}

}  // namespace

BatteryRun battery_charge_dicke(int n_atoms, double omega, double lambda,
                                std::span<const double> tau_grid, DickeMode mode, bool rescale,
                                const DickeOptions& options) {
  if (n_atoms < 1) throw DomainError("battery_charge_dicke: n_atoms must be >= 1");
  if (tau_grid.empty() || tau_grid.front() != 0.0)
    throw DomainError("battery_charge_dicke: tau grid must start at 0");
  const int atoms = mode == DickeMode::collective ? n_atoms : 1;
  const int cutoff = options.photon_cutoff > 0 ? options.photon_cutoff : std::max(4 * atoms, 16);
  const int check = cutoff + std::max(cutoff / 2, 2);

  const Eigen::MatrixXd pop = atomic_populations(n_atoms, omega, lambda, tau_grid, mode, rescale, cutoff);
  const Eigen::MatrixXd ref = atomic_populations(n_atoms, omega, lambda, tau_grid, mode, rescale, check);
  const auto e = excitation_energy(pop, omega);
  const auto e_ref = excitation_energy(ref, omega);
  double drift = 0.0;
  for (std::size_t t = 0; t < e.size(); ++t) drift = std::max(drift, std::abs(e[t] - e_ref[t]));
  if (drift > options.drift_tolerance)
    throw ResourceError("battery_charge_dicke: photon cutoff " + std::to_string(cutoff) +
                        " not converged (energy drift " + std::to_string(drift) + " against cutoff " +
                        std::to_string(check) + ")");

  BatteryRun run;
  run.tau_grid.assign(tau_grid.begin(), tau_grid.end());
  run.n_sites = n_atoms;
  run.J = lambda;
  run.omega = omega;
  run.variant = mode == DickeMode::collective ? (rescale ? "collective-rescaled" : "collective")
                                              : "parallel";
  const auto nt = static_cast<Eigen::Index>(tau_grid.size());
  if (mode == DickeMode::collective) {
    run.populations = pop;
    run.energy = e;
  } else {
    // Independent cells: the number of excited atoms is binomial in p_e.
    run.populations = Eigen::MatrixXd::Zero(n_atoms + 1, nt);
    for (Eigen::Index t = 0; t < nt; ++t) {
      const double pe = pop(1, t);
      for (int k = 0; k <= n_atoms; ++k)
        run.populations(k, t) = std::exp(std::lgamma(n_atoms + 1.0) - std::lgamma(k + 1.0) -
                                         std::lgamma(n_atoms - k + 1.0)) *
                                std::pow(pe, k) * std::pow(1.0 - pe, n_atoms - k);
    }
    run.energy.resize(e.size());
    for (std::size_t t = 0; t < e.size(); ++t) run.energy[t] = n_atoms * e[t];
  }
  run.power.resize(run.energy.size());
  for (std::size_t t = 0; t < run.energy.size(); ++t)
    run.power[t] = tau_grid[t] > 0 ? run.energy[t] / tau_grid[t] : 0.0;
  return run;
}

}  // namespace syk
