#pragma once

#include "syk/couplings.hpp"
#include "syk/fock.hpp"
#include "syk/sparse.hpp"

namespace syk {

enum class Execution { parallel, serial };

/// Prefactor (2N)^{-3/2} multiplying every quartic coupling.
double syk_prefactor(int n_sites);

/// sum_ijkl J~_ijkl/(2N)^{3/2} c†_i c†_j c_k c_l - mu sum_i n_i on `basis`.
SparseHermitian build_syk(const CouplingTensor& tensor, double mu, const fock::Basis& basis,
                          Execution exec = Execution::parallel);

/// build_syk plus the bilinear corrections that restore particle-hole symmetry.
SparseHermitian build_syk_ph(const CouplingTensor& tensor, double mu, const fock::Basis& basis,
                             Execution exec = Execution::parallel);

/// Quartic SYK term with hard-core bosons (no Jordan-Wigner strings), mu = 0.
SparseHermitian build_bosonic_syk(const CouplingTensor& tensor, const fock::Basis& basis,
                                  Execution exec = Execution::parallel);

/// (1/sqrt N) sum_ij t_ij c†_i c_j.
SparseHermitian build_free_fermion(const HoppingMatrix& hopping, const fock::Basis& basis);

/// Generic one-body operator sum_ij K_ij c†_i c_j (no prefactor).
SparseHermitian build_bilinear(const Eigen::MatrixXcd& k, const fock::Basis& basis,
                               fock::Statistics stats = fock::Statistics::fermion);

/// Number operator sum_i n_i.
SparseHermitian build_charge(const fock::Basis& basis);

/// Battery reference H0 = (omega/2) sum_j sigma^y_j on the full 2^N space.
/// Bit 1 is spin up (occupied); no Jordan-Wigner string.
SparseHermitian build_battery_h0(int n_sites, double omega);

/// One-body matrix K with H_PH - H_SYK = sum_pq K_pq c†_p c_q.
Eigen::MatrixXcd ph_correction(const CouplingTensor& tensor);

/// Collective spin j = N/2 times a truncated photon mode.
struct DickeSpace {
  int n_atoms;
  int photon_cutoff;

  Eigen::Index dim() const { return Eigen::Index(n_atoms + 1) * (photon_cutoff + 1); }
  /// m_index = m + N/2 in 0..N; photons in 0..cutoff.
  Eigen::Index index(int m_index, int photons) const {
    return Eigen::Index(m_index) * (photon_cutoff + 1) + photons;
  }
};

/// omega [a†a + J^z + 2 lambda' (J+ + J-)(a† + a)], lambda' = lambda or lambda/sqrt(N).
SparseHermitian build_dicke(int n_atoms, double omega, double lambda, int photon_cutoff,
                            bool rescale);

/// Single cell of the parallel protocol: omega [a†a + sigma^z/2 + lambda (sigma+ + sigma-)(a† + a)].
SparseHermitian build_rabi_cell(double omega, double lambda, int photon_cutoff);

}  // namespace syk
