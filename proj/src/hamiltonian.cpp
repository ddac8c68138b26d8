#include "syk/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "syk/errors.hpp"

namespace syk {

namespace {

using Entry = SparseHermitian::Entry;
using Rows = std::vector<std::vector<Entry>>;

/// Runs fn(column) for every basis state; fn appends to rows[column] only.
template <typename Fn>
void for_each_column(std::size_t n, Execution exec, Fn&& fn) {
  const auto count = static_cast<std::int64_t>(n);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t c = 0; c < count; ++c) fn(static_cast<std::size_t>(c));
  } else {
    for (std::int64_t c = 0; c < count; ++c) fn(static_cast<std::size_t>(c));
  }
}

// Column c of H holds <r|H|c>; row c of a Hermitian H is its conjugate.
inline void push_column_entry(std::vector<Entry>& row_c, std::size_t r, cplx value) {
  row_c.push_back({static_cast<std::uint32_t>(r), std::conj(value)});
}

/// Appends scale * sum_{i<j,k<l} M_(ij),(kl) c†_i c†_j c_k c_l |s> as column entries.
void quartic_column(const CouplingTensor& tensor, const fock::Basis& basis, Bits s, double scale,
                    fock::Statistics stats, std::vector<Entry>& row) {
  const int n = basis.n_sites();
  const Bits all = n == 32 ? ~Bits{0} : ((Bits{1} << n) - 1u);
  const bool fermion = stats == fock::Statistics::fermion;
  for (Bits occ_l = s; occ_l; occ_l &= occ_l - 1) {
    const int l = std::countr_zero(occ_l);
    for (Bits occ_k = s & ((Bits{1} << l) - 1u); occ_k; occ_k &= occ_k - 1) {
      const int k = std::countr_zero(occ_k);
      // c_k c_l with k < l: the string of k is unaffected by removing l.
      int sign = fermion ? fock::string_sign(s, l) * fock::string_sign(s, k) : 1;
      const Bits s2 = s & ~(Bits{1} << l) & ~(Bits{1} << k);
      const int b = pair_index(k, l, n);
      const Bits empty = all & ~s2;
      for (Bits emp_j = empty; emp_j; emp_j &= emp_j - 1) {
        const int j = std::countr_zero(emp_j);
        const int sj = fermion ? fock::string_sign(s2, j) : 1;
        for (Bits emp_i = empty & ((Bits{1} << j) - 1u); emp_i; emp_i &= emp_i - 1) {
          const int i = std::countr_zero(emp_i);
          const int si = fermion ? fock::string_sign(s2, i) : 1;
          const Bits out = s2 | (Bits{1} << i) | (Bits{1} << j);
          const cplx v = tensor.pair_element(pair_index(i, j, n), b);
          if (v == cplx{0.0, 0.0}) continue;
          push_column_entry(row, basis.rank(out), scale * double(sign * sj * si) * v);
        }
      }
    }
  }
}

void bilinear_column(const Eigen::MatrixXcd& k, const fock::Basis& basis, Bits s,
                     fock::Statistics stats, std::vector<Entry>& row) {
  const int n = basis.n_sites();
  const bool fermion = stats == fock::Statistics::fermion;
  for (Bits occ = s; occ; occ &= occ - 1) {
    const int q = std::countr_zero(occ);
    const Bits s1 = s & ~(Bits{1} << q);
    const int sq = fermion ? fock::string_sign(s, q) : 1;
    for (int p = 0; p < n; ++p) {
      if (s1 & (Bits{1} << p)) continue;
      const cplx v = k(p, q);
      if (v == cplx{0.0, 0.0}) continue;
      const int sp = fermion ? fock::string_sign(s1, p) : 1;
      push_column_entry(row, basis.rank(s1 | (Bits{1} << p)), double(sq * sp) * v);
    }
  }
}

void check_sites(const CouplingTensor& tensor, const fock::Basis& basis) {
  if (tensor.n_sites() != basis.n_sites())
    throw DomainError("hamiltonian: tensor has " + std::to_string(tensor.n_sites()) +
                      " sites, basis has " + std::to_string(basis.n_sites()));
}

BasisTag tag_of(const fock::Basis& basis) {
  return basis.is_full() ? BasisTag::full_space : BasisTag::sector;
}

SparseHermitian assemble_syk(const CouplingTensor& tensor, double mu, const fock::Basis& basis,
                             const Eigen::MatrixXcd* one_body, fock::Statistics stats,
                             Execution exec) {
  check_sites(tensor, basis);
  // Antisymmetry folds the four index orders of each (i<j, k<l) term together.
  const double scale = 4.0 * syk_prefactor(tensor.n_sites());
  Rows rows(basis.size());
  for_each_column(basis.size(), exec, [&](std::size_t c) {
    const Bits s = basis.state(c);
    auto& row = rows[c];
    quartic_column(tensor, basis, s, scale, stats, row);
    if (one_body) bilinear_column(*one_body, basis, s, stats, row);
    if (mu != 0.0) push_column_entry(row, c, -mu * std::popcount(s));
  });
  return SparseHermitian(std::move(rows), tag_of(basis));
}

}  // namespace

double syk_prefactor(int n_sites) { return std::pow(2.0 * n_sites, -1.5); }

SparseHermitian build_syk(const CouplingTensor& tensor, double mu, const fock::Basis& basis,
                          Execution exec) {
  return assemble_syk(tensor, mu, basis, nullptr, fock::Statistics::fermion, exec);
}

Eigen::MatrixXcd ph_correction(const CouplingTensor& tensor) {
  const int n = tensor.n_sites();
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(n, n);
  const double scale = 2.0 * syk_prefactor(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      cplx acc = 0;
      for (int m = 0; m < n; ++m) acc += tensor(m, p, m, q);
      k(p, q) = scale * acc;
    }
  return k;
}

SparseHermitian build_syk_ph(const CouplingTensor& tensor, double mu, const fock::Basis& basis,
                             Execution exec) {
  const Eigen::MatrixXcd k = ph_correction(tensor);
  return assemble_syk(tensor, mu, basis, &k, fock::Statistics::fermion, exec);
}

SparseHermitian build_bosonic_syk(const CouplingTensor& tensor, const fock::Basis& basis,
                                  Execution exec) {
  return assemble_syk(tensor, 0.0, basis, nullptr, fock::Statistics::hardcore_boson, exec);
}

SparseHermitian build_bilinear(const Eigen::MatrixXcd& k, const fock::Basis& basis,
                               fock::Statistics stats) {
  if (k.rows() != basis.n_sites() || k.cols() != basis.n_sites())
    throw DomainError("build_bilinear: matrix size does not match basis");
  Rows rows(basis.size());
  for_each_column(basis.size(), Execution::parallel, [&](std::size_t c) {
    bilinear_column(k, basis, basis.state(c), stats, rows[c]);
  });
  return SparseHermitian(std::move(rows), tag_of(basis));
}

SparseHermitian build_free_fermion(const HoppingMatrix& hopping, const fock::Basis& basis) {
  if (hopping.n_sites != basis.n_sites())
    throw DomainError("build_free_fermion: hopping matrix size does not match basis");
  return build_bilinear(hopping.entries / std::sqrt(double(hopping.n_sites)), basis);
}

SparseHermitian build_charge(const fock::Basis& basis) {
  Rows rows(basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c)
    rows[c].push_back({static_cast<std::uint32_t>(c), double(std::popcount(basis.state(c)))});
  return SparseHermitian(std::move(rows), tag_of(basis));
}

SparseHermitian build_battery_h0(int n_sites, double omega) {
  if (n_sites < 1 || n_sites > fock::kMaxDenseSites)
    throw DomainError("build_battery_h0: n_sites must be in 1.." +
                      std::to_string(fock::kMaxDenseSites));
  const std::size_t dim = std::size_t{1} << n_sites;
  Rows rows(dim);
  const cplx half_i{0.0, omega / 2.0};
  for_each_column(dim, Execution::parallel, [&](std::size_t c) {
    const auto s = static_cast<Bits>(c);
    for (int j = 0; j < n_sites; ++j) {
      const Bits m = Bits{1} << j;
      // sigma^y |up> = i |down>, sigma^y |down> = -i |up>
      push_column_entry(rows[c], s ^ m, (s & m) ? half_i : -half_i);
    }
  });
  return SparseHermitian(std::move(rows), BasisTag::full_space);
}

namespace {

SparseHermitian assemble_dicke(int n_atoms, double omega, double coupling, int photon_cutoff) {
  const DickeSpace space{n_atoms, photon_cutoff};
  const double j = n_atoms / 2.0;
  Rows rows(static_cast<std::size_t>(space.dim()));
  for (int mi = 0; mi <= n_atoms; ++mi) {
    const double m = mi - j;
    const double up = std::sqrt(j * (j + 1) - m * (m + 1));
    const double down = std::sqrt(j * (j + 1) - m * (m - 1));
    for (int ph = 0; ph <= photon_cutoff; ++ph) {
      const auto c = static_cast<std::size_t>(space.index(mi, ph));
      auto& row = rows[c];
      push_column_entry(row, c, omega * (ph + m));
      for (int dm : {+1, -1}) {
        const int mo = mi + dm;
        if (mo < 0 || mo > n_atoms) continue;
        const double spin = dm > 0 ? up : down;
        if (ph + 1 <= photon_cutoff)
          push_column_entry(row, static_cast<std::size_t>(space.index(mo, ph + 1)),
                            omega * coupling * spin * std::sqrt(ph + 1.0));
        if (ph > 0)
          push_column_entry(row, static_cast<std::size_t>(space.index(mo, ph - 1)),
                            omega * coupling * spin * std::sqrt(double(ph)));
      }
    }
  }
  return SparseHermitian(std::move(rows), BasisTag::dicke);
}

}  // namespace

SparseHermitian build_dicke(int n_atoms, double omega, double lambda, int photon_cutoff,
                            bool rescale) {
  if (n_atoms < 1) throw DomainError("build_dicke: n_atoms must be >= 1");
  if (photon_cutoff < n_atoms)
    throw DomainError("build_dicke: photon cutoff " + std::to_string(photon_cutoff) +
                      " below the initial Fock state |" + std::to_string(n_atoms) + ">");
  const double lam = rescale ? lambda / std::sqrt(double(n_atoms)) : lambda;
  return assemble_dicke(n_atoms, omega, 2.0 * lam, photon_cutoff);
}

SparseHermitian build_rabi_cell(double omega, double lambda, int photon_cutoff) {
  if (photon_cutoff < 1) throw DomainError("build_rabi_cell: photon cutoff must be >= 1");
  return assemble_dicke(1, omega, lambda, photon_cutoff);
}

}  // namespace syk
