#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "syk/fock.hpp"

namespace syk {

using Rng = std::mt19937_64;

/// Independent, reproducible random streams for disorder realizations.
/// stream(r) depends only on (master_seed, r), never on which other streams
/// were drawn before it.
class DisorderEnsemble {
 public:
  DisorderEnsemble(std::uint64_t master_seed, int realization_count);

  std::uint64_t master_seed() const { return master_seed_; }
  int realization_count() const { return count_; }
  Rng stream(int realization) const;

 private:
  std::uint64_t master_seed_;
  int count_;
};

DisorderEnsemble ensemble_streams(std::uint64_t master_seed, int realization_count);

/// Index of the ordered pair (i<j) in lexicographic order.
inline int pair_index(int i, int j, int n) { return i * n - i * (i + 1) / 2 + (j - i - 1); }

/// Random quartic couplings J~_ijkl stored once per independent degree of freedom.
///
/// The tensor is viewed as a Hermitian matrix over ordered pairs a=(i<j),
/// b=(k<l): M_ab = J~_ijkl. Only a <= b is stored; every other index order is
/// recovered from antisymmetry within each pair and Hermiticity across pairs.
/// The (2N)^{-3/2} prefactor is not applied here.
class CouplingTensor {
 public:
  CouplingTensor(int n_sites, double variance_scale);

  int n_sites() const { return n_sites_; }
  double variance_scale() const { return j_; }
  int pair_count() const { return pairs_; }

  /// J~_ijkl for arbitrary indices.
  cplx operator()(int i, int j, int k, int l) const;
  /// M_ab over ordered pair indices, any a, b.
  cplx pair_element(int a, int b) const {
    return a <= b ? entries_[tri(a, b)] : std::conj(entries_[tri(b, a)]);
  }
  /// Canonical storage slot for a <= b. Diagonal slots must stay real.
  cplx& canonical(int a, int b) { return entries_[tri(a, b)]; }
  const std::vector<cplx>& canonical_entries() const { return entries_; }

  bool is_zero() const;

 private:
  std::size_t tri(int a, int b) const {
    return static_cast<std::size_t>(a) * pairs_ - static_cast<std::size_t>(a) * (a - 1) / 2 +
           (b - a);
  }

  int n_sites_;
  double j_;
  int pairs_;
  std::vector<cplx> entries_;
};

CouplingTensor sample_syk(int n_sites, double J, Rng& rng);

/// Little-endian "SYKJ" dump: header (magic, u32 version, u32 N, f64 J) then
/// each canonical entry as (u8 i, u8 j, u8 k, u8 l, f64 re, f64 im).
void write_tensor(std::ostream& out, const CouplingTensor& tensor);
CouplingTensor read_tensor(std::istream& in);

struct HoppingMatrix {
  int n_sites;
  double variance_scale;
  Eigen::MatrixXcd entries;
};

HoppingMatrix sample_hopping(int n_sites, double t, Rng& rng);

}  // namespace syk
