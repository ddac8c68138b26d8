#pragma once

#include <array>
#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace syk {

using cplx = std::complex<double>;
using Bits = std::uint32_t;

namespace fock {

inline constexpr int kMaxEnumerateSites = 24;
inline constexpr int kMaxDenseSites = 16;

/// Fermions carry a Jordan-Wigner string; hard-core bosons are the same
/// two-level operators with the string removed.
enum class Statistics { fermion, hardcore_boson };

struct SignedState {
  Bits bits;
  int sign;
  friend bool operator==(const SignedState&, const SignedState&) = default;
};

/// (-1)^(number of occupied sites strictly below `site`).
inline int string_sign(Bits bits, int site) {
  const Bits below = (Bits{1} << site) - 1u;
  return (std::popcount(bits & below) & 1) ? -1 : 1;
}

namespace detail {
constexpr auto make_binomial_table() {
  std::array<std::array<std::uint64_t, 33>, 33> t{};
  for (int n = 0; n <= 32; ++n) {
    t[n][0] = 1;
    for (int k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
  }
  return t;
}
inline constexpr auto kBinomial = make_binomial_table();
}  // namespace detail

inline std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n || n > 32) return 0;
  return detail::kBinomial[n][k];
}

std::optional<SignedState> annihilate(int site, SignedState s,
                                      Statistics stats = Statistics::fermion);
std::optional<SignedState> create(int site, SignedState s,
                                  Statistics stats = Statistics::fermion);

/// c†_i c_j |bits>, operators applied right to left.
std::optional<SignedState> apply_bilinear(int i, int j, Bits bits,
                                          Statistics stats = Statistics::fermion);

/// c†_i c†_j c_k c_l |bits>, applied as c_l, c_k, c†_j, c†_i.
std::optional<SignedState> apply_quartic(int i, int j, int k, int l, Bits bits,
                                         Statistics stats = Statistics::fermion);

/// Ordered occupation basis: either one fixed-charge sector or the whole 2^N space.
class Basis {
 public:
  static Basis sector(int n_sites, int charge);
  static Basis full(int n_sites);

  int n_sites() const { return n_sites_; }
  bool is_full() const { return charge_ < 0; }
  /// Sector charge; -1 for the full space.
  int charge() const { return charge_; }
  std::size_t size() const { return size_; }

  Bits state(std::size_t index) const {
    return is_full() ? static_cast<Bits>(index) : states_[index];
  }
  /// Ascending states. Empty for the full space, whose states are 0..2^N-1.
  std::span<const Bits> states() const { return states_; }

  std::optional<std::size_t> index_of(Bits bits) const;
  /// Dense index of a state known to belong to the basis.
  std::size_t rank(Bits bits) const {
    if (is_full()) return bits;
    std::size_t r = 0;
    int t = 1;
    while (bits) {
      const int pos = std::countr_zero(bits);
      r += detail::kBinomial[pos][t];
      ++t;
      bits &= bits - 1;
    }
    return r;
  }

  friend bool operator==(const Basis& a, const Basis& b) {
    return a.n_sites_ == b.n_sites_ && a.charge_ == b.charge_;
  }

 private:
  Basis(int n_sites, int charge);

  int n_sites_ = 0;
  int charge_ = -1;
  std::size_t size_ = 0;
  std::vector<Bits> states_;
};

/// All bitmasks of `n_sites` bits with `charge` set bits, ascending.
Basis enumerate_sector(int n_sites, int charge);

struct PureState {
  std::shared_ptr<const Basis> basis;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
  void normalize();
};

/// Sector amplitudes scattered into the full 2^N space.
PureState embed_in_full(const PureState& state);

struct DensityMatrix {
  Eigen::MatrixXcd elements;
  Eigen::Index dim() const { return elements.rows(); }
};

/// Reduced density matrix of sites 0..keep_sites-1 of a full-space pure state.
DensityMatrix partial_trace(const PureState& state, int keep_sites);
/// Single-threaded reference for partial_trace.
DensityMatrix partial_trace_serial(const PureState& state, int keep_sites);

}  // namespace fock
}  // namespace syk
