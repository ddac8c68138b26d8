#include "syk/fock.hpp"

#include <string>

#include "syk/errors.hpp"

namespace syk::fock {

std::optional<SignedState> annihilate(int site, SignedState s, Statistics stats) {
  const Bits mask = Bits{1} << site;
  if (!(s.bits & mask)) return std::nullopt;
  const int sign = stats == Statistics::fermion ? string_sign(s.bits, site) : 1;
  return SignedState{s.bits ^ mask, s.sign * sign};
}

std::optional<SignedState> create(int site, SignedState s, Statistics stats) {
  const Bits mask = Bits{1} << site;
  if (s.bits & mask) return std::nullopt;
  const int sign = stats == Statistics::fermion ? string_sign(s.bits, site) : 1;
  return SignedState{s.bits ^ mask, s.sign * sign};
}

std::optional<SignedState> apply_bilinear(int i, int j, Bits bits, Statistics stats) {
  auto s = annihilate(j, {bits, 1}, stats);
  if (!s) return std::nullopt;
  return create(i, *s, stats);
}

std::optional<SignedState> apply_quartic(int i, int j, int k, int l, Bits bits,
                                         Statistics stats) {
  auto s = annihilate(l, {bits, 1}, stats);
  if (!s) return std::nullopt;
  s = annihilate(k, *s, stats);
  if (!s) return std::nullopt;
  s = create(j, *s, stats);
  if (!s) return std::nullopt;
  return create(i, *s, stats);
}

Basis::Basis(int n_sites, int charge) : n_sites_(n_sites), charge_(charge) {}

Basis Basis::sector(int n_sites, int charge) {
  if (n_sites < 1 || n_sites > kMaxEnumerateSites)
    throw DomainError("sector: n_sites must be in 1.." + std::to_string(kMaxEnumerateSites));
  if (charge < 0 || charge > n_sites)
    throw DomainError("sector: charge " + std::to_string(charge) + " outside 0.." +
                      std::to_string(n_sites));
  Basis b(n_sites, charge);
  b.size_ = binomial(n_sites, charge);
  b.states_.reserve(b.size_);
  if (charge == 0) {
    b.states_.push_back(0);
    return b;
  }
  // Gosper's hack: next larger integer with the same popcount.
  const std::uint64_t limit = std::uint64_t{1} << n_sites;
  std::uint64_t v = (std::uint64_t{1} << charge) - 1;
  while (v < limit) {
    b.states_.push_back(static_cast<Bits>(v));
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    v = (((r ^ v) >> 2) / c) | r;
  }
  return b;
}

Basis Basis::full(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxEnumerateSites)
    throw DomainError("full: n_sites must be in 1.." + std::to_string(kMaxEnumerateSites));
  Basis b(n_sites, -1);
  b.size_ = std::size_t{1} << n_sites;
  return b;
}

std::optional<std::size_t> Basis::index_of(Bits bits) const {
  if (n_sites_ < 32 && (bits >> n_sites_) != 0) return std::nullopt;
  if (!is_full() && std::popcount(bits) != charge_) return std::nullopt;
  return rank(bits);
}

Basis enumerate_sector(int n_sites, int charge) { return Basis::sector(n_sites, charge); }

void PureState::normalize() {
  const double n = amplitudes.norm();
  if (n == 0.0) throw DomainError("normalize: zero vector");
  amplitudes /= n;
}

PureState embed_in_full(const PureState& state) {
  const Basis& b = *state.basis;
  if (b.is_full()) return state;
  auto full = std::make_shared<const Basis>(Basis::full(b.n_sites()));
  PureState out{full, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(full->size()))};
  for (std::size_t a = 0; a < b.size(); ++a) out.amplitudes[b.state(a)] = state.amplitudes[a];
  return out;
}

namespace {

void check_partial_trace(const PureState& state, int keep_sites) {
  if (!state.basis->is_full()) throw DomainError("partial_trace: state must live in the full space");
  const int n = state.basis->n_sites();
  if (keep_sites < 0 || keep_sites >= n)
    throw DomainError("partial_trace: keep_sites must be < n_sites");
}

}  // namespace

// psi viewed as a (2^N_A x 2^N_B) column-major matrix; rho_A = Psi Psi^dagger.
DensityMatrix partial_trace(const PureState& state, int keep_sites) {
  check_partial_trace(state, keep_sites);
  const Eigen::Index da = Eigen::Index{1} << keep_sites;
  const Eigen::Index db = state.amplitudes.size() / da;
  Eigen::Map<const Eigen::MatrixXcd> psi(state.amplitudes.data(), da, db);
  DensityMatrix rho{Eigen::MatrixXcd(da, da)};
  rho.elements.noalias() = psi * psi.adjoint();
  return rho;
}

DensityMatrix partial_trace_serial(const PureState& state, int keep_sites) {
  check_partial_trace(state, keep_sites);
  const std::size_t da = std::size_t{1} << keep_sites;
  const std::size_t db = state.basis->size() / da;
  DensityMatrix rho{Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(da),
                                           static_cast<Eigen::Index>(da))};
  for (std::size_t a = 0; a < da; ++a)
    for (std::size_t ap = 0; ap < da; ++ap) {
      cplx acc = 0;
      for (std::size_t e = 0; e < db; ++e)
        acc += state.amplitudes[a + e * da] * std::conj(state.amplitudes[ap + e * da]);
      rho.elements(a, ap) = acc;
    }
  return rho;
}

}  // namespace syk::fock
