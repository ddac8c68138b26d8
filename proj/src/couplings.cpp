#include "syk/couplings.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "syk/errors.hpp"

namespace syk {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  std::array<char, sizeof(T)> buf;
  std::memcpy(buf.data(), &value, sizeof(T));
  out.write(buf.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<char, sizeof(T)> buf;
  if (!in.read(buf.data(), sizeof(T))) throw DomainError("read_tensor: truncated stream");
  T value;
  std::memcpy(&value, buf.data(), sizeof(T));
  return value;
}

constexpr std::uint32_t kTensorVersion = 1;

}  // namespace

DisorderEnsemble::DisorderEnsemble(std::uint64_t master_seed, int realization_count)
    : master_seed_(master_seed), count_(realization_count) {
  if (realization_count < 1) throw DomainError("ensemble: realization_count must be >= 1");
}

Rng DisorderEnsemble::stream(int realization) const {
  const std::uint64_t a = splitmix64(master_seed_);
  const std::uint64_t b = splitmix64(a ^ splitmix64(static_cast<std::uint64_t>(realization)));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

DisorderEnsemble ensemble_streams(std::uint64_t master_seed, int realization_count) {
  return DisorderEnsemble(master_seed, realization_count);
}

CouplingTensor::CouplingTensor(int n_sites, double variance_scale)
    : n_sites_(n_sites), j_(variance_scale), pairs_(n_sites * (n_sites - 1) / 2) {
  if (n_sites < 4 || n_sites > fock::kMaxEnumerateSites)
    throw DomainError("coupling tensor: n_sites must be in 4.." +
                      std::to_string(fock::kMaxEnumerateSites));
  entries_.assign(static_cast<std::size_t>(pairs_) * (pairs_ + 1) / 2, cplx{0.0, 0.0});
}

cplx CouplingTensor::operator()(int i, int j, int k, int l) const {
  if (i == j || k == l) return {0.0, 0.0};
  double sign = 1.0;
  if (i > j) {
    std::swap(i, j);
    sign = -sign;
  }
  if (k > l) {
    std::swap(k, l);
    sign = -sign;
  }
  return sign * pair_element(pair_index(i, j, n_sites_), pair_index(k, l, n_sites_));
}

bool CouplingTensor::is_zero() const {
  for (const cplx& v : entries_)
    if (v != cplx{0.0, 0.0}) return false;
  return true;
}

CouplingTensor sample_syk(int n_sites, double J, Rng& rng) {
  if (n_sites < 4) throw DomainError("sample_syk: n_sites < 4 admits no quartic term");
  CouplingTensor t(n_sites, J);
  if (J == 0.0) return t;
  std::normal_distribution<double> diag(0.0, J);
  std::normal_distribution<double> half(0.0, J / std::sqrt(2.0));
  const int p = t.pair_count();
  for (int a = 0; a < p; ++a) {
    t.canonical(a, a) = {diag(rng), 0.0};
    for (int b = a + 1; b < p; ++b) {
      const double re = half(rng);
      const double im = half(rng);
      t.canonical(a, b) = {re, im};
    }
  }
  return t;
}

void write_tensor(std::ostream& out, const CouplingTensor& tensor) {
  out.write("SYKJ", 4);
  put_le<std::uint32_t>(out, kTensorVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.n_sites()));
  put_le<double>(out, tensor.variance_scale());
  const int n = tensor.n_sites();
  std::vector<std::array<int, 2>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  const int p = tensor.pair_count();
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b) {
      const cplx v = tensor.pair_element(a, b);
      put_le<std::uint8_t>(out, static_cast<std::uint8_t>(pairs[a][0]));
      put_le<std::uint8_t>(out, static_cast<std::uint8_t>(pairs[a][1]));
      put_le<std::uint8_t>(out, static_cast<std::uint8_t>(pairs[b][0]));
      put_le<std::uint8_t>(out, static_cast<std::uint8_t>(pairs[b][1]));
      put_le<double>(out, v.real());
      put_le<double>(out, v.imag());
    }
}

CouplingTensor read_tensor(std::istream& in) {
  std::array<char, 4> magic;
  if (!in.read(magic.data(), 4) || std::string(magic.data(), 4) != "SYKJ")
    throw DomainError("read_tensor: bad magic");
  if (get_le<std::uint32_t>(in) != kTensorVersion) throw DomainError("read_tensor: bad version");
  const auto n = static_cast<int>(get_le<std::uint32_t>(in));
  const double J = get_le<double>(in);
  CouplingTensor t(n, J);
  const int p = t.pair_count();
  for (int a = 0; a < p; ++a)
    for (int b = a; b < p; ++b) {
      const int i = get_le<std::uint8_t>(in);
      const int j = get_le<std::uint8_t>(in);
      const int k = get_le<std::uint8_t>(in);
      const int l = get_le<std::uint8_t>(in);
      if (i >= j || k >= l || j >= n || l >= n || pair_index(i, j, n) != a ||
          pair_index(k, l, n) != b)
        throw DomainError("read_tensor: entries out of canonical order");
      const double re = get_le<double>(in);
      const double im = get_le<double>(in);
      if (a == b && im != 0.0) throw DomainError("read_tensor: diagonal entry not real");
      t.canonical(a, b) = {re, im};
    }
  return t;
}

HoppingMatrix sample_hopping(int n_sites, double t, Rng& rng) {
  if (n_sites < 2) throw DomainError("sample_hopping: n_sites must be >= 2");
  HoppingMatrix h{n_sites, t, Eigen::MatrixXcd::Zero(n_sites, n_sites)};
  if (t == 0.0) return h;
  std::normal_distribution<double> diag(0.0, t);
  std::normal_distribution<double> half(0.0, t / std::sqrt(2.0));
  for (int i = 0; i < n_sites; ++i) {
    h.entries(i, i) = {diag(rng), 0.0};
    for (int j = i + 1; j < n_sites; ++j) {
      const double re = half(rng);
      const double im = half(rng);
      h.entries(i, j) = {re, im};
      h.entries(j, i) = {re, -im};
    }
  }
  return h;
}

}  // namespace syk
