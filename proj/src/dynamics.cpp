#include "syk/dynamics.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "syk/errors.hpp"
#include "syk/stats.hpp"

namespace syk {

SparseHermitian build_quadrature(int site, int n_sites, Quadrature kind) {
  if (n_sites < 1 || n_sites > fock::kMaxEnumerateSites || site < 0 || site >= n_sites)
    throw DomainError("build_quadrature: site out of range");
  const std::size_t dim = std::size_t{1} << n_sites;
  std::vector<std::vector<SparseHermitian::Entry>> rows(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    const auto bits = static_cast<Bits>(x);
    const double sign = fock::string_sign(bits, site);
    const Bits flipped = bits ^ (Bits{1} << site);
    const bool occupied = (bits >> site) & 1u;
    // <flipped| c† |x> = sign when empty; <flipped| c |x> = sign when occupied.
    cplx v;
    if (kind == Quadrature::x) {
      v = sign;
    } else {
      v = occupied ? cplx(0, -sign) : cplx(0, sign);
    }
    rows[flipped].push_back({static_cast<std::uint32_t>(x), v});
  }
  return SparseHermitian(std::move(rows), BasisTag::full_space);
}

namespace {

int full_space_sites(const SparseHermitian& h) {
  const auto d = static_cast<std::uint64_t>(h.dim());
  if (d < 2 || !std::has_single_bit(d)) throw DomainError("otoc: Hamiltonian must act on a full 2^N space");
  return std::countr_zero(d);
}

std::string label(char name, int site) { return std::string(1, name) + "_" + std::to_string(site); }

}  // namespace

OtocCurve otoc(const SparseHermitian& h, int w_site, int v_site, std::span<const double> t_grid,
               double beta, const OtocOptions& options) {
  if (w_site == v_site) throw DomainError("otoc: W and V must act on different sites");
  if (beta != 0.0) throw DomainError("otoc: only infinite temperature (beta = 0) is supported");
  const int n = full_space_sites(h);
  const SparseHermitian w = build_quadrature(w_site, n, Quadrature::x);
  const SparseHermitian v = build_quadrature(v_site, n, Quadrature::p);

  OtocCurve out;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  out.w_label = label('x', w_site);
  out.v_label = label('p', v_site);
  const Eigen::Index dim = h.dim();

  if (n <= options.exact_max_sites) {
    const EigenSystem eig = diagonalize(h, true);
    const Eigen::MatrixXcd& u = *eig.vectors;
    const Eigen::MatrixXcd wt = u.adjoint() * (w.to_dense() * u);
    const Eigen::MatrixXcd vt = u.adjoint() * (v.to_dense() * u);
    for (double t : t_grid) {
      Eigen::MatrixXcd wdt = wt;
      for (Eigen::Index b = 0; b < dim; ++b)
        for (Eigen::Index a = 0; a < dim; ++a)
          wdt(a, b) *= std::polar(1.0, (eig.values[a] - eig.values[b]) * t);
      const Eigen::MatrixXcd x = wdt * vt;  // W(t) V; V W(t) = x†
      // Tr(X X) and -Tr((X - X†)^2) = ||X - X†||_F^2.
      cplx f = (x.array() * x.transpose().array()).sum() / static_cast<double>(dim);
      const double c = (x - x.adjoint()).squaredNorm() / static_cast<double>(dim);
      out.f_t.push_back(f);
      out.c_t.push_back(c);
      out.c_error.push_back(0.0);
    }
    return out;
  }

  // Random phase states: E|<r|A|r>| = Tr A / dim.
  const auto shared = std::make_shared<const SparseHermitian>(h);
  const Propagator prop = Propagator::automatic(shared);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  const int r_count = options.random_states;
  if (r_count < 2) throw DomainError("otoc: need at least two random states");
  std::vector<Eigen::VectorXcd> states;
  for (int r = 0; r < r_count; ++r) {
    Eigen::VectorXcd s(dim);
    for (Eigen::Index k = 0; k < dim; ++k) s[k] = std::polar(1.0 / std::sqrt(double(dim)), phase(rng));
    states.push_back(std::move(s));
  }
  auto heisenberg_w = [&](const Eigen::VectorXcd& psi, double t) {
    return prop.evolve(w * prop.evolve(psi, t), -t);
  };
  out.samples = r_count;
  for (double t : t_grid) {
    std::vector<double> fs_re, fs_im, cs;
    for (const auto& r : states) {
      const Eigen::VectorXcd p = heisenberg_w(v * r, t);
      const Eigen::VectorXcd q = v * heisenberg_w(r, t);
      const cplx f = q.dot(p);
      fs_re.push_back(f.real());
      fs_im.push_back(f.imag());
      cs.push_back((p - q).squaredNorm());
    }
    const auto c = stats::mean_stderr(cs);
    out.f_t.emplace_back(stats::mean_stderr(fs_re).mean, stats::mean_stderr(fs_im).mean);
    out.c_t.push_back(c.mean);
    out.c_error.push_back(c.error);
  }
  return out;
}

}  // namespace syk
