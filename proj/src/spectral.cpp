#include "syk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>

#include "syk/errors.hpp"
#include "syk/hamiltonian.hpp"
#include "syk/linalg.hpp"

namespace syk {

EigenSystem diagonalize(const SparseHermitian& h, bool want_vectors) {
  const Eigen::Index cap = want_vectors ? kMaxDenseWithVectors : kMaxDenseValuesOnly;
  if (h.dim() > cap)
    throw ResourceError("diagonalize: dimension " + std::to_string(h.dim()) +
                        " exceeds the dense cap " + std::to_string(cap) +
                        "; use the Krylov propagator instead");
  Eigen::MatrixXcd m = h.to_dense();
  EigenSystem es;
  es.tag = h.tag();
  es.values = linalg::hermitian_eigen(m, want_vectors);
  if (want_vectors) es.vectors = std::move(m);
  return es;
}

double level_spacing_ratio(const Eigen::VectorXd& values, double fraction) {
  const Eigen::Index n = values.size();
  const auto skip = static_cast<Eigen::Index>(std::floor(n * (1.0 - fraction) / 2.0));
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index k = skip + 1; k + 1 < n - skip; ++k) {
    const double s0 = values[k] - values[k - 1];
    const double s1 = values[k + 1] - values[k];
    const double hi = std::max(s0, s1);
    if (hi <= 0.0) continue;
    sum += std::min(s0, s1) / hi;
    ++count;
  }
  if (count == 0) throw DomainError("level_spacing_ratio: spectrum too small");
  return sum / count;
}

Eigen::VectorXd GrandSpectrum::all_values() const {
  Eigen::Index total = 0;
  for (const auto& s : sectors) total += s.eig.values.size();
  Eigen::VectorXd all(total);
  Eigen::Index off = 0;
  for (const auto& s : sectors) {
    all.segment(off, s.eig.values.size()) = s.eig.values;
    off += s.eig.values.size();
  }
  std::sort(all.begin(), all.end());
  return all;
}

double GrandSpectrum::ground_energy() const {
  double e0 = std::numeric_limits<double>::infinity();
  for (const auto& s : sectors) e0 = std::min(e0, s.eig.values[0]);
  return e0;
}

double GrandSpectrum::max_abs_energy() const {
  double m = 0.0;
  for (const auto& s : sectors) m = std::max(m, s.eig.values.cwiseAbs().maxCoeff());
  return m;
}

GrandSpectrum grand_spectrum(const CouplingTensor& tensor, double mu, bool want_vectors,
                             SykVariant variant) {
  GrandSpectrum g;
  g.n_sites = tensor.n_sites();
  if (g.n_sites > fock::kMaxDenseSites)
    throw ResourceError("grand_spectrum: N=" + std::to_string(g.n_sites) +
                        " exceeds the dense cap of " + std::to_string(fock::kMaxDenseSites));
  for (int q = 0; q <= g.n_sites; ++q) {
    auto basis = std::make_shared<const fock::Basis>(fock::Basis::sector(g.n_sites, q));
    const SparseHermitian h = variant == SykVariant::standard ? build_syk(tensor, mu, *basis)
                                                              : build_syk_ph(tensor, mu, *basis);
    g.sectors.push_back({basis, diagonalize(h, want_vectors)});
  }
  return g;
}

std::optional<double> spectral_gap(const Eigen::VectorXd& values) {
  if (values.size() < 2) throw DomainError("spectral_gap: fewer than 2 levels");
  const double scale = std::max(std::abs(values[0]), std::abs(values[values.size() - 1]));
  const double gap = values[1] - values[0];
  if (gap < 1e-10 * scale || gap == 0.0) return std::nullopt;
  return gap;
}

GapResult ground_gap(const DisorderEnsemble& ensemble, int n_sites, double mu, double J) {
  if (n_sites % 2 != 0) throw DomainError("ground_gap: half filling needs even N");
  const fock::Basis basis = fock::Basis::sector(n_sites, n_sites / 2);
  const int count = ensemble.realization_count();
  std::vector<std::optional<double>> gaps(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> failures(gaps.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < count; ++r) {
    try {
      Rng rng = ensemble.stream(r);
      const CouplingTensor t = sample_syk(n_sites, J, rng);
      gaps[static_cast<std::size_t>(r)] =
          spectral_gap(diagonalize(build_syk(t, mu, basis), false).values);
    } catch (...) {
      failures[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  GapResult res;
  std::vector<double> kept;
  for (const auto& g : gaps) {
    if (g) kept.push_back(*g);
    else ++res.degenerate;
  }
  const auto me = stats::mean_stderr(kept);
  res.mean = me.mean;
  res.error = me.error;
  res.kept = static_cast<int>(kept.size());
  return res;
}

ThermoCurve thermodynamics(const Eigen::VectorXd& spectrum, int n_sites,
                           std::span<const double> temperatures) {
  if (spectrum.size() == 0) throw DomainError("thermodynamics: empty spectrum");
  ThermoCurve c;
  const double e0 = spectrum.minCoeff();
  for (double t : temperatures) {
    if (!(t > 0.0)) throw DomainError("thermodynamics: temperatures must be > 0");
    double z = 0.0, ez = 0.0;
    for (double e : spectrum) {
      const double w = std::exp(-(e - e0) / t);
      z += w;
      ez += (e - e0) * w;
    }
    const double f = e0 - t * std::log(z);
    const double e = e0 + ez / z;
    c.temperatures.push_back(t);
    c.free_energy_per_site.push_back(f / n_sites);
    c.energy_per_site.push_back(e / n_sites);
    c.entropy_per_site.push_back((ez / z + t * std::log(z)) / t / n_sites);
  }
  return c;
}

double von_neumann_entropy(const fock::DensityMatrix& rho) {
  Eigen::MatrixXcd m = rho.elements;
  const Eigen::VectorXd p = linalg::hermitian_eigen(m, false);
  double s = 0.0;
  for (double v : p)
    if (v > 1e-300) s -= v * std::log(v);
  return s;
}

double entanglement_entropy(const fock::PureState& state, int n_a) {
  return von_neumann_entropy(fock::partial_trace(state, n_a));
}

GroundManifold ground_manifold(const GrandSpectrum& spectrum) {
  GroundManifold gm;
  gm.energy = spectrum.ground_energy();
  const double tol = 1e-10 * std::max(spectrum.max_abs_energy(), 1e-300);
  for (const auto& s : spectrum.sectors) {
    if (!s.eig.has_vectors()) throw PreconditionError("ground_manifold: eigenvectors required");
    for (Eigen::Index k = 0; k < s.eig.values.size() && s.eig.values[k] - gm.energy <= tol; ++k)
      gm.states.push_back({s.basis, s.eig.vectors->col(k)});
  }
  return gm;
}

namespace {

/// Dense matrix of c†_site from sector q into sector q+1.
Eigen::MatrixXcd creation_matrix(int site, const fock::Basis& from, const fock::Basis& to) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(to.size()),
                                              static_cast<Eigen::Index>(from.size()));
  for (std::size_t c = 0; c < from.size(); ++c) {
    const auto r = fock::create(site, {from.state(c), 1});
    if (r) m(static_cast<Eigen::Index>(to.rank(r->bits)), static_cast<Eigen::Index>(c)) = r->sign;
  }
  return m;
}

/// c†_site (create=true) or c_site applied to a sector state.
Eigen::VectorXcd apply_ladder(int site, bool create_op, const fock::PureState& s,
                              const fock::Basis& to) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(to.size()));
  const fock::Basis& from = *s.basis;
  for (std::size_t c = 0; c < from.size(); ++c) {
    const auto r = create_op ? fock::create(site, {from.state(c), 1})
                             : fock::annihilate(site, {from.state(c), 1});
    if (r) out[static_cast<Eigen::Index>(to.rank(r->bits))] += double(r->sign) * s.amplitudes[c];
  }
  return out;
}

}  // namespace

LehmannPoles lehmann_poles(const GrandSpectrum& spectrum, int site, double temperature) {
  const int n = spectrum.n_sites;
  if (site < 0 || site >= n) throw DomainError("lehmann_poles: site out of range");
  for (const auto& s : spectrum.sectors)
    if (!s.eig.has_vectors()) throw PreconditionError("lehmann_poles: eigenvectors required");
  LehmannPoles poles;
  if (temperature == 0.0) {
    const GroundManifold gm = ground_manifold(spectrum);
    const double w0 = 1.0 / double(gm.states.size());
    for (const auto& g : gm.states) {
      const int q = g.basis->charge();
      if (q < n) {
        const auto& up = spectrum.sectors[static_cast<std::size_t>(q + 1)];
        const Eigen::VectorXcd amp =
            up.eig.vectors->adjoint() * apply_ladder(site, true, g, *up.basis);
        for (Eigen::Index m = 0; m < amp.size(); ++m) {
          poles.positions.push_back(up.eig.values[m] - gm.energy);
          poles.weights.push_back(w0 * std::norm(amp[m]));
        }
      }
      if (q > 0) {
        const auto& down = spectrum.sectors[static_cast<std::size_t>(q - 1)];
        const Eigen::VectorXcd amp =
            down.eig.vectors->adjoint() * apply_ladder(site, false, g, *down.basis);
        for (Eigen::Index m = 0; m < amp.size(); ++m) {
          poles.positions.push_back(gm.energy - down.eig.values[m]);
          poles.weights.push_back(w0 * std::norm(amp[m]));
        }
      }
    }
    return poles;
  }
  if (temperature < 0.0) throw DomainError("lehmann_poles: negative temperature");
  Eigen::Index total = 0;
  for (const auto& s : spectrum.sectors) total += s.eig.values.size();
  if (total > 2000)
    throw ResourceError("lehmann_poles: finite-temperature sum limited to dimension 2000");
  const double e0 = spectrum.ground_energy();
  double z = 0.0;
  for (const auto& s : spectrum.sectors)
    for (double e : s.eig.values) z += std::exp(-(e - e0) / temperature);
  for (int q = 0; q < n; ++q) {
    const auto& lo = spectrum.sectors[static_cast<std::size_t>(q)];
    const auto& hi = spectrum.sectors[static_cast<std::size_t>(q + 1)];
    const Eigen::MatrixXcd a = hi.eig.vectors->adjoint() *
                               creation_matrix(site, *lo.basis, *hi.basis) * (*lo.eig.vectors);
    for (Eigen::Index m = 0; m < a.rows(); ++m)
      for (Eigen::Index k = 0; k < a.cols(); ++k) {
        const double el = lo.eig.values[k], eh = hi.eig.values[m];
        poles.positions.push_back(eh - el);
        poles.weights.push_back(std::norm(a(m, k)) *
                                (std::exp(-(el - e0) / temperature) +
                                 std::exp(-(eh - e0) / temperature)) /
                                z);
      }
  }
  return poles;
}

SpectralFunction broaden(const LehmannPoles& poles, std::span<const double> omega_grid,
                         double eta) {
  if (!(eta > 0.0)) throw DomainError("broaden: eta must be > 0");
  SpectralFunction g;
  g.omega_grid.assign(omega_grid.begin(), omega_grid.end());
  g.eta = eta;
  g.retarded_g = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(omega_grid.size()));
  const auto n = static_cast<std::int64_t>(omega_grid.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    cplx acc = 0;
    for (std::size_t p = 0; p < poles.positions.size(); ++p)
      acc += poles.weights[p] / cplx(omega_grid[k] - poles.positions[p], eta);
    g.retarded_g[k] = acc;
  }
  return g;
}

SpectralFunction greens_lehmann(const GrandSpectrum& spectrum, int site,
                                std::span<const double> omega_grid, double eta,
                                double temperature) {
  return broaden(lehmann_poles(spectrum, site, temperature), omega_grid, eta);
}

double default_eta(const LehmannPoles& poles) {
  std::vector<double> pos;
  for (std::size_t p = 0; p < poles.positions.size(); ++p)
    if (poles.weights[p] > 1e-12) pos.push_back(poles.positions[p]);
  if (pos.size() < 2) return 1e-2;
  std::sort(pos.begin(), pos.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  // Mean spacing among the poles nearest to zero frequency.
  const std::size_t k = std::min<std::size_t>(pos.size(), 16);
  std::vector<double> near(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(near.begin(), near.end());
  const double spacing = (near.back() - near.front()) / double(k - 1);
  return spacing > 0.0 ? 4.0 * spacing : 1e-2;
}

double spectral_weight(const SpectralFunction& g) {
  double s = 0.0;
  for (std::size_t k = 1; k < g.omega_grid.size(); ++k)
    s += 0.5 * (g.omega_grid[k] - g.omega_grid[k - 1]) *
         (g.retarded_g[static_cast<Eigen::Index>(k)].imag() +
          g.retarded_g[static_cast<Eigen::Index>(k - 1)].imag());
  return -s / std::numbers::pi;
}

}  // namespace syk
