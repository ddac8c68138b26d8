#include "syk/battery.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <numbers>

#include "syk/errors.hpp"
#include "syk/hamiltonian.hpp"
#include "syk/linalg.hpp"

namespace syk {

double ergotropy(const fock::DensityMatrix& rho, std::span<const double> energies) {
  const Eigen::Index d = rho.dim();
  if (d != static_cast<Eigen::Index>(energies.size()))
    throw DomainError("ergotropy: density matrix and spectrum sizes differ");
  Eigen::MatrixXcd work = rho.elements;
  Eigen::VectorXd r = linalg::hermitian_eigen(work, false);
  const double tol = 1e-10 * std::max(1.0, std::abs(rho.elements.trace()));
  if (d > 0 && r[0] < -tol) throw DomainError("ergotropy: density matrix is not positive semidefinite");

  double active = 0.0;
  for (Eigen::Index a = 0; a < d; ++a) active += rho.elements(a, a).real() * energies[a];
  std::vector<double> eps(energies.begin(), energies.end());
  std::sort(eps.begin(), eps.end());
  double passive = 0.0;
  for (Eigen::Index n = 0; n < d; ++n) passive += r[d - 1 - n] * eps[n];
  return active - passive;
}

void rotate_to_y_basis(Eigen::VectorXcd& psi, int n_sites) {
  const std::size_t dim = std::size_t{1} << n_sites;
  if (static_cast<std::size_t>(psi.size()) != dim) throw DomainError("rotate_to_y_basis: size mismatch");
  const double s = 1.0 / std::numbers::sqrt2;
  const cplx mi(0.0, -1.0);
  for (int j = 0; j < n_sites; ++j) {
    const std::size_t m = std::size_t{1} << j;
    for (std::size_t x = 0; x < dim; ++x) {
      if (x & m) continue;
      const cplx up = psi[x | m];
      const cplx down = psi[x];
      psi[x | m] = s * (up + mi * down);  // <+y|
      psi[x] = s * (mi * up + down);      // <-y|
    }
  }
}

std::vector<double> default_tau_grid(double J) {
  std::vector<double> t{0.0};
  const int n = 200;
  const double a = std::log(1e-2 / J), b = std::log(50.0 / J);
  for (int k = 0; k < n; ++k) t.push_back(std::exp(a + (b - a) * k / (n - 1)));
  return t;
}

BatteryRun battery_charge_syk(const CouplingTensor& tensor, double omega,
                              std::span<const double> tau_grid, BatteryVariant variant,
                              std::span<const int> ergotropy_sizes,
                              const BatteryOptions& options) {
  const int n = tensor.n_sites();
  if (n > fock::kMaxDenseSites)
    throw ResourceError("battery_charge_syk: N = " + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(fock::kMaxDenseSites));
  if (tau_grid.empty() || tau_grid.front() != 0.0)
    throw DomainError("battery_charge_syk: tau grid must start at 0");
  if (!std::is_sorted(tau_grid.begin(), tau_grid.end()))
    throw DomainError("battery_charge_syk: tau grid must be ascending");
  for (int m : ergotropy_sizes)
    if (m < 1 || m > n) throw DomainError("battery_charge_syk: ergotropy size out of range");

  const std::size_t dim = std::size_t{1} << n;
  const std::size_t nt = tau_grid.size();
  // Ground state of (omega/2) sum sigma^y: (i|up> + |down>)/sqrt2 on every site.
  static constexpr cplx kPowI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const double amp = std::pow(2.0, -0.5 * n);

  std::vector<Eigen::VectorXcd> states(nt, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim)));
  for (int q = 0; q <= n; ++q) {
    const auto basis = std::make_shared<const fock::Basis>(fock::Basis::sector(n, q));
    auto h = std::make_shared<const SparseHermitian>(
        variant == BatteryVariant::fermionic ? build_syk(tensor, 0.0, *basis)
                                             : build_bosonic_syk(tensor, *basis));
    const Propagator prop = h->dim() <= options.eigen_max_dim
                                ? Propagator::eigen(h)
                                : Propagator::krylov(h, options.krylov);
    Eigen::VectorXcd v0(h->dim());
    for (std::size_t k = 0; k < basis->size(); ++k) v0[k] = amp * kPowI[q % 4];
    const auto evolved = prop.evolve_grid(v0, tau_grid);
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t k = 0; k < basis->size(); ++k) states[t][basis->state(k)] = evolved[t][k];
  }

  BatteryRun run;
  run.tau_grid.assign(tau_grid.begin(), tau_grid.end());
  run.n_sites = n;
  run.J = tensor.variance_scale();
  run.omega = omega;
  run.variant = variant == BatteryVariant::fermionic ? "fermionic" : "bosonic";
  run.ergotropy_sizes.assign(ergotropy_sizes.begin(), ergotropy_sizes.end());
  run.ergotropy.assign(ergotropy_sizes.size(), std::vector<double>(nt));
  run.populations = Eigen::MatrixXd::Zero(n + 1, static_cast<Eigen::Index>(nt));
  run.energy.resize(nt);
  run.power.resize(nt);

  const auto full = std::make_shared<const fock::Basis>(fock::Basis::full(n));
  for (std::size_t t = 0; t < nt; ++t) {
    Eigen::VectorXcd& psi = states[t];
    rotate_to_y_basis(psi, n);
    std::vector<double> p(n + 1, 0.0);
    for (std::size_t x = 0; x < dim; ++x) p[std::popcount(x)] += std::norm(psi[x]);
    double e = 0.0;
    for (int k = 0; k <= n; ++k) {
      run.populations(k, static_cast<Eigen::Index>(t)) = p[k];
      e += k * p[k];
    }
    run.energy[t] = omega * e;
    run.power[t] = tau_grid[t] > 0 ? run.energy[t] / tau_grid[t] : 0.0;

    for (std::size_t s = 0; s < ergotropy_sizes.size(); ++s) {
      const int m = ergotropy_sizes[s];
      if (m == n) {
        // Pure state: all energy above the ground level is extractable.
        run.ergotropy[s][t] = run.energy[t];
        continue;
      }
      const fock::DensityMatrix rho = fock::partial_trace({full, psi}, m);
      std::vector<double> eps(std::size_t{1} << m);
      for (std::size_t a = 0; a < eps.size(); ++a) eps[a] = omega * (std::popcount(a) - 0.5 * m);
      run.ergotropy[s][t] = ergotropy(rho, eps);
    }
    psi.resize(0);  // release memory as we go
  }
  return run;
}

PowerPoint summarize_power(const std::vector<BatteryRun>& runs) {
  if (runs.empty()) throw DomainError("summarize_power: no runs");
  const std::size_t nt = runs.front().tau_grid.size();
  for (const auto& r : runs)
    if (r.tau_grid != runs.front().tau_grid || r.n_sites != runs.front().n_sites)
      throw DomainError("summarize_power: runs differ in grid or size");

  std::vector<double> column(runs.size());
  auto average = [&](auto getter, std::size_t t) {
    for (std::size_t r = 0; r < runs.size(); ++r) column[r] = getter(runs[r], t);
    return stats::mean_stderr(column);
  };
  PowerPoint pt;
  pt.n_sites = runs.front().n_sites;
  pt.realizations = static_cast<int>(runs.size());
  std::size_t best = 0;
  std::vector<double> mean_energy(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto p = average([](const BatteryRun& r, std::size_t i) { return r.power[i]; }, t);
    mean_energy[t] = average([](const BatteryRun& r, std::size_t i) { return r.energy[i]; }, t).mean;
    if (t == 0 || p.mean > pt.p_star) {
      pt.p_star = p.mean;
      pt.p_star_error = p.error;
      best = t;
    }
  }
  pt.tau_star = runs.front().tau_grid[best];
  pt.energy_at_tau_star = mean_energy[best];
  const std::size_t tail = nt - std::max<std::size_t>(1, nt / 5);
  pt.energy_plateau = stats::pairwise_sum(std::span(mean_energy).subspan(tail)) / double(nt - tail);
  for (std::size_t r = 0; r < runs.size(); ++r)
    column[r] = *std::max_element(runs[r].power.begin(), runs[r].power.end());
  pt.p_star_max_then_avg = stats::mean_stderr(column).mean;
  return pt;
}

stats::LineFit power_law_fit(std::span<const double> sizes, std::span<const double> values) {
  if (sizes.size() < 3 || values.size() != sizes.size())
    throw DomainError("power_law_fit: need at least 3 sizes");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] <= 0 || values[k] <= 0) throw DomainError("power_law_fit: values must be positive");
    x.push_back(std::log(sizes[k]));
    y.push_back(std::log(values[k]));
  }
  return stats::fit_line(x, y);
}

PowerScaling battery_power_scaling(const DisorderEnsemble& ensemble, std::span<const int> sizes,
                                   double omega, BatteryVariant variant,
                                   std::span<const double> tau_grid, double J) {
  if (sizes.size() < 3) throw DomainError("battery_power_scaling: need at least 3 sizes");
  PowerScaling out;
  std::vector<double> ns, ps;
  for (int n : sizes) {
    if (n < 4 || n % 2) throw DomainError("battery_power_scaling: sizes must be even");
    std::vector<BatteryRun> runs(static_cast<std::size_t>(ensemble.realization_count()));
    std::vector<std::exception_ptr> failures(runs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < ensemble.realization_count(); ++r) {
      try {
        Rng rng = ensemble.stream(r);
        const CouplingTensor tensor = sample_syk(n, J, rng);
        runs[r] = battery_charge_syk(tensor, omega, tau_grid, variant);
        runs[r].seed = ensemble.master_seed();
      } catch (...) {
        failures[r] = std::current_exception();
      }
    }
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
    out.points.push_back(summarize_power(runs));
    ns.push_back(n);
    ps.push_back(out.points.back().p_star);
  }
  out.fit = power_law_fit(ns, ps);
  return out;
}

}  // namespace syk
