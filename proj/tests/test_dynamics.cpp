#include <gtest/gtest.h>

#include <bit>
#include <numbers>
#include <random>

#include "support/oracle.hpp"
#include "syk/battery.hpp"
#include "syk/dynamics.hpp"
#include "syk/errors.hpp"
#include "syk/hamiltonian.hpp"
#include "syk/krylov.hpp"

using namespace syk;
using fock::Basis;

namespace {

CouplingTensor tensor(int n, std::uint64_t seed) {
  Rng rng = DisorderEnsemble(seed, 1).stream(0);
  return sample_syk(n, 1.0, rng);
}

std::shared_ptr<const SparseHermitian> shared(SparseHermitian h) {
  return std::make_shared<const SparseHermitian>(std::move(h));
}

Eigen::VectorXcd random_unit(Eigen::Index dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v / v.norm();
}

Eigen::VectorXcd dense_evolve(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd phases = (es.eigenvalues() * cplx(0, -t)).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * (es.eigenvectors().adjoint() * psi);
}

fock::DensityMatrix diag_rho(std::vector<double> p) {
  fock::DensityMatrix r{Eigen::MatrixXcd::Zero(p.size(), p.size())};
  for (std::size_t i = 0; i < p.size(); ++i) r.elements(i, i) = p[i];
  return r;
}

}  // namespace

// ---------------------------------------------------------------- propagation

TEST(Evolve, ZeroTimeIsIdentity) {
  auto h = shared(build_syk(tensor(8, 1), 0.0, Basis::sector(8, 4)));
  const auto psi = random_unit(h->dim(), 1);
  for (const auto& p : {Propagator::eigen(h), Propagator::krylov(h)})
    EXPECT_LT((p.evolve(psi, 0.0) - psi).norm(), 1e-14);
}

TEST(Evolve, EigenstateOnlyPicksUpPhase) {
  const int n = 8;
  auto h0 = shared(build_battery_h0(n, 1.0));
  Eigen::VectorXcd psi(256);
  for (Eigen::Index s = 0; s < 256; ++s) psi[s] = std::pow(cplx(0, 1), std::popcount(unsigned(s))) / 16.0;
  for (const auto& p : {Propagator::eigen(h0), Propagator::krylov(h0)}) {
    const auto out = p.evolve(psi, 7.3);
    EXPECT_NEAR(std::abs(psi.dot(out)), 1.0, 1e-10);
    EXPECT_LT((out - std::polar(1.0, 7.3 * n / 2.0) * psi).norm(), 1e-9);
  }
}

TEST(Evolve, EigenAndKrylovAgreeAtN10) {
  auto h = shared(build_syk(tensor(10, 2), 0.0, Basis::sector(10, 5)));
  const auto psi = random_unit(h->dim(), 2);
  const auto a = Propagator::eigen(h).evolve(psi, 10.0);
  const auto kp = Propagator::krylov(h);
  const auto b = kp.evolve(psi, 10.0);
  EXPECT_GT(std::abs(a.dot(b)), 1 - 1e-8);
  EXPECT_LT((a - b).norm(), 1e-8);
  EXPECT_GT(kp.matvec_count(), 0u);
}

TEST(Evolve, MatchesDenseExponentialBothDirections) {
  const auto sh = build_syk(tensor(6, 3), 0.2, Basis::full(6));
  auto h = shared(sh);
  const auto psi = random_unit(64, 3);
  const auto dense = sh.to_dense();
  for (double t : {-4.0, 0.3, 12.0}) {
    const auto want = dense_evolve(dense, psi, t);
    EXPECT_LT((Propagator::krylov(h).evolve(psi, t) - want).norm(), 1e-9) << t;
    EXPECT_LT((Propagator::eigen(h).evolve(psi, t) - want).norm(), 1e-11) << t;
  }
}

TEST(Evolve, GridMatchesPointwiseAndPreservesNorm) {
  auto h = shared(build_syk(tensor(12, 4), 0.0, Basis::sector(12, 6)));
  const auto psi = random_unit(h->dim(), 4);
  const std::vector<double> grid{0.0, 0.01, 0.5, 0.51, 3.0, 20.0, 50.0};
  const auto kp = Propagator::krylov(h);
  const auto ep = Propagator::eigen(h);
  const auto ks = kp.evolve_grid(psi, grid);
  const auto es = ep.evolve_grid(psi, grid);
  ASSERT_EQ(ks.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LT(std::abs(ks[i].norm() - 1.0), 1e-9);
    EXPECT_LT(std::abs(es[i].norm() - 1.0), 1e-9);
    EXPECT_LT((ks[i] - es[i]).norm(), 1e-8) << grid[i];
  }
}

TEST(Evolve, EnergyConservedDuringCharging) {
  const auto sh = build_syk(tensor(10, 5), 0.0, Basis::sector(10, 4));
  auto h = shared(sh);
  const auto psi = random_unit(h->dim(), 5);
  const double e0 = psi.dot(sh * psi).real();
  const std::vector<double> grid{0, 1, 5, 25};
  for (const auto& s : Propagator::krylov(h).evolve_grid(psi, grid))
    EXPECT_NEAR(s.dot(sh * s).real(), e0, 1e-8);
}

TEST(Evolve, FreeFunctionUsesAutomaticPath) {
  const auto sh = build_syk(tensor(8, 6), 0.0, Basis::sector(8, 3));
  auto basis = std::make_shared<const Basis>(Basis::sector(8, 3));
  fock::PureState psi{basis, random_unit(sh.dim(), 6)};
  const auto out = evolve(sh, psi, 2.5);
  EXPECT_LT((out.amplitudes - dense_evolve(sh.to_dense(), psi.amplitudes, 2.5)).norm(), 1e-10);
  EXPECT_TRUE(Propagator::automatic(shared(sh)).uses_eigen());
}

// Per-sector evolution recombined equals full-space evolution.
TEST(Evolve, SectorBlocksEqualFullSpace) {
  for (int n : {6, 8}) {
    const auto t = tensor(n, 7 + n);
    const auto psi = random_unit(Eigen::Index{1} << n, 8);
    const double time = 6.0;
    const auto full = Propagator::krylov(shared(build_syk(t, 0.0, Basis::full(n)))).evolve(psi, time);
    Eigen::VectorXcd glued = Eigen::VectorXcd::Zero(psi.size());
    for (int q = 0; q <= n; ++q) {
      const Basis b = Basis::sector(n, q);
      Eigen::VectorXcd part(b.size());
      for (std::size_t k = 0; k < b.size(); ++k) part[k] = psi[b.state(k)];
      const auto out = Propagator::eigen(shared(build_syk(t, 0.0, b))).evolve(part, time);
      for (std::size_t k = 0; k < b.size(); ++k) glued[b.state(k)] = out[k];
    }
    EXPECT_GT(std::abs(full.dot(glued)), 1 - 1e-9);
  }
}

// ---------------------------------------------------------------- OTOC

TEST(Otoc, TwoSiteOracleAtTimeZero) {
  const int n = 2;
  const oracle::Mat w = oracle::annihilator(0, n) + oracle::creator(0, n);
  const oracle::Mat v = cplx(0, 1) * (oracle::creator(1, n) - oracle::annihilator(1, n));
  EXPECT_LT((build_quadrature(0, n, Quadrature::x).to_dense() - w).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((build_quadrature(1, n, Quadrature::p).to_dense() - v).cwiseAbs().maxCoeff(), 1e-15);
  const oracle::Mat comm = w * v - v * w;
  const double c0 = -(comm * comm).trace().real() / 4.0;
  const cplx f0 = (w * v * w * v).trace() / 4.0;

  const double t0[] = {0.0};
  HoppingMatrix zero{n, 0.0, Eigen::MatrixXcd::Zero(n, n)};
  const auto curve = otoc(build_free_fermion(zero, Basis::full(n)), 0, 1, t0);
  EXPECT_NEAR(curve.c_t[0], c0, 1e-12);
  EXPECT_NEAR(std::abs(curve.f_t[0] - f0), 0.0, 1e-12);
  EXPECT_EQ(curve.w_label, "x_0");
  EXPECT_EQ(curve.v_label, "p_1");
}

TEST(Otoc, CommutatorAndCorrelatorAreConsistent) {
  const auto h = build_syk(tensor(8, 9), 0.0, Basis::full(8));
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.5 * i);
  const auto c = otoc(h, 0, 3, grid);
  EXPECT_EQ(c.samples, 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // W^2 = V^2 = 1 gives c = 2 - 2 Re F.
    EXPECT_NEAR(c.c_t[i], 2.0 - 2.0 * c.f_t[i].real(), 1e-9);
    EXPECT_GE(c.c_t[i], -1e-9);
    EXPECT_LE(c.c_t[i], 4.0 + 1e-9);
  }
  EXPECT_NEAR(c.c_t[0], 4.0, 1e-12);
  // Scrambling: the correlator decays well below its initial magnitude.
  EXPECT_LT(std::abs(c.f_t.back()), 0.5);
}

TEST(Otoc, StochasticTraceTracksExact) {
  const auto h = build_syk(tensor(8, 10), 0.0, Basis::full(8));
  const std::vector<double> grid{0.0, 1.0, 3.0};
  const auto exact = otoc(h, 1, 2, grid);
  OtocOptions opt;
  opt.exact_max_sites = 0;
  opt.random_states = 40;
  opt.seed = 3;
  const auto est = otoc(h, 1, 2, grid, 0.0, opt);
  EXPECT_EQ(est.samples, 40);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(est.c_t[i], exact.c_t[i], 5 * est.c_error[i] + 0.05) << grid[i];
}

TEST(Otoc, FreeFermionStaysBounded) {
  Rng rng(1);
  const auto h = build_free_fermion(sample_hopping(8, 1.0, rng), Basis::full(8));
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(i);
  for (double c : otoc(h, 0, 1, grid).c_t) {
    EXPECT_GE(c, -1e-9);
    EXPECT_LE(c, 4.0 + 1e-9);
  }
}

TEST(Otoc, Errors) {
  const auto h = build_syk(tensor(6, 1), 0.0, Basis::full(6));
  const double g[] = {0.0};
  EXPECT_THROW(otoc(h, 2, 2, g), DomainError);
  EXPECT_THROW(otoc(h, 0, 1, g, 1.0), DomainError);
  EXPECT_THROW(otoc(build_syk(tensor(6, 1), 0.0, Basis::sector(6, 3)), 0, 1, g), DomainError);
}

// ---------------------------------------------------------------- ergotropy

TEST(Ergotropy, HandExamples) {
  const double two[] = {0.0, 1.0};
  EXPECT_NEAR(ergotropy(diag_rho({0.2, 0.8}), two), 0.6, 1e-14);
  const double w = 1.7;
  const double level[] = {0.0, w};
  EXPECT_NEAR(ergotropy(diag_rho({0.0, 1.0}), level), w, 1e-14);
  const double four[] = {-1.0, 0.3, 0.3, 2.0};
  EXPECT_NEAR(ergotropy(diag_rho({0.25, 0.25, 0.25, 0.25}), four), 0.0, 1e-14);
}

TEST(Ergotropy, InvariancesAndBounds) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 8;
    Eigen::MatrixXcd a(d, d);
    for (auto& x : a.reshaped()) x = {g(rng), g(rng)};
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace();
    std::vector<double> eps(d);
    for (int i = 0; i < d; ++i) eps[i] = 0.5 * std::popcount(unsigned(i));
    const double e = ergotropy({rho}, eps);
    EXPECT_NEAR(e, oracle::ergotropy(rho, eps), 1e-12);

    double energy = 0;
    for (int i = 0; i < d; ++i) energy += rho(i, i).real() * eps[i];
    EXPECT_GE(e, -1e-12);
    EXPECT_LE(e, energy - eps[0] + 1e-12);

    std::vector<double> shifted(eps);
    for (auto& x : shifted) x += 3.25;
    EXPECT_NEAR(ergotropy({rho}, shifted), e, 1e-10);

    // Cycling the labels inside each degenerate block {1,2,4} and {3,5,6}.
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(d);
    perm.indices() << 0, 2, 4, 5, 1, 6, 3, 7;
    std::vector<double> peps(d);
    for (int i = 0; i < d; ++i) peps[perm.indices()[i]] = eps[i];
    ASSERT_EQ(peps, eps);
    const Eigen::MatrixXcd prho = perm * rho * perm.transpose();
    EXPECT_NEAR(ergotropy({prho}, peps), e, 1e-10);

    // Only the spectrum of rho matters: conjugate by a random unitary of the labels.
    Eigen::MatrixXcd z(d, d);
    for (auto& x : z.reshaped()) x = {g(rng), g(rng)};
    const Eigen::MatrixXcd u = Eigen::HouseholderQR<Eigen::MatrixXcd>(z).householderQ();
    const Eigen::MatrixXcd urho = u * rho * u.adjoint();
    EXPECT_NEAR(ergotropy({urho}, eps), oracle::ergotropy(urho, eps), 1e-12);
  }
}

TEST(Ergotropy, TiesInPopulationsDoNotMatter) {
  const double eps[] = {0.0, 1.0, 1.0, 2.0};
  const double a = ergotropy(diag_rho({0.1, 0.3, 0.3, 0.3}), eps);
  const double b = ergotropy(diag_rho({0.3, 0.3, 0.1, 0.3}), eps);
  const double c = ergotropy(diag_rho({0.3, 0.3, 0.3, 0.1}), eps);
  EXPECT_NEAR(a, oracle::ergotropy(diag_rho({0.1, 0.3, 0.3, 0.3}).elements, {0, 1, 1, 2}), 1e-14);
  EXPECT_NEAR(b, 0.2, 1e-14);
  EXPECT_NEAR(c, 0.0, 1e-14);
}

TEST(Ergotropy, RejectsNonPositiveAndMismatched) {
  const double two[] = {0.0, 1.0};
  EXPECT_THROW(ergotropy(diag_rho({1.2, -0.2}), two), DomainError);
  const double three[] = {0.0, 1.0, 2.0};
  EXPECT_THROW(ergotropy(diag_rho({0.5, 0.5}), three), DomainError);
}

// ---------------------------------------------------------------- SYK battery

TEST(Battery, RotationMatchesKroneckerOracle) {
  const int n = 4;
  std::vector<Eigen::Matrix2cd> ops(n, oracle::y_rotation());
  const auto rot = oracle::site_product(ops);
  Eigen::VectorXcd psi = random_unit(16, 13);
  const Eigen::VectorXcd want = rot * psi;
  rotate_to_y_basis(psi, n);
  // Equal up to a per-basis-state phase fixed by the eigenvector convention.
  for (Eigen::Index s = 0; s < 16; ++s) EXPECT_NEAR(std::abs(psi[s]), std::abs(want[s]), 1e-14);
  // The initial state maps onto the all -y configuration.
  Eigen::VectorXcd g(16);
  for (Eigen::Index s = 0; s < 16; ++s) g[s] = std::pow(cplx(0, 1), std::popcount(unsigned(s))) / 4.0;
  rotate_to_y_basis(g, n);
  EXPECT_NEAR(std::abs(g[0]), 1.0, 1e-14);
}

// Independent route: full-space evolution, Kronecker rotation, brute partial trace.
TEST(Battery, MatchesFullSpaceOracle) {
  const int n = 6;
  const double omega = 1.3;
  const auto t = tensor(n, 14);
  const std::vector<double> grid{0.0, 0.2, 1.0, 4.0, 15.0};
  const std::vector<int> sizes{1, 2, 3, 6};
  for (auto variant : {BatteryVariant::fermionic, BatteryVariant::bosonic}) {
    const auto run = battery_charge_syk(t, omega, grid, variant, sizes);
    const oracle::Mat h = variant == BatteryVariant::fermionic ? oracle::syk_dense(t, 0.0)
                                                               : oracle::bosonic_syk_dense(t);
    std::vector<Eigen::Matrix2cd> ops(n, oracle::y_rotation());
    const auto rot = oracle::site_product(ops);
    // Ground state of the reference Hamiltonian from an independent solve.
    oracle::Mat h0 = oracle::Mat::Zero(64, 64);
    for (int j = 0; j < n; ++j) {
      std::vector<Eigen::Matrix2cd> y(n, oracle::identity2());
      y[j] = oracle::pauli_y();
      h0 += 0.5 * omega * oracle::site_product(y);
    }
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es0(h0);
    const Eigen::VectorXcd psi0 = es0.eigenvectors().col(0);
    EXPECT_NEAR(es0.eigenvalues()[0], -0.5 * n * omega, 1e-12);

    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Eigen::VectorXcd psi = dense_evolve(h, psi0, grid[k]);
      const double energy = psi.dot(h0 * psi).real() + 0.5 * n * omega;
      EXPECT_NEAR(run.energy[k], energy, 1e-9);
      const Eigen::VectorXcd y = rot * psi;
      std::vector<double> p(n + 1, 0.0);
      for (Eigen::Index s = 0; s < 64; ++s) p[std::popcount(unsigned(s))] += std::norm(y[s]);
      for (int q = 0; q <= n; ++q) EXPECT_NEAR(run.populations(q, k), p[q], 1e-9);
      for (std::size_t m = 0; m < sizes.size(); ++m) {
        const auto rho = oracle::brute_partial_trace(y, n, sizes[m]);
        std::vector<double> eps(rho.rows());
        for (Eigen::Index a = 0; a < rho.rows(); ++a) eps[a] = omega * std::popcount(unsigned(a));
        const double want = sizes[m] == n ? energy : oracle::ergotropy(rho, eps);
        EXPECT_NEAR(run.ergotropy[m][k], want, 1e-9);
        double e_m = 0;
        for (Eigen::Index a = 0; a < rho.rows(); ++a) e_m += rho(a, a).real() * eps[a];
        EXPECT_GE(run.ergotropy[m][k], -1e-9);
        EXPECT_LE(run.ergotropy[m][k], e_m + 1e-9);
      }
    }
  }
}

TEST(Battery, InitialConditionsAndNormalization) {
  const auto run = battery_charge_syk(tensor(8, 15), 1.0, default_tau_grid(1.0), BatteryVariant::fermionic,
                                      std::vector<int>{1, 4, 8});
  EXPECT_NEAR(run.energy[0], 0.0, 1e-10);
  EXPECT_NEAR(run.populations(0, 0), 1.0, 1e-12);
  EXPECT_EQ(run.power[0], 0.0);
  for (const auto& e : run.ergotropy) EXPECT_NEAR(e[0], 0.0, 1e-10);
  for (Eigen::Index t = 0; t < run.populations.cols(); ++t) {
    EXPECT_NEAR(run.populations.col(t).sum(), 1.0, 1e-9);
    EXPECT_GE(run.populations.col(t).minCoeff(), -1e-15);
    if (run.tau_grid[t] > 0) EXPECT_NEAR(run.power[t], run.energy[t] / run.tau_grid[t], 1e-12);
  }
  // Pure global state: full ergotropy equals the stored energy.
  EXPECT_EQ(run.ergotropy[2], run.energy);
}

TEST(Battery, EigenAndKrylovPathsAgree) {
  const auto t = tensor(10, 16);
  const std::vector<double> grid{0.0, 0.3, 2.0, 10.0, 40.0};
  BatteryOptions eig, kry;
  eig.eigen_max_dim = 1 << 20;
  kry.eigen_max_dim = 0;
  const std::vector<int> sizes{2};
  const auto a = battery_charge_syk(t, 1.0, grid, BatteryVariant::fermionic, sizes, eig);
  const auto b = battery_charge_syk(t, 1.0, grid, BatteryVariant::fermionic, sizes, kry);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(a.energy[k], b.energy[k], 1e-8);
    EXPECT_NEAR(a.ergotropy[0][k], b.ergotropy[0][k], 1e-8);
  }
}

TEST(Battery, Errors) {
  const std::vector<double> bad{0.1, 1.0};
  EXPECT_THROW(battery_charge_syk(tensor(6, 1), 1.0, bad, BatteryVariant::fermionic), DomainError);
  const std::vector<double> ok{0.0, 1.0};
  const std::vector<int> big{7};
  EXPECT_THROW(battery_charge_syk(tensor(6, 1), 1.0, ok, BatteryVariant::fermionic, big), DomainError);
  const std::vector<double> grid = default_tau_grid(2.0);
  EXPECT_EQ(grid.size(), 201u);
  EXPECT_EQ(grid[0], 0.0);
  EXPECT_NEAR(grid[1], 5e-3, 1e-15);
  EXPECT_NEAR(grid.back(), 25.0, 1e-12);
}

TEST(PowerFit, SyntheticLinearLaw) {
  const double n[] = {8, 10, 12, 14, 16};
  double p[5];
  for (int i = 0; i < 5; ++i) p[i] = 0.37 * n[i];
  EXPECT_NEAR(power_law_fit(n, p).slope, 1.0, 0.01);
  for (int i = 0; i < 5; ++i) p[i] = 2.0 * std::pow(n[i], 1.5);
  EXPECT_NEAR(power_law_fit(n, p).slope, 1.5, 1e-12);
  EXPECT_THROW(power_law_fit(std::span(n, 2), std::span(p, 2)), DomainError);
}

TEST(PowerFit, SummaryAveragesBeforeMaximizing) {
  BatteryRun a, b;
  a.tau_grid = b.tau_grid = {0.0, 1.0, 2.0};
  a.n_sites = b.n_sites = 8;
  a.power = {0, 4, 0};
  b.power = {0, 0, 3};
  a.energy = {0, 4, 0};
  b.energy = {0, 0, 6};
  const auto pt = summarize_power({a, b});
  EXPECT_DOUBLE_EQ(pt.p_star, 2.0);
  EXPECT_DOUBLE_EQ(pt.tau_star, 1.0);
  EXPECT_DOUBLE_EQ(pt.p_star_max_then_avg, 3.5);
  EXPECT_EQ(pt.realizations, 2);
}

TEST(PowerScaling, SmallEnsembleRuns) {
  const int sizes[] = {6, 8, 10};
  const auto grid = default_tau_grid(1.0);
  const auto res = battery_power_scaling(DisorderEnsemble(1, 3), sizes, 1.0, BatteryVariant::fermionic, grid);
  ASSERT_EQ(res.points.size(), 3u);
  EXPECT_GT(res.fit.slope, 1.0);
  EXPECT_THROW(battery_power_scaling(DisorderEnsemble(1, 3), std::span(sizes, 2), 1.0,
                                     BatteryVariant::fermionic, grid),
               DomainError);
}

// ---------------------------------------------------------------- Dicke

TEST(Dicke, ParallelIsExactlyExtensive) {
  const auto grid = default_tau_grid(1.0);
  const auto one = battery_charge_dicke(1, 1.0, 0.05, grid, DickeMode::parallel, false);
  for (int n : {2, 5, 9}) {
    const auto run = battery_charge_dicke(n, 1.0, 0.05, grid, DickeMode::parallel, false);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(run.energy[k], n * one.energy[k], 1e-12 * n);
  }
}

TEST(Dicke, PopulationsAndStart) {
  const auto grid = default_tau_grid(1.0);
  for (auto mode : {DickeMode::parallel, DickeMode::collective}) {
    const auto run = battery_charge_dicke(4, 1.0, 0.05, grid, mode, false);
    EXPECT_NEAR(run.energy[0], 0.0, 1e-12);
    ASSERT_EQ(run.populations.rows(), 5);
    for (Eigen::Index t = 0; t < run.populations.cols(); ++t)
      EXPECT_NEAR(run.populations.col(t).sum(), 1.0, 1e-9);
    double e = 0;
    for (int k = 0; k <= 4; ++k) e += k * run.populations(k, 150);
    EXPECT_NEAR(run.energy[150], e, 1e-9);
  }
}

TEST(Dicke, CollectiveMatchesDenseOracle) {
  const int n = 3, cutoff = 20;
  const double lambda = 0.05;
  const std::vector<double> grid{0.0, 2.0, 9.0};
  DickeOptions opt;
  opt.photon_cutoff = cutoff;
  const auto run = battery_charge_dicke(n, 1.0, lambda, grid, DickeMode::collective, false, opt);
  const auto h = build_dicke(n, 1.0, lambda, cutoff, false).to_dense();
  const DickeSpace s{n, cutoff};
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(s.dim());
  psi0[s.index(0, n)] = 1.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto psi = dense_evolve(h, psi0, grid[k]);
    double e = 0;
    for (int mi = 0; mi <= n; ++mi)
      for (int ph = 0; ph <= cutoff; ++ph) e += mi * std::norm(psi[s.index(mi, ph)]);
    EXPECT_NEAR(run.energy[k], e, 1e-9);
  }
}

TEST(Dicke, UnconvergedCutoffIsResourceError) {
  DickeOptions opt;
  opt.photon_cutoff = 4;
  EXPECT_THROW(battery_charge_dicke(4, 1.0, 0.5, default_tau_grid(1.0), DickeMode::collective, false, opt),
               ResourceError);
}
