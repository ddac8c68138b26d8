#include <gtest/gtest.h>

#include <sstream>

#include "support/oracle.hpp"
#include "syk/couplings.hpp"
#include "syk/errors.hpp"
#include "syk/hamiltonian.hpp"

using namespace syk;

TEST(Couplings, AntisymmetryAndHermiticityOnEveryAccess) {
  Rng rng(3);
  const auto t = sample_syk(6, 1.3, rng);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k)
        for (int l = 0; l < 6; ++l) {
          const cplx v = t(i, j, k, l);
          EXPECT_EQ(v + t(j, i, k, l), cplx(0, 0));
          EXPECT_EQ(v + t(i, j, l, k), cplx(0, 0));
          EXPECT_EQ(v, std::conj(t(k, l, i, j)));
          if (i == j || k == l) EXPECT_EQ(v, cplx(0, 0));
        }
  for (int a = 0; a < t.pair_count(); ++a) EXPECT_EQ(t.pair_element(a, a).imag(), 0.0);
}

// Materialize the N^4 tensor from canonical slots only and compare to the accessor.
TEST(Couplings, AccessorAgreesWithMaterializedTensor) {
  Rng rng(11);
  const int n = 5;
  const auto t = sample_syk(n, 1.0, rng);
  std::vector<cplx> full(n * n * n * n);
  auto at = [&](int i, int j, int k, int l) -> cplx& { return full[((i * n + j) * n + k) * n + l]; };
  // Canonical slots are the upper triangle over ordered pairs, row by row.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const int np = static_cast<int>(pairs.size());
  std::vector<std::vector<cplx>> m(np, std::vector<cplx>(np));
  std::size_t slot = 0;
  for (int a = 0; a < np; ++a)
    for (int b = a; b < np; ++b) {
      m[a][b] = t.canonical_entries()[slot++];
      m[b][a] = std::conj(m[a][b]);
    }
  ASSERT_EQ(slot, t.canonical_entries().size());
  for (int a = 0; a < np; ++a)
    for (int b = 0; b < np; ++b) {
      const auto [i, j] = pairs[a];
      const auto [k, l] = pairs[b];
      const cplx v = m[a][b];
      at(i, j, k, l) = v;
      at(j, i, k, l) = -v;
      at(i, j, l, k) = -v;
      at(j, i, l, k) = v;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) ASSERT_EQ(t(i, j, k, l), at(i, j, k, l));
}

TEST(Couplings, VarianceIsJSquared) {
  Rng rng(2024);
  double sum = 0, diag = 0;
  std::size_t count = 0, dcount = 0;
  const double J = 1.0;
  while (count < 100000) {
    const auto t = sample_syk(6, J, rng);
    for (int a = 0; a < t.pair_count(); ++a)
      for (int b = a; b < t.pair_count(); ++b) {
        const double v = std::norm(t.pair_element(a, b));
        if (a == b) {
          diag += v;
          ++dcount;
        } else {
          sum += v;
          ++count;
        }
      }
  }
  EXPECT_NEAR(sum / double(count), J * J, 0.02);
  EXPECT_NEAR(diag / double(dcount), J * J, 0.05);
}

TEST(Couplings, RejectsTooFewSites) {
  Rng rng(0);
  EXPECT_THROW(sample_syk(3, 1.0, rng), DomainError);
}

TEST(Hopping, HermitianWithUnitVariance) {
  Rng rng(9);
  double off = 0, mean_re = 0;
  const int draws = 100000;
  for (int d = 0; d < draws; ++d) {
    const auto h = sample_hopping(2, 1.0, rng);
    ASSERT_EQ((h.entries - h.entries.adjoint()).cwiseAbs().maxCoeff(), 0.0);
    off += std::norm(h.entries(0, 1));
    mean_re += h.entries(0, 1).real();
  }
  EXPECT_NEAR(off / draws, 1.0, 0.02);
  EXPECT_NEAR(mean_re / draws, 0.0, 0.01);
}

// Second moment of the 1/sqrt(N) scaled Gaussian Hermitian ensemble.
TEST(Hopping, SemicircleSecondMoment) {
  Rng rng(17);
  const int n = 64;
  double m2 = 0;
  const int samples = 40;
  for (int s = 0; s < samples; ++s) {
    const auto h = sample_hopping(n, 1.0, rng);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.entries / std::sqrt(double(n)));
    m2 += es.eigenvalues().squaredNorm() / n;
  }
  EXPECT_NEAR(m2 / samples, 1.0, 0.05);
}

TEST(Ensemble, StreamsAreSplittable) {
  const DisorderEnsemble e(42, 8);
  Rng direct = e.stream(3);
  for (int r = 0; r < 3; ++r) {
    Rng s = e.stream(r);
    for (int k = 0; k < 100; ++k) s();
  }
  Rng later = e.stream(3);
  for (int k = 0; k < 16; ++k) EXPECT_EQ(direct(), later());

  Rng a = DisorderEnsemble(42, 8).stream(0), b = DisorderEnsemble(43, 8).stream(0);
  EXPECT_NE(a(), b());
  Rng c = e.stream(0), d = e.stream(1);
  EXPECT_NE(c(), d());
  EXPECT_THROW(DisorderEnsemble(1, 0), DomainError);
}

TEST(Ensemble, SameSeedSameTensor) {
  const DisorderEnsemble e(7, 4);
  Rng r1 = e.stream(2), r2 = e.stream(2);
  EXPECT_EQ(sample_syk(8, 1.0, r1).canonical_entries(), sample_syk(8, 1.0, r2).canonical_entries());
}

TEST(TensorIo, RoundTripsBitExact) {
  Rng rng(5);
  const auto t = sample_syk(7, 0.8, rng);
  std::stringstream buf;
  write_tensor(buf, t);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 4), "SYKJ");
  const auto back = read_tensor(buf);
  EXPECT_EQ(back.n_sites(), 7);
  EXPECT_EQ(back.variance_scale(), 0.8);
  EXPECT_EQ(back.canonical_entries(), t.canonical_entries());

  std::stringstream bad(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_tensor(bad), DomainError);
}

TEST(Couplings, AssembledHamiltonianIsHermitian) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const auto t = sample_syk(8, 1.0, rng);
    const auto h = build_syk(t, 0.3, fock::Basis::sector(8, 4));
    EXPECT_LT(h.hermiticity_error(), 1e-12);
  }
}
