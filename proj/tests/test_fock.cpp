#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "support/oracle.hpp"
#include "syk/errors.hpp"
#include "syk/fock.hpp"

using namespace syk;
using fock::Basis;
using fock::SignedState;

TEST(Sector, EnumeratesAscendingWithInverse) {
  const Basis b = Basis::sector(4, 2);
  const std::vector<Bits> want{0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100};
  ASSERT_EQ(b.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(b.state(i), want[i]);
    EXPECT_EQ(b.index_of(want[i]).value(), i);
    EXPECT_EQ(b.rank(want[i]), i);
  }
  EXPECT_FALSE(b.index_of(0b0111).has_value());

  const Basis two = Basis::sector(2, 1);
  EXPECT_EQ(two.state(0), 0b01u);
  EXPECT_EQ(two.state(1), 0b10u);
  EXPECT_EQ(Basis::sector(16, 8).size(), 12870u);
}

TEST(Sector, SizesMatchBinomialAndRankInvertsEverywhere) {
  for (int n = 1; n <= 12; ++n)
    for (int q = 0; q <= n; ++q) {
      const Basis b = Basis::sector(n, q);
      ASSERT_EQ(b.size(), fock::binomial(n, q));
      for (std::size_t i = 0; i < b.size(); ++i) {
        ASSERT_EQ(std::popcount(b.state(i)), q);
        if (i) ASSERT_LT(b.state(i - 1), b.state(i));
        ASSERT_EQ(b.rank(b.state(i)), i);
      }
    }
}

TEST(Sector, RejectsOutOfRange) {
  EXPECT_THROW(Basis::sector(4, 5), DomainError);
  EXPECT_THROW(Basis::sector(4, -1), DomainError);
  EXPECT_THROW(Basis::sector(25, 3), DomainError);
}

TEST(Operators, QuarticExamples) {
  auto r = fock::apply_quartic(0, 1, 1, 0, 0b0011);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, (SignedState{0b0011, +1}));

  // Sign read off the dense Jordan-Wigner matrix.
  const oracle::Mat m = oracle::creator(2, 4) * oracle::creator(3, 4) * oracle::annihilator(1, 4) *
                 oracle::annihilator(0, 4);
  r = fock::apply_quartic(2, 3, 1, 0, 0b0011);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->bits, 0b1100u);
  EXPECT_EQ(double(r->sign), m(0b1100, 0b0011).real());

  EXPECT_FALSE(fock::annihilate(0, {0b0010, 1}));
}

TEST(Operators, BilinearExamples) {
  EXPECT_EQ(*fock::apply_bilinear(1, 0, 0b01), (SignedState{0b10, +1}));
  EXPECT_EQ(*fock::apply_bilinear(0, 0, 0b01), (SignedState{0b01, +1}));
  const oracle::Mat m = oracle::creator(3, 4) * oracle::annihilator(0, 4);
  const auto r = fock::apply_bilinear(3, 0, 0b1001);
  // c_0 empties site 0, then site 3 is already occupied.
  EXPECT_EQ(m.col(0b1001).norm(), 0.0);
  EXPECT_FALSE(r);
  const auto r2 = fock::apply_bilinear(3, 0, 0b0111);
  ASSERT_TRUE(r2);
  EXPECT_EQ(double(r2->sign), m(r2->bits, 0b0111).real());
}

// Every c†i c†j ck cl assembled from apply_quartic equals the Kronecker construction.
TEST(Operators, QuarticMatchesJordanWignerOracle) {
  for (int n = 2; n <= 5; ++n) {
    const Eigen::Index d = Eigen::Index{1} << n;
    std::vector<oracle::Mat> c, cd;
    for (int i = 0; i < n; ++i) {
      c.push_back(oracle::annihilator(i, n));
      cd.push_back(c.back().adjoint());
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const oracle::Mat want = cd[i] * cd[j] * c[k] * c[l];
            oracle::Mat got = oracle::Mat::Zero(d, d);
            for (Eigen::Index s = 0; s < d; ++s)
              if (auto r = fock::apply_quartic(i, j, k, l, static_cast<Bits>(s)))
                got(r->bits, s) = r->sign;
            ASSERT_EQ((got - want).cwiseAbs().maxCoeff(), 0.0) << i << j << k << l << " n=" << n;
          }
  }
}

TEST(Operators, SixSiteQuarticSampleMatchesOracle) {
  const int n = 6;
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> site(0, n - 1);
  for (int trial = 0; trial < 60; ++trial) {
    const int i = site(rng), j = site(rng), k = site(rng), l = site(rng);
    const oracle::Mat want = oracle::creator(i, n) * oracle::creator(j, n) *
                             oracle::annihilator(k, n) * oracle::annihilator(l, n);
    for (Eigen::Index s = 0; s < 64; ++s) {
      const auto r = fock::apply_quartic(i, j, k, l, static_cast<Bits>(s));
      if (!r) {
        ASSERT_EQ(want.col(s).norm(), 0.0);
        continue;
      }
      ASSERT_EQ(want(r->bits, s).real(), double(r->sign));
      ASSERT_EQ(want.col(s).norm(), 1.0);
    }
  }
}

TEST(Operators, BosonsDropTheString) {
  const int n = 4;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const oracle::Mat want = oracle::creator(i, n, false) * oracle::annihilator(j, n, false);
      for (Eigen::Index s = 0; s < 16; ++s) {
        const auto r = fock::apply_bilinear(i, j, static_cast<Bits>(s), fock::Statistics::hardcore_boson);
        if (r) {
          ASSERT_EQ(want(r->bits, s).real(), double(r->sign));
          ASSERT_EQ(r->sign, 1);
        } else {
          ASSERT_EQ(want.col(s).norm(), 0.0);
        }
      }
    }
}

// <out| c†i c†j ck cl |in> = conj(<in| c†l c†k cj ci |out>), and charge is conserved.
TEST(Operators, AdjointSequenceRestoresStateAndSign) {
  const int n = 6;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          for (Bits s = 0; s < 64; ++s) {
            const auto fwd = fock::apply_quartic(i, j, k, l, s);
            if (!fwd) continue;
            ASSERT_EQ(std::popcount(fwd->bits), std::popcount(s));
            const auto back = fock::apply_quartic(l, k, j, i, fwd->bits);
            ASSERT_TRUE(back);
            ASSERT_EQ(back->bits, s);
            ASSERT_EQ(back->sign, fwd->sign);
          }
}

namespace {

fock::PureState full_state(int n, Eigen::VectorXcd amps) {
  return {std::make_shared<const Basis>(Basis::full(n)), std::move(amps)};
}

Eigen::VectorXcd random_state(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(Eigen::Index{1} << n);
  for (auto& x : v) x = {g(rng), g(rng)};
  return v / v.norm();
}

}  // namespace

TEST(PartialTrace, Examples) {
  Eigen::VectorXcd prod = Eigen::VectorXcd::Zero(4);
  prod[0] = 1;
  auto rho = fock::partial_trace(full_state(2, prod), 1).elements;
  EXPECT_NEAR(std::abs(rho(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(rho.cwiseAbs().sum(), 1.0, 1e-15);

  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  rho = fock::partial_trace(full_state(2, bell), 1).elements;
  EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(rho(1, 1).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(rho(0, 1)), 0.0, 1e-15);
}

TEST(PartialTrace, MatchesBruteForce) {
  for (int n : {3, 5, 7})
    for (int keep = 1; keep < n; ++keep) {
      const auto psi = random_state(n, 100 + n * 10 + keep);
      const auto want = oracle::brute_partial_trace(psi, n, keep);
      const auto fast = fock::partial_trace(full_state(n, psi), keep).elements;
      const auto slow = fock::partial_trace_serial(full_state(n, psi), keep).elements;
      EXPECT_LT((fast - want).cwiseAbs().maxCoeff(), 1e-14);
      EXPECT_LT((slow - want).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(PartialTrace, TraceOneAndPositive) {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const int n = 4 + static_cast<int>(seed % 5);
    const int keep = 1 + static_cast<int>(seed % static_cast<unsigned>(n - 1));
    const auto rho = fock::partial_trace(full_state(n, random_state(n, seed)), keep).elements;
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-10);
    EXPECT_LT((rho - rho.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    EXPECT_LE(es.eigenvalues().maxCoeff(), 1 + 1e-10);
  }
}

TEST(PartialTrace, Errors) {
  const auto psi = full_state(3, random_state(3, 1));
  EXPECT_THROW(fock::partial_trace(psi, 3), DomainError);
  auto sector = std::make_shared<const Basis>(Basis::sector(3, 1));
  fock::PureState s{sector, Eigen::VectorXcd::Ones(3) / std::sqrt(3.0)};
  EXPECT_THROW(fock::partial_trace(s, 1), DomainError);
}

TEST(PureState, EmbedAndNormalize) {
  auto sector = std::make_shared<const Basis>(Basis::sector(4, 2));
  fock::PureState s{sector, Eigen::VectorXcd::Constant(6, cplx(1, 1))};
  s.normalize();
  EXPECT_NEAR(s.norm(), 1.0, 1e-12);
  const auto full = fock::embed_in_full(s);
  ASSERT_EQ(full.amplitudes.size(), 16);
  for (Eigen::Index x = 0; x < 16; ++x)
    EXPECT_EQ(std::abs(full.amplitudes[x]) > 0, std::popcount(static_cast<unsigned>(x)) == 2);
  EXPECT_NEAR(full.norm(), 1.0, 1e-12);
}
