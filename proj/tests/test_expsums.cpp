#include <gtest/gtest.h>

#include <cstdio>
#include <random>

#include "rnorm/expsums.hpp"

using namespace rnorm;

namespace {

HalfMatrix random_half(std::mt19937_64& rng, i64 bound) {
  std::uniform_int_distribution<i64> e(-bound, bound);
  return {e(rng), e(rng), e(rng)};
}

QuadForm random_pd(std::mt19937_64& rng, i64 bound) {
  std::uniform_int_distribution<i64> e(-bound, bound), pos(1, bound);
  for (;;) {
    QuadForm q{pos(rng), e(rng), pos(rng)};
    if (is_positive_definite(q)) return q;
  }
}

i64 euler_phi(i64 n) {
  i64 r = n;
  for (i64 p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      r -= r / p;
    }
  if (n > 1) r -= r / n;
  return r;
}

}  // namespace

TEST(ModInverse, Examples) {
  EXPECT_EQ(mod_inverse(3, 7), 5);
  EXPECT_EQ(mod_inverse(-1, 10), 9);
  EXPECT_THROW(mod_inverse(4, 6), precondition_error);
}

TEST(HSum, ModulusOneIsTheGlobalPhase) {
  const HalfMatrix p{3, 5, 2}, s{1, 4, 2};
  for (int sign : {1, -1}) {
    const cplx h = h_sum(p, s, 1, sign);
    const double th = -2.0 * pi * sign * (5.0 * 4.0) / (2.0 * 2.0);
    EXPECT_NEAR(h.real(), std::cos(th), 1e-14);
    EXPECT_NEAR(h.imag(), std::sin(th), 1e-14);
  }
}

TEST(HSum, VanishesWhenBottomEntriesDiffer) {
  const cplx h = h_sum({1, 2, 3}, {1, 2, 4}, 7, 1);
  EXPECT_EQ(h.real(), 0.0);
  EXPECT_EQ(h.imag(), 0.0);
}

TEST(HSum, RejectsDegenerateInput) {
  EXPECT_THROW(h_sum({1, 2, 0}, {1, 2, 0}, 5, 1), precondition_error);
  EXPECT_THROW(h_sum({1, 2, 3}, {1, 2, 3}, 0, 1), precondition_error);
  EXPECT_THROW(h_sum({1, 2, 3}, {1, 2, 3}, 5, 0), precondition_error);
}

TEST(HSum, PrimeModulusAgainstDirectSum) {
  // c = 5, P = S = (1, 0, 1): sum over d1 in (Z/5)^*, d2 mod 5 of e((d1bar d2^2 + d1bar + d1) / 5)
  cplx want{0.0, 0.0};
  for (i64 d1 = 1; d1 < 5; ++d1) {
    const i64 inv = mod_inverse(d1, 5);
    for (i64 d2 = 0; d2 < 5; ++d2) want += std::polar(1.0, 2.0 * pi * static_cast<double>(inv * d2 * d2 + inv + d1) / 5.0);
  }
  const cplx got = h_sum({1, 0, 1}, {1, 0, 1}, 5, 1);
  EXPECT_NEAR(got.real(), want.real(), 1e-12);
  EXPECT_NEAR(got.imag(), want.imag(), 1e-12);
}

TEST(HSumProperty, TrivialBoundAndFloatAgreement) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<i64> cc(1, 50);
  for (int it = 0; it < 3000; ++it) {
    HalfMatrix p = random_half(rng, 20), s = random_half(rng, 20);
    if (s.m4 == 0) s.m4 = 1;
    p.m4 = s.m4;
    const i64 c = cc(rng);
    for (int sign : {1, -1}) {
      const cplx h = h_sum(p, s, c, sign);
      ASSERT_LE(std::abs(h), static_cast<double>(c * euler_phi(c)) * (1.0 + 1e-12));
      ASSERT_LE(std::abs(h - h_sum_naive(p, s, c, sign)), 1e-9);
    }
  }
}

TEST(HSumProperty, ExactlyZeroOffDiagonal) {
  std::mt19937_64 rng(22);
  for (int it = 0; it < 2000; ++it) {
    HalfMatrix p = random_half(rng, 20), s = random_half(rng, 20);
    if (s.m4 == 0) s.m4 = 3;
    if (p.m4 == s.m4) p.m4 = s.m4 + 1;
    const cplx h = h_sum(p, s, 7, 1);
    ASSERT_EQ(h, cplx(0.0, 0.0));
  }
}

TEST(HSumProperty, PeriodicInTheTopEntries) {
  // the congruence part only sees p1, s1 mod c; p2, s2 also enter the global phase
  std::mt19937_64 rng(23);
  for (int it = 0; it < 500; ++it) {
    HalfMatrix p = random_half(rng, 20), s = random_half(rng, 20);
    if (s.m4 == 0) s.m4 = 2;
    p.m4 = s.m4;
    const i64 c = 1 + static_cast<i64>(rng() % 30);
    HalfMatrix p2 = p, s2 = s;
    p2.m1 += c;
    s2.m1 -= 2 * c;
    ASSERT_LE(std::abs(h_sum(p, s, c, 1) - h_sum(p2, s2, c, 1)), 1e-10);
  }
}

TEST(HSumObservation, SignFlip) {
  // records how often H+ and H- differ in modulus; no claim is tested
  std::mt19937_64 rng(24);
  int differ = 0, total = 0;
  for (int it = 0; it < 400; ++it) {
    HalfMatrix p = random_half(rng, 10), s = random_half(rng, 10);
    if (s.m4 == 0) s.m4 = 1;
    p.m4 = s.m4;
    const i64 c = 2 + static_cast<i64>(rng() % 20);
    ++total;
    if (std::abs(std::abs(h_sum(p, s, c, 1)) - std::abs(h_sum(p, s, c, -1))) > 1e-9) ++differ;
  }
  std::printf("|H+| != |H-| in %d of %d samples\n", differ, total);
  SUCCEED();
}

TEST(Rank1, Examples) {
  const auto w = rank1_admissible({2, 1, 3}, {2, 0, 5}, 2);
  EXPECT_TRUE(w.admissible);
  EXPECT_EQ(w.P, (HalfMatrix{5, 0, 2}));
  EXPECT_EQ(w.S, (HalfMatrix{3, 1, 2}));
  EXPECT_FALSE(rank1_admissible({2, 1, 3}, {2, 0, 5}, 3).admissible);
  EXPECT_FALSE(rank1_admissible({2, 1, 3}, {3, 0, 5}, 2).admissible);
  EXPECT_THROW(rank1_admissible({3, 0, 2}, {1, 0, 1}, 1), precondition_error);
}

TEST(Rank1Property, WitnessMatricesConjugate) {
  // P = U Q U^t and S = V^-1 T V^-t with the antidiagonal swap
  for (const QuadForm q : enumerate_reduced(500)) {
    const auto w = rank1_admissible(q, q, q.a);
    EXPECT_TRUE(w.admissible);
    EXPECT_EQ(transform(q, w.U), (QuadForm{w.P.m1, w.P.m2, w.P.m4}));
    EXPECT_EQ(w.U.det(), -1);
  }
}

TEST(DeltaGap, Examples) {
  // T = Q = I, C = I: T Q~ = I, no gap
  const auto g = delta_gap({1, 0, 1}, {1, 0, 1}, inverse_of_integer(1, 0, 0, 1));
  EXPECT_EQ(g.delta, 0);
  EXPECT_EQ(g.rhs1, 0);
  EXPECT_EQ(g.rhs2, 0);
  // T = diag(1, 2), Q = I: eigenvalues 1, 2
  const auto h = delta_gap({1, 0, 2}, {1, 0, 1}, inverse_of_integer(1, 0, 0, 1));
  EXPECT_EQ(h.delta, 1);
  EXPECT_EQ(h.rhs1, 1);
  EXPECT_EQ(h.rhs2, 1);
}

TEST(DeltaGap, InverseOfInteger) {
  const auto m = inverse_of_integer(2, 1, 1, 1);
  EXPECT_EQ(m.m11, 1);
  EXPECT_EQ(m.m12, -1);
  EXPECT_EQ(m.m21, -1);
  EXPECT_EQ(m.m22, 2);
  const auto r = inverse_of_integer(2, 0, 0, 3);
  EXPECT_EQ(r.m11, cpp_rational(1, 2));
  EXPECT_EQ(r.m22, cpp_rational(1, 3));
  EXPECT_THROW(inverse_of_integer(1, 2, 2, 4), precondition_error);
}

TEST(DeltaGapProperty, BothIdentitiesHoldExactly) {
  std::mt19937_64 rng(25);
  std::uniform_int_distribution<i64> e(-20, 20);
  for (int it = 0; it < 5000; ++it) {
    const QuadForm t = random_pd(rng, 20), q = random_pd(rng, 20);
    i64 c11, c12, c21, c22;
    do {
      c11 = e(rng), c12 = e(rng), c21 = e(rng), c22 = e(rng);
    } while (c11 * c22 - c12 * c21 == 0);
    const auto g = delta_gap(t, q, inverse_of_integer(c11, c12, c21, c22));
    ASSERT_EQ(g.delta, g.rhs1);
    ASSERT_EQ(g.delta, g.rhs2);
    ASSERT_GE(g.delta, 0);
  }
}

TEST(Rank2Census, Sanity) {
  const auto rc = rank2_census(10, 0.5, 1);
  EXPECT_GT(rc.triples_scanned, 0);
  EXPECT_LE(rc.triples_close, rc.triples_scanned);
  EXPECT_LE(rc.max_cnorm, 1.0);
  const auto rc4 = rank2_census(10, 0.5, 1, 4);
  EXPECT_EQ(rc.triples_scanned, rc4.triples_scanned);
  EXPECT_EQ(rc.triples_close, rc4.triples_close);
  EXPECT_EQ(rc.max_axcz, rc4.max_axcz);
  EXPECT_EQ(rc.mean_acxz, rc4.mean_acxz);
}
