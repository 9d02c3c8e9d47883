#include <gtest/gtest.h>

#include <algorithm>
#include <tuple>

#include "rnorm/series.hpp"

using namespace rnorm;

namespace {

constexpr i64 kCut = 100000;

}  // namespace

TEST(ClassTable, RunningSum) {
  const auto t = class_table(1000);
  ASSERT_GE(t->n_max, 1000);
  EXPECT_EQ(t->h[3], 1);
  EXPECT_EQ(t->h[4], 1);
  EXPECT_EQ(t->h[23], 3);
  i64 run = 0;
  for (i64 n = 0; n <= 1000; ++n) {
    run += t->h[static_cast<std::size_t>(n)];
    ASSERT_EQ(t->S[static_cast<std::size_t>(n)], run);
  }
}

TEST(LPartial, SmallestTerms) {
  EXPECT_NEAR(l_partial(0.0, 0.75).real(), std::pow(4.0 / 3.0, 1.5), 1e-14);
  EXPECT_NEAR(l_partial(0.0, 1.0).real(), std::pow(4.0 / 3.0, 1.5) + 1.0, 1e-14);
  // D = 7/4 is the next discriminant with forms
  EXPECT_NEAR(l_partial(0.5, 1.75).real(),
              std::pow(4.0 / 3.0, 2.5) + 1.0 + std::pow(4.0 / 7.0, 2.5), 1e-14);
  EXPECT_THROW(l_partial(0.0, 0.5), precondition_error);
}

TEST(LPartialProperty, IncreasingInXForRealV) {
  double prev = 0.0;
  for (double X = 1.0; X < 5000.0; X *= 1.7) {
    const double v = l_partial(0.2, X).real();
    EXPECT_GE(v, prev);
    EXPECT_EQ(l_partial(0.2, X).imag(), 0.0);
    prev = v;
  }
}

TEST(Continuation, MatchesPartialSumPlusTail) {
  for (double re : {0.3, 0.6, 1.0})
    for (double im : {0.0, 0.5, 3.0}) {
      const cplx v(re, im);
      const cplx a = l_continued(v, kCut);
      const cplx b = l_partial(v, static_cast<double>(kCut)) + l_partial_tail(v, static_cast<double>(kCut));
      EXPECT_LE(std::abs(a - b), 1e-9 * std::abs(a)) << re << " " << im;
    }
}

TEST(Continuation, ConvergedInTheCutoff) {
  const cplx v(0.3, 0.0);
  EXPECT_LE(std::abs(l_continued(v, kCut) - l_continued(v, 4 * kCut)), 1e-6);
}

TEST(Continuation, PoleAtZero) {
  EXPECT_THROW(l_continued(0.0, kCut), precondition_error);
  EXPECT_NO_THROW(l_continued_regular(0.0, kCut));
  EXPECT_THROW(l_continued(cplx(-0.3, 0.0), kCut), precondition_error);
}

TEST(ContinuationProperty, ResiduePiOverThree) {
  const double d3 = std::abs(1e-3 * l_continued(1e-3, kCut) - pi / 3.0);
  const double d4 = std::abs(1e-4 * l_continued(1e-4, kCut) - pi / 3.0);
  EXPECT_LE(d3, 1e-2);
  EXPECT_GE(d3 / d4, 9.0);
}

TEST(ContinuationProperty, RealOnTheRealAxis) {
  for (double v : {-0.2, -0.05, 0.05, 0.7}) EXPECT_NEAR(l_continued(v, kCut).imag(), 0.0, 1e-14);
}

TEST(ContinuationProperty, ConjugateSymmetry) {
  const cplx v(0.1, 2.3);
  const cplx a = l_continued(v, kCut), b = l_continued(std::conj(v), kCut);
  EXPECT_NEAR(a.real(), b.real(), 1e-10 * std::abs(a));
  EXPECT_NEAR(a.imag(), -b.imag(), 1e-10 * std::abs(a));
}

TEST(C1, ExtrapolationAgreesWithSeparation) {
  const auto c = c1_constant(kCut);
  EXPECT_NEAR(c.richardson, c.value, 1e-6);
  EXPECT_NEAR(c.one_sided, c.value, 1e-3);
  EXPECT_THROW(c1_constant(1000), precondition_error);
}

TEST(C1, StableInTheCutoff) {
  EXPECT_NEAR(c1_constant(kCut).value, c1_constant(4 * kCut).value, 1e-4);
}

TEST(Exceptional, EnumerationMatchesTheFullFilter) {
  const i64 n_max = 20000;
  std::vector<QuadForm> a, b;
  for_each_exceptional(n_max, [&](const QuadForm& q) {
    if (det4(q) <= n_max) a.push_back(q);
  });
  for_each_reduced(n_max, [&](const QuadForm& q) {
    const auto p = automorphisms(q);
    if (p.gl2_count != 2 * p.epsilon) b.push_back(q);
  });
  std::vector<QuadForm> a_exc;
  for (const auto& q : a) {
    EXPECT_TRUE(is_reduced(q));
    const auto p = automorphisms(q);
    if (p.gl2_count != 2 * p.epsilon) a_exc.push_back(q);
  }
  auto key = [](const QuadForm& x, const QuadForm& y) {
    return std::tie(x.a, x.b2, x.c) < std::tie(y.a, y.b2, y.c);
  };
  std::sort(a_exc.begin(), a_exc.end(), key);
  std::sort(b.begin(), b.end(), key);
  EXPECT_EQ(a_exc, b);
}

TEST(LTilde, SmallestForms) {
  // D <= 1: (1,1,1) and (1,0,1), both exceptional
  const auto r = l_tilde(0.0, 1);
  EXPECT_EQ(r.terms, 2);
  EXPECT_NEAR(r.value.real(), std::pow(4.0 / 3.0, 1.5) + 1.0, 1e-14);
}

TEST(LTildeProperty, RealOnTheRealAxis) {
  EXPECT_EQ(l_tilde(0.0, 5000).value.imag(), 0.0);
  EXPECT_EQ(l_tilde(0.4, 5000).value.imag(), 0.0);
}

TEST(LTildeProperty, TailBoundCoversLaterTerms) {
  for (i64 X : {100, 1000, 10000}) {
    const auto lo = l_tilde(0.0, X), hi = l_tilde(0.0, 100 * X);
    EXPECT_GE(hi.value.real() - lo.value.real(), 0.0);
    EXPECT_LE(hi.value.real() - lo.value.real(), lo.tail_bound) << X;
  }
}

TEST(LTildeProperty, SplitIdentity) {
  for (cplx v : {cplx(0.0, 0.0), cplx(0.3, 1.0)}) {
    const auto s = split_identity(v, 40000);
    EXPECT_LE(std::abs(s.weighted - s.split), 1e-12 * std::abs(s.weighted));
  }
}

TEST(Bundle, DeterministicAndConsistent) {
  const auto w = bump_window(64.0);
  const auto a = constants_bundle(w, kCut), b = constants_bundle(w, kCut);
  EXPECT_EQ(a.C_final, b.C_final);
  EXPECT_NEAR(a.C0, -4.0 * std::log(4.0 * pi), 1e-14);
  EXPECT_NEAR(a.C0, a.C0_digamma, 1e-4);
  EXPECT_NEAR(a.D_const, d_constant(a.C0, a.C1, a.Ltilde0), 1e-14);
  EXPECT_NEAR(a.C_final, c_final(a.omega, a.omega_prime, a.D_const), 1e-14);
  EXPECT_THROW(constants_bundle(w, 1000), precondition_error);
}

TEST(BundleProperty, ShiftOfC1MovesCLinearly) {
  const double d = 0.37;
  const double base = c_final(2.0, 0.5, d_constant(-10.0, 0.5, 9.0));
  const double moved = c_final(2.0, 0.5, d_constant(-10.0, 0.5 + d, 9.0));
  EXPECT_NEAR(moved - base, 3.0 / (2.0 * pi) * 2.0 * d, 1e-12);
}

TEST(BundleProperty, WindowAmplitudeDoesNotMatter) {
  const auto w1 = bump_window(64.0);
  const auto w2 = make_window(64.0, [](double x) { return 3.0 * bump(x); });
  EXPECT_NEAR(c_final(w1.omega, w1.omega_prime, 1.0), c_final(w2.omega, w2.omega_prime, 1.0), 1e-12);
}

TEST(EulerMaclaurin, Examples) {
  const auto one = euler_maclaurin_even([](double) { return 1.0; }, 0, 10);
  EXPECT_EQ(one.sum, 6.0);
  EXPECT_NEAR(one.half_integral, 5.0, 1e-13);
  EXPECT_NEAR(one.bound, 2.0, 1e-13);
  EXPECT_TRUE(one.holds);
  const auto lin = euler_maclaurin_even([](double x) { return x; }, 0, 10);
  EXPECT_EQ(lin.sum, 30.0);
  EXPECT_NEAR(lin.half_integral, 25.0, 1e-12);
  EXPECT_NEAR(lin.bound, 20.0, 1e-9);
  EXPECT_TRUE(lin.holds);
  const auto odd = euler_maclaurin_even([](double x) { return x; }, 3, 7);
  EXPECT_EQ(odd.sum, 10.0);
}

TEST(EulerMaclaurinProperty, HoldsForTheWindowedCubic) {
  const auto w = bump_window(100.0);
  const auto em = euler_maclaurin_even([&](double k) { return w(k / 100.0) * k * k * k; }, 100, 200);
  EXPECT_TRUE(em.holds);
  // smooth compactly supported: far better than the bound
  EXPECT_LE(std::abs(em.sum - em.half_integral), 1e-6 * em.sum);
}

TEST(Prediction, RoutesAgree) {
  const auto w = bump_window(64.0);
  const auto b = constants_bundle(w, kCut);
  for (double K : {64.0, 128.0, 256.0}) {
    const auto p = diag_main_prediction(w, b, K);
    EXPECT_NEAR(p.formula, p.k_sum, 1e-3) << K;
  }
}

TEST(Prediction, DoublingAddsFourLogTwo) {
  const auto w = bump_window(64.0);
  const auto b = constants_bundle(w, kCut);
  const auto p = diag_main_prediction(w, b, 100.0), q = diag_main_prediction(w, b, 200.0);
  EXPECT_NEAR(q.formula - p.formula, 4.0 * std::log(2.0), 1e-12);
}
