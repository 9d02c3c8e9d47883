#pragma once

// Rank-1 generalized Kloosterman sums H+-, the rank-1 admissibility
// reduction, and the exact eigenvalue-gap identities for T C^-1 Q C^-t.

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <vector>

#include "rnorm/core.hpp"
#include "rnorm/qforms.hpp"

namespace rnorm {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// (m1, m2/2; m2/2, m4)
struct HalfMatrix {
  i64 m1 = 0, m2 = 0, m4 = 0;
  friend bool operator==(const HalfMatrix&, const HalfMatrix&) = default;
};

inline i64 mod_inverse(i64 a, i64 m) {
  i64 x = 0, y = 0;
  i64 g = ext_gcd(mod_pos(a, m), m, x, y);
  require(g == 1, "mod_inverse: not invertible");
  return mod_pos(x, m);
}

namespace detail {

// The common numerator of the congruence part, reduced mod c.
inline i64 hsum_phase_numerator(const HalfMatrix& p, const HalfMatrix& s, i64 c, int sign, i64 d1,
                                i64 d1bar, i64 d2) {
  i64 v = mod_pos(d1bar * mod_pos(s.m4, c), c);
  v = mod_pos(v * mod_pos(d2 * d2, c), c);
  i64 w = mod_pos(d1bar * mod_pos(p.m2, c), c);
  w = mod_pos(w * mod_pos(d2, c), c);
  v = sign > 0 ? v - w : v + w;
  v += mod_pos(s.m2, c) * mod_pos(d2, c);
  v += d1bar * mod_pos(p.m1, c);
  v += d1 * mod_pos(s.m1, c);
  return mod_pos(v, c);
}

inline void hsum_check(const HalfMatrix& s, i64 c, int sign) {
  require(c >= 1, "h_sum: c must be >= 1");
  require(sign == 1 || sign == -1, "h_sum: sign must be +1 or -1");
  require(s.m4 != 0, "h_sum: s4 = 0 makes the global phase undefined");
}

}  // namespace detail

// H+-(P, S; c). Each phase is reduced exactly to r / (2 c |s4|) before
// exponentiation; sign = +1 selects H+.
inline cplx h_sum(const HalfMatrix& p, const HalfMatrix& s, i64 c, int sign) {
  if (p.m4 != s.m4) return {0.0, 0.0};
  detail::hsum_check(s, c, sign);
  const i64 s4abs = s.m4 < 0 ? -s.m4 : s.m4;
  const i64 L = 2 * c * s4abs;
  // global phase -+ p2 s2 / (2 c s4) = g / L
  const i64 g = mod_pos((sign > 0 ? -1 : 1) * p.m2 * s.m2 * (s.m4 < 0 ? -1 : 1), L);
  std::vector<cplx> table(static_cast<std::size_t>(L));
  for (i64 r = 0; r < L; ++r) {
    const double th = 2.0 * pi * static_cast<double>(r) / static_cast<double>(L);
    table[static_cast<std::size_t>(r)] = {std::cos(th), std::sin(th)};
  }
  Accumulator<cplx> acc;
  for (i64 d1 = 0; d1 < c; ++d1) {
    if (gcd(d1, c) != 1) continue;
    const i64 d1bar = c == 1 ? 0 : mod_inverse(d1, c);
    for (i64 d2 = 0; d2 < c; ++d2) {
      const i64 num = detail::hsum_phase_numerator(p, s, c, sign, d1, d1bar, d2);
      acc.add(table[static_cast<std::size_t>(mod_pos(num * 2 * s4abs + g, L))]);
    }
  }
  return acc.value();
}

// Same sum with each phase formed in floating point (numerator reduced by
// fmod, exact while it stays below 2^53) and exponentiated directly.
inline cplx h_sum_naive(const HalfMatrix& p, const HalfMatrix& s, i64 c, int sign) {
  if (p.m4 != s.m4) return {0.0, 0.0};
  detail::hsum_check(s, c, sign);
  const double glob = -static_cast<double>(sign) * static_cast<double>(p.m2) * static_cast<double>(s.m2) /
                      (2.0 * static_cast<double>(c) * static_cast<double>(s.m4));
  cplx acc{0.0, 0.0};
  for (i64 d1 = 0; d1 < c; ++d1) {
    if (gcd(d1, c) != 1) continue;
    const double d1bar = c == 1 ? 0.0 : static_cast<double>(mod_inverse(d1, c));
    for (i64 d2 = 0; d2 < c; ++d2) {
      const double x = static_cast<double>(d2);
      const double num = d1bar * static_cast<double>(s.m4) * x * x -
                         static_cast<double>(sign) * d1bar * static_cast<double>(p.m2) * x +
                         static_cast<double>(s.m2) * x + d1bar * static_cast<double>(p.m1) +
                         static_cast<double>(d1) * static_cast<double>(s.m1);
      const double cd = static_cast<double>(c);
      acc += std::polar(1.0, 2.0 * pi * (std::fmod(num, cd) / cd + glob));
    }
  }
  return acc;
}

struct Rank1Witness {
  bool admissible = false;
  UnimodularMatrix U, V;
  HalfMatrix P, S;  // U Q U^t and V^-1 T V^-t
};

// Antidiagonal representatives move a(Q), a(T) into the bottom-right slot.
inline Rank1Witness rank1_admissible(const QuadForm& t, const QuadForm& q, i64 s) {
  require(is_reduced(t) && is_reduced(q), "rank1_admissible: T and Q must be reduced");
  Rank1Witness w;
  w.U = w.V = UnimodularMatrix{0, 1, 1, 0};
  w.P = {q.c, q.b2, q.a};
  w.S = {t.c, t.b2, t.a};
  w.admissible = (s == t.a && s == q.a);
  return w;
}

// ---- exact rank-2 gap identities ----

struct RationalMat2 {
  cpp_rational m11, m12, m21, m22;
  cpp_rational det() const { return m11 * m22 - m12 * m21; }
};

inline RationalMat2 operator*(const RationalMat2& x, const RationalMat2& y) {
  return {x.m11 * y.m11 + x.m12 * y.m21, x.m11 * y.m12 + x.m12 * y.m22,
          x.m21 * y.m11 + x.m22 * y.m21, x.m21 * y.m12 + x.m22 * y.m22};
}

inline RationalMat2 transpose(const RationalMat2& x) { return {x.m11, x.m21, x.m12, x.m22}; }

inline RationalMat2 as_matrix(const QuadForm& q) {
  cpp_rational b(q.b2, 2);
  return {cpp_rational(q.a), b, b, cpp_rational(q.c)};
}

// C^-1 = adj(C) / det(C) for an integer matrix C.
inline RationalMat2 inverse_of_integer(i64 c11, i64 c12, i64 c21, i64 c22) {
  i64 d = c11 * c22 - c12 * c21;
  require(d != 0, "inverse_of_integer: C must be invertible");
  // the two-argument rational constructor rejects a negative denominator
  const i64 sg = d < 0 ? -1 : 1;
  d *= sg;
  return {cpp_rational(sg * c22, d), cpp_rational(-sg * c12, d), cpp_rational(-sg * c21, d), cpp_rational(sg * c11, d)};
}

struct DeltaGap {
  cpp_rational delta, rhs1, rhs2;
};

inline DeltaGap delta_gap(const QuadForm& t, const QuadForm& q, const RationalMat2& cinv) {
  require(is_positive_definite(t) && is_positive_definite(q), "delta_gap: T and Q must be positive definite");
  require(cinv.det() != 0, "delta_gap: C^-1 must be invertible");
  const RationalMat2 qt = cinv * as_matrix(q) * transpose(cinv);
  const RationalMat2 m = as_matrix(t) * qt;
  DeltaGap g;
  const cpp_rational diff = m.m11 - m.m22;
  g.delta = diff * diff + 4 * m.m12 * m.m21;

  const cpp_rational a(t.a), b(t.b2, 2), c(t.c);
  const cpp_rational &x = qt.m11, &y = qt.m12, &z = qt.m22;
  const cpp_rational e = a * x - c * z;
  const cpp_rational f = a * x + c * z;
  const cpp_rational s1 = 2 * a * c * y + b * f;
  g.rhs1 = e * e * (1 - b * b / (a * c)) + s1 * s1 / (a * c);
  const cpp_rational s2 = 2 * x * z * b + y * f;
  g.rhs2 = e * e * (1 - y * y / (x * z)) + s2 * s2 / (x * z);
  return g;
}

// ---- rank-2 constraint census (exploratory) ----

struct Rank2Census {
  double K = 0.0, eps = 0.0;
  i64 c_bound = 0;
  i64 triples_scanned = 0;
  i64 triples_close = 0;  // (s1 - s2)^2 <= K^eps
  // maxima of the normalized quantities over close triples
  double max_axcz = 0.0;      // |a x~ - c z~| / K
  double max_aybz = 0.0;      // |a y~ + b z~| c / K^2
  double max_adetz = 0.0;     // |a - |det C| z~| sqrt(K) / z~
  double max_cnorm = 0.0;     // ||C||_inf
  double max_acxz = 0.0;      // |ac - det(C)^2 x~ z~| / K^(3/2)
  double mean_axcz = 0.0, mean_aybz = 0.0, mean_adetz = 0.0, mean_acxz = 0.0;
};

// T, Q run over reduced forms with det in [K^(2-eps/2), K^(2+eps/2)], so that
// det(TQ) lies in [K^(4-eps), K^(4+eps)]; C over integer matrices with
// entries bounded by c_bound and 0 < |det C| <= K^eps.
inline Rank2Census rank2_census(i64 K_toy, double eps, i64 c_bound, unsigned threads = 1) {
  require(K_toy >= 8, "rank2_census: K_toy must be >= 8");
  require(c_bound >= 1, "rank2_census: C bound must be >= 1");
  Rank2Census rc;
  const double K = static_cast<double>(K_toy);
  rc.K = K;
  rc.eps = eps;
  rc.c_bound = c_bound;
  const double det_lo = std::pow(K, 2.0 - eps / 2.0), det_hi = std::pow(K, 2.0 + eps / 2.0);
  const double det_c_max = std::pow(K, eps);
  std::vector<QuadForm> forms;
  for_each_reduced(static_cast<i64>(std::floor(4.0 * det_hi)), [&](const QuadForm& f) {
    const double d = static_cast<double>(det4(f)) / 4.0;
    if (d >= det_lo && d <= det_hi) forms.push_back(f);
  });
  struct Cmat {
    double i11, i12, i21, i22, adet, norm;
  };
  std::vector<Cmat> cs;
  for (i64 c11 = -c_bound; c11 <= c_bound; ++c11)
    for (i64 c12 = -c_bound; c12 <= c_bound; ++c12)
      for (i64 c21 = -c_bound; c21 <= c_bound; ++c21)
        for (i64 c22 = -c_bound; c22 <= c_bound; ++c22) {
          const i64 d = c11 * c22 - c12 * c21;
          if (d == 0 || static_cast<double>(d < 0 ? -d : d) > det_c_max) continue;
          const double dd = static_cast<double>(d);
          i64 nrm = std::max({std::abs(c11), std::abs(c12), std::abs(c21), std::abs(c22)});
          cs.push_back({static_cast<double>(c22) / dd, -static_cast<double>(c12) / dd,
                        -static_cast<double>(c21) / dd, static_cast<double>(c11) / dd, std::abs(dd),
                        static_cast<double>(nrm)});
        }
  struct Partial {
    i64 scanned = 0, close = 0;
    double mx[5] = {0, 0, 0, 0, 0};
    double sum[4] = {0, 0, 0, 0};
  };
  const double close_bound = std::pow(K, eps);
  auto parts = ordered_map<Partial>(forms.size(), threads, [&](std::size_t it) {
    Partial pr;
    const QuadForm& t = forms[it];
    const double a = static_cast<double>(t.a), b = static_cast<double>(t.b2) / 2.0, c = static_cast<double>(t.c);
    for (const QuadForm& q : forms) {
      const double x = static_cast<double>(q.a), y = static_cast<double>(q.b2) / 2.0, z = static_cast<double>(q.c);
      for (const Cmat& cm : cs) {
        ++pr.scanned;
        const double xt = x * cm.i11 * cm.i11 + 2.0 * y * cm.i11 * cm.i12 + z * cm.i12 * cm.i12;
        const double yt = x * cm.i11 * cm.i21 + y * (cm.i11 * cm.i22 + cm.i12 * cm.i21) + z * cm.i12 * cm.i22;
        const double zt = x * cm.i21 * cm.i21 + 2.0 * y * cm.i21 * cm.i22 + z * cm.i22 * cm.i22;
        const double tr = a * xt + 2.0 * b * yt + c * zt;
        const double dt = (a * c - b * b) * (xt * zt - yt * yt);
        // (s1 - s2)^2 = tr(M) - 2 sqrt(det M)
        const double gap = tr - 2.0 * std::sqrt(std::max(0.0, dt));
        if (gap > close_bound) continue;
        ++pr.close;
        const double q1 = std::abs(a * xt - c * zt) / K;
        const double q2 = std::abs(a * yt + b * zt) * c / (K * K);
        const double q3 = std::abs(a - cm.adet * zt) * std::sqrt(K) / zt;
        const double q5 = std::abs(a * c - cm.adet * cm.adet * xt * zt) / std::pow(K, 1.5);
        const double v[5] = {q1, q2, q3, cm.norm, q5};
        for (int i = 0; i < 5; ++i) pr.mx[i] = std::max(pr.mx[i], v[i]);
        pr.sum[0] += q1;
        pr.sum[1] += q2;
        pr.sum[2] += q3;
        pr.sum[3] += q5;
      }
    }
    return pr;
  });
  double sums[4] = {0, 0, 0, 0};
  double mx[5] = {0, 0, 0, 0, 0};
  for (const auto& pr : parts) {
    rc.triples_scanned += pr.scanned;
    rc.triples_close += pr.close;
    for (int i = 0; i < 5; ++i) mx[i] = std::max(mx[i], pr.mx[i]);
    for (int i = 0; i < 4; ++i) sums[i] += pr.sum[i];
  }
  rc.max_axcz = mx[0];
  rc.max_aybz = mx[1];
  rc.max_adetz = mx[2];
  rc.max_cnorm = mx[3];
  rc.max_acxz = mx[4];
  if (rc.triples_close > 0) {
    const double n = static_cast<double>(rc.triples_close);
    rc.mean_axcz = sums[0] / n;
    rc.mean_aybz = sums[1] / n;
    rc.mean_adetz = sums[2] / n;
    rc.mean_acxz = sums[3] / n;
  }
  return rc;
}

}  // namespace rnorm
