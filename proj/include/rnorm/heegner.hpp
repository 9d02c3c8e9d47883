#pragma once

// Heegner points, the point-pair invariant u, SL2(Z)-orbit counting and the
// census of orbit points close to a Heegner point.

#include <array>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "rnorm/core.hpp"
#include "rnorm/qforms.hpp"

namespace rnorm {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

struct UpperHalfPoint {
  double x = 0.0, y = 1.0;
  cplx z() const { return {x, y}; }
};

inline UpperHalfPoint heegner_point(const QuadForm& q) {
  require(is_positive_definite(q), "heegner_point: form must be positive definite");
  const double a = static_cast<double>(q.a);
  return {-static_cast<double>(q.b2) / (2.0 * a), std::sqrt(static_cast<double>(det4(q))) / (2.0 * a)};
}

inline UpperHalfPoint mobius(const UnimodularMatrix& m, const UpperHalfPoint& p) {
  require(m.det() == 1, "mobius: matrix must have determinant +1");
  const cplx z = p.z();
  const cplx w = (static_cast<double>(m.e11) * z + static_cast<double>(m.e12)) /
                 (static_cast<double>(m.e21) * z + static_cast<double>(m.e22));
  // Im(gz) = y / |cz + d|^2 exactly, avoids cancellation in the quotient
  const double cx = static_cast<double>(m.e21) * p.x + static_cast<double>(m.e22);
  const double cy = static_cast<double>(m.e21) * p.y;
  return {w.real(), p.y / (cx * cx + cy * cy)};
}

inline double pair_invariant(const UpperHalfPoint& z1, const UpperHalfPoint& z2) {
  const double dx = z1.x - z2.x, dy = z1.y - z2.y;
  return (dx * dx + dy * dy) / (4.0 * z1.y * z2.y);
}

// Exact u(z_Q, M z_Q) = (P^2 + 4 N R^2) / (16 a^2 N).
inline cpp_rational u_orbit_exact(const QuadForm& q, const UnimodularMatrix& m) {
  require(m.det() == 1, "u_orbit_exact: matrix must have determinant +1");
  require(is_positive_definite(q), "u_orbit_exact: form must be positive definite");
  const cpp_int a = q.a, b2 = q.b2, n = det4(q);
  const cpp_int ga = m.e11, gb = m.e12, gc = m.e21, gd = m.e22;
  cpp_int p = gc * b2 * b2 - gc * n - 2 * (gd - ga) * a * b2 - 4 * gb * a * a;
  cpp_int r = gc * b2 - (gd - ga) * a;
  return cpp_rational(p * p + 4 * n * r * r, 16 * a * a * n);
}

// Visits every gamma in SL2(Z) (+-gamma both) with u(z1, gamma z2) < X,
// calling f(gamma, u). The enumeration is complete: |c z2 + d|^2 is bounded
// through cosh(dist) = 1 + 2u, and for fixed (c, d) the admissible (a, b)
// form one arithmetic progression.
template <class F>
void for_each_orbit_point(const UpperHalfPoint& z1, const UpperHalfPoint& z2, double X, F&& f) {
  require(X > 0.0, "orbit enumeration: X must be positive");
  const double e = std::sqrt(X + 1.0) + std::sqrt(X);
  const double qbound = (z2.y / z1.y) * e * e * (1.0 + 1e-12);
  const double rhs = 4.0 * z1.y * z2.y * X;
  const i64 c_max = static_cast<i64>(std::floor(std::sqrt(qbound) / z2.y));
  for (i64 c = -c_max; c <= c_max; ++c) {
    const double cy = static_cast<double>(c) * z2.y;
    const double rem = qbound - cy * cy;
    if (rem < 0.0) continue;
    const double r = std::sqrt(rem);
    const double centre = -static_cast<double>(c) * z2.x;
    const i64 d_lo = static_cast<i64>(std::ceil(centre - r));
    const i64 d_hi = static_cast<i64>(std::floor(centre + r));
    for (i64 d = d_lo; d <= d_hi; ++d) {
      if (gcd(c, d) != 1) continue;
      i64 x = 0, y = 0;
      ext_gcd(d, c, x, y);  // d x + c y = 1
      const i64 a0 = x, b0 = -y;
      const cplx zz1 = z1.z(), zz2 = z2.z();
      const cplx q = static_cast<double>(c) * zz2 + static_cast<double>(d);
      const cplx w0 = zz1 * q - static_cast<double>(a0) * zz2 - static_cast<double>(b0);
      // |w0 - n q|^2 < rhs
      const double qq = std::norm(q);
      const double centre_n = (w0.real() * q.real() + w0.imag() * q.imag()) / qq;
      const double dist2 = std::norm(w0 - centre_n * q);
      if (dist2 >= rhs * (1.0 + 1e-12) + 1e-300) continue;
      const double half = std::sqrt(std::max(0.0, rhs - dist2) / qq) + 1e-9;
      const i64 n_lo = static_cast<i64>(std::ceil(centre_n - half));
      const i64 n_hi = static_cast<i64>(std::floor(centre_n + half));
      for (i64 n = n_lo; n <= n_hi; ++n) {
        const cplx w = w0 - static_cast<double>(n) * q;
        const double u = std::norm(w) / (4.0 * z1.y * z2.y);
        if (u < X) f(UnimodularMatrix{a0 + n * c, b0 + n * d, c, d}, u);
      }
    }
  }
}

inline i64 default_search_bound(const UpperHalfPoint& z, double X) {
  return static_cast<i64>(std::ceil(10.0 * (1.0 + std::sqrt(X)) * (z.y + 1.0 / z.y)));
}

struct OrbitCount {
  i64 count = 0;         // gamma inside the entry box
  i64 total = 0;         // all gamma with u < X
  i64 max_entry = 0;     // largest |entry| among all gamma
  bool exhaustive = true;  // every gamma with u < X lies inside the box
};

inline OrbitCount count_orbit_close(const UpperHalfPoint& z, double X, i64 search_bound) {
  require(z.y >= 0.1, "count_orbit_close: Im z must be >= 1/10");
  require(X > 0.0, "count_orbit_close: X must be positive");
  OrbitCount oc;
  for_each_orbit_point(z, z, X, [&](const UnimodularMatrix& g, double) {
    i64 m = 0;
    for (i64 e : {g.e11, g.e12, g.e21, g.e22}) m = std::max(m, e < 0 ? -e : e);
    ++oc.total;
    oc.max_entry = std::max(oc.max_entry, m);
    if (m <= search_bound) ++oc.count;
  });
  oc.exhaustive = oc.total == oc.count;
  return oc;
}

inline double orbit_lemma_bound(const UpperHalfPoint& z, double X) {
  return 20.0 * (std::sqrt(X * (X + 1.0)) * z.y + X + 1.0);
}

// Plain box search, the oracle for the orbit enumeration.
inline i64 count_orbit_box(const UpperHalfPoint& z, double X, i64 bound) {
  i64 count = 0;
  for (i64 c = -bound; c <= bound; ++c)
    for (i64 d = -bound; d <= bound; ++d) {
      if (gcd(c, d) != 1) continue;
      for (i64 a = -bound; a <= bound; ++a)
        for (i64 b = -bound; b <= bound; ++b) {
          if (a * d - b * c != 1) continue;
          if (pair_invariant(z, mobius({a, b, c, d}, z)) < X) ++count;
        }
    }
  return count;
}

// ---- census of close orbit points ----

enum class CensusCase { translation, low_lying, reflect_self, reflect_translation, reflect_low_lying };
inline constexpr std::array<CensusCase, 5> census_cases = {
    CensusCase::translation, CensusCase::low_lying, CensusCase::reflect_self,
    CensusCase::reflect_translation, CensusCase::reflect_low_lying};

inline std::string_view to_string(CensusCase c) {
  switch (c) {
    case CensusCase::translation: return "translation";
    case CensusCase::low_lying: return "low_lying";
    case CensusCase::reflect_self: return "reflect_self";
    case CensusCase::reflect_translation: return "reflect_translation";
    case CensusCase::reflect_low_lying: return "reflect_low_lying";
  }
  return "?";
}

struct CensusRow {
  QuadForm form;
  CensusCase kind;
  i64 count = 0;
  double u_min = 0.0;
};

struct CensusRecord {
  i64 n_max = 0;
  double k = 0.0, eps = 0.0, u_lo = 0.0, u_hi = 0.0;
  i64 forms_scanned = 0;
  std::array<i64, 5> counts{};
  std::array<double, 5> weighted{};
  double weighted_total = 0.0;
  std::vector<CensusRow> rows;  // forms with a nonzero count, ordered (N, a, b2, case)
};

// Close orbit points of a single form, by case.
inline std::vector<CensusRow> census_form(const QuadForm& q, double u_lo, double u_hi) {
  const UpperHalfPoint z = heegner_point(q);
  const UpperHalfPoint zr{-z.x, z.y};
  std::array<i64, 5> cnt{};
  std::array<double, 5> umin;
  umin.fill(std::numeric_limits<double>::infinity());
  auto note = [&](CensusCase k, double u) {
    auto i = static_cast<std::size_t>(k);
    ++cnt[i];
    umin[i] = std::min(umin[i], u);
  };
  for_each_orbit_point(z, z, u_hi, [&](const UnimodularMatrix& g, double u) {
    if (u < u_lo) return;
    note(g.e21 == 0 ? CensusCase::translation : CensusCase::low_lying, u);
  });
  for_each_orbit_point(z, zr, u_hi, [&](const UnimodularMatrix& g, double u) {
    if (u < u_lo) return;
    if (g.e21 == 0 && g.e12 == 0)
      note(CensusCase::reflect_self, u);
    else
      note(g.e21 == 0 ? CensusCase::reflect_translation : CensusCase::reflect_low_lying, u);
  });
  std::vector<CensusRow> out;
  for (auto kind : census_cases) {
    auto i = static_cast<std::size_t>(kind);
    if (cnt[i] > 0) out.push_back({q, kind, cnt[i], umin[i]});
  }
  return out;
}

inline CensusRecord boundary_census(i64 n_max, double k, double eps, unsigned threads = 1) {
  require(n_max >= 3, "boundary_census: N_max must be >= 3");
  require(k >= 2.0, "boundary_census: k must be >= 2");
  CensusRecord rec;
  rec.n_max = n_max;
  rec.k = k;
  rec.eps = eps;
  rec.u_lo = std::pow(k, -2.0 - eps);
  rec.u_hi = std::pow(k, -1.0 + eps);
  std::vector<QuadForm> batch;
  auto flush = [&] {
    auto res = ordered_map<std::vector<CensusRow>>(batch.size(), threads, [&](std::size_t i) {
      return census_form(batch[i], rec.u_lo, rec.u_hi);
    });
    for (auto& rows : res)
      for (auto& r : rows) {
        auto i = static_cast<std::size_t>(r.kind);
        const double det = static_cast<double>(det4(r.form)) / 4.0;
        rec.counts[i] += r.count;
        rec.weighted[i] += static_cast<double>(r.count) * std::pow(det, -1.5);
        rec.rows.push_back(r);
      }
    rec.forms_scanned += static_cast<i64>(batch.size());
    batch.clear();
  };
  for_each_reduced(n_max, [&](const QuadForm& q) {
    batch.push_back(q);
    if (batch.size() >= 65536) flush();
  });
  flush();
  for (double w : rec.weighted) rec.weighted_total += w;
  return rec;
}

}  // namespace rnorm
