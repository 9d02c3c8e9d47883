#pragma once

// Bessel functions of half-odd-integer order, the matrix-argument Bessel
// integral, the Bessel product identity and k-averaged Bessel sums.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "rnorm/core.hpp"
#include "rnorm/expsums.hpp"
#include "rnorm/quadrature.hpp"

namespace rnorm {

// ---- J_{n+1/2}(x) ----

namespace detail {

// j_n(x) by backward recurrence normalized with sum (2k+1) j_k^2 = 1.
inline double spherical_j_miller(int n, double x) {
  const double big = std::max(static_cast<double>(n), x);
  const int m = static_cast<int>(big + 30.0 + std::ceil(std::sqrt(60.0 * big)));
  double f_next = 0.0, f = 1.0, fn = 0.0, f0 = 0.0, f1 = 0.0;
  double norm = 0.0;
  if (m == n) fn = f;
  norm += (2.0 * m + 1.0) * f * f;
  for (int k = m; k >= 1; --k) {
    double f_prev = (2.0 * k + 1.0) / x * f - f_next;
    f_next = f;
    f = f_prev;  // now f = f_{k-1}
    if (k - 1 == n) fn = f;
    if (k - 1 == 1) f1 = f;
    norm += (2.0 * (k - 1) + 1.0) * f * f;
    if (std::abs(f) > 1e100) {
      f *= 1e-100;
      f_next *= 1e-100;
      fn *= 1e-100;
      f1 *= 1e-100;
      norm *= 1e-200;
    }
  }
  f0 = f;
  const double j0 = std::sin(x) / x;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  const double dot = f0 * j0 + f1 * j1;
  const double scale = (dot < 0 ? -1.0 : 1.0) / std::sqrt(norm);
  return fn * scale;
}

inline double spherical_j_forward(int n, double x) {
  double jm = std::sin(x) / x;
  if (n == 0) return jm;
  double j = std::sin(x) / (x * x) - std::cos(x) / x;
  for (int k = 1; k < n; ++k) {
    double jp = (2.0 * k + 1.0) / x * j - jm;
    jm = j;
    j = jp;
  }
  return j;
}

}  // namespace detail

// J_{n + 1/2}(x) for n >= 0, x >= 0.
inline double bessel_j_half(int n, double x) {
  require(n >= 0, "bessel_j: order must be n + 1/2 with n >= 0");
  require(x >= 0.0, "bessel_j: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double nu = n + 0.5;
  double j;
  if (n == 0)
    j = std::sin(x) / x;  // no cancellation for n = 0
  else if (n == 1 && x >= 1.0)
    j = std::sin(x) / (x * x) - std::cos(x) / x;
  else if (x > 2.0 * nu)
    j = detail::spherical_j_forward(n, x);
  else
    j = detail::spherical_j_miller(n, x);
  return std::sqrt(2.0 * x / pi) * j;
}

// Order given as a real half-odd-integer nu.
inline double bessel_j(double nu, double x) {
  const double n = nu - 0.5;
  require(n >= 0.0 && std::abs(n - std::round(n)) < 1e-12, "bessel_j: order must be a half-odd-integer >= 1/2");
  return bessel_j_half(static_cast<int>(std::lround(n)), x);
}

// Hankel functions of half-odd-integer order: the asymptotic series terminates.
struct HankelPair {
  cplx h1, h2;
};

inline std::vector<double> hankel_coefficients(int n) {
  const double nu = n + 0.5;
  std::vector<double> a(static_cast<std::size_t>(n + 1));
  a[0] = 1.0;
  for (int k = 1; k <= n; ++k)
    a[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k - 1)] * (4.0 * nu * nu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k);
  return a;
}

// H^(1), H^(2) of order n + 1/2 at complex z (Re z > 0), with the factors
// e^{+-i z} left out: returns e^{-iz} H1 and e^{iz} H2.
inline HankelPair hankel_half_scaled(int n, cplx z, const std::vector<double>& a) {
  const double mu = (n + 0.5) * pi / 2.0 + pi / 4.0;
  const cplx I(0.0, 1.0);
  cplx sp = 0.0, sm = 0.0, ipow = 1.0, zinv = 1.0 / z, zp = 1.0;
  for (int k = 0; k <= n; ++k) {
    sp += ipow * a[static_cast<std::size_t>(k)] * zp;
    sm += std::conj(ipow) * a[static_cast<std::size_t>(k)] * zp;
    ipow *= I;
    zp *= zinv;
  }
  const cplx pre = std::sqrt(2.0 / (pi * z));
  return {pre * std::exp(-I * mu) * sp, pre * std::exp(I * mu) * sm};
}

// ---- types ----

struct BesselOrder {
  int k = 6;
  double ell() const { return k - 1.5; }
  int n() const { return k - 2; }  // ell = n + 1/2
};

inline BesselOrder make_order(int k) {
  require(k >= 6 && k % 2 == 0, "BesselOrder: k must be even and >= 6");
  return {k};
}

struct EigenPair {
  double s1 = 1.0, s2 = 1.0;
};

struct WeightWindow {
  double K = 8.0;
  std::function<double(double)> w;
  double omega = 0.0, omega_prime = 0.0;
  double operator()(double x) const { return w(x); }
};

inline WeightWindow make_window(double K, std::function<double(double)> w) {
  require(K >= 8.0, "WeightWindow: K must be >= 8");
  WeightWindow win{K, std::move(w), 0.0, 0.0};
  const auto& f = win.w;
  win.omega = quad::tanh_sinh([&](double x) { return f(x) * x * x * x; }, 1.0, 2.0, 1e-14).value;
  win.omega_prime = quad::tanh_sinh([&](double x) { return f(x) * x * x * x * std::log(x); }, 1.0, 2.0, 1e-14).value;
  require(win.omega > 0.0, "WeightWindow: omega must be positive");
  return win;
}

inline double bump(double x) {
  if (x <= 1.0 || x >= 2.0) return 0.0;
  return std::exp(-1.0 / ((x - 1.0) * (2.0 - x)));
}

inline WeightWindow bump_window(double K) { return make_window(K, bump); }

// ---- matrix-argument Bessel ----

inline double matrix_bessel(const BesselOrder& ord, const EigenPair& ep, double tol = 1e-10) {
  const int n = ord.n();
  auto f = [&](double th) {
    const double s = std::sin(th);
    return bessel_j_half(n, 4.0 * pi * ep.s1 * s) * bessel_j_half(n, 4.0 * pi * ep.s2 * s) * s;
  };
  const int panels = std::max(4, static_cast<int>(std::ceil(2.0 * (ep.s1 + ep.s2))));
  return quad::gl_refine(f, 0.0, pi / 2.0, panels, tol).value;
}

inline EigenPair eigen_pair(const QuadForm& t, const QuadForm& q, const RationalMat2& cinv) {
  require(is_positive_definite(t) && is_positive_definite(q), "eigen_pair: T and Q must be positive definite");
  require(cinv.det() != 0, "eigen_pair: C^-1 must be invertible");
  const RationalMat2 m = as_matrix(t) * cinv * as_matrix(q) * transpose(cinv);
  const cpp_rational tr = m.m11 + m.m22, dt = m.det();
  const cpp_rational disc = tr * tr - 4 * dt;
  const double trd = static_cast<double>(tr), dtd = static_cast<double>(dt);
  const double sq = std::sqrt(std::max(0.0, static_cast<double>(disc)));
  const double l1 = 0.5 * (trd + sq);
  const double l2 = dtd / l1;
  if (!(l2 > 0.0)) throw std::logic_error("eigen_pair: non-positive eigenvalue");
  return {std::sqrt(l1), std::sqrt(l2)};
}

// ---- product identity ----

struct ProductIdentity {
  double lhs = 0.0, rhs = 0.0;
  double real_part_error = 0.0, tail_error = 0.0;
};

// J(4 pi s1 sin a) J(4 pi s2 sin a) against
// (1/pi) Re( e(-(ell+1)/4) int_0^inf e((s1^2+s2^2) t + sin^2 a / t) J(4 pi s1 s2 t) dt/t ).
// The integral is taken on [t0, t_max] along the real axis, and from t_max
// to t_max + i inf via the terminating Hankel expansion.
inline ProductIdentity product_identity_gap(const BesselOrder& ord, double s1, double s2, double alpha,
                                            double t_max = 0.0) {
  require(alpha > 0.0 && alpha < pi / 2.0, "product_identity_gap: alpha must lie in (0, pi/2)");
  require(s1 > 0.0 && s2 > 0.0, "product_identity_gap: s1, s2 must be positive");
  const int n = ord.n();
  const double nu = ord.ell();
  const double A = s1 * s1 + s2 * s2, B = std::sin(alpha) * std::sin(alpha), c = 4.0 * pi * s1 * s2;
  ProductIdentity out;
  out.lhs = bessel_j_half(n, 4.0 * pi * s1 * std::sin(alpha)) * bessel_j_half(n, 4.0 * pi * s2 * std::sin(alpha));

  const double T1 = t_max > 0.0 ? t_max : std::max(1.0, 4.0 * n * n / c + 5.0);
  // below t0 the integrand is bounded by |J(ct)|/t <= (ct/2)^nu / Gamma(nu+1) / t
  const double lg = std::lgamma(nu + 1.0);
  const double t0 = 2.0 / c * std::exp((std::log(1e-13 * nu) + lg) / nu);
  const cplx I(0.0, 1.0);
  auto g = [&](double t) {
    const double ph = 2.0 * pi * (A * t + B / t);
    return bessel_j_half(n, c * t) / t * cplx(std::cos(ph), std::sin(ph));
  };
  Accumulator<cplx> acc;
  const quad::Rule& r = quad::gauss_legendre(20);
  double err = 0.0;
  for (double t = std::min(t0, T1); t < T1;) {
    const double freq = std::abs(2.0 * pi * (A - B / (t * t))) + c;
    double h = std::min(T1 - t, 0.5 * pi / freq);
    if (T1 - t - h < 1e-3 * h) h = T1 - t;
    const cplx coarse = quad::gl_panel(g, t, t + h, quad::gauss_legendre(14));
    const cplx fine = quad::gl_panel(g, t, t + h, r);
    err += std::abs(fine - coarse);
    acc.add(fine);
    t += h;
  }
  out.real_part_error = err;

  const auto a = hankel_coefficients(n);
  const double wm = 2.0 * pi * A - c;  // = 2 pi (s1 - s2)^2 >= 0
  const double wp = 2.0 * pi * A + c;
  auto tail = [&](double y) {
    const cplx t(T1, y);
    const HankelPair hp = hankel_half_scaled(n, c * t, a);
    const cplx e1 = std::exp(I * wp * t), e2 = std::exp(I * wm * t);
    const cplx jt = 0.5 * (hp.h1 * e1 + hp.h2 * e2);
    return I * std::exp(2.0 * pi * I * B / t) * jt / t;
  };
  const double L = wm > 1e-3 ? std::min(T1, 1.0 / wm) : T1;
  const auto tr = quad::exp_sinh(tail, L, 1e-14);
  out.tail_error = tr.error;
  const cplx total = acc.value() + tr.value;
  out.rhs = (std::polar(1.0, -2.0 * pi * (nu + 1.0) / 4.0) * total).real() / pi;
  return out;
}

// ---- averaged Bessel sum ----

inline cplx averaged_bessel_sum(const WeightWindow& win, double x, bool reverse = false) {
  require(x > 0.0, "averaged_bessel_sum: x must be positive");
  const double K = win.K;
  i64 k_lo = static_cast<i64>(std::ceil(K));
  if (k_lo % 2) ++k_lo;
  const i64 k_hi = static_cast<i64>(std::floor(2.0 * K));
  std::vector<double> terms;
  for (i64 k = k_lo; k <= k_hi; k += 2) {
    const double w = win(static_cast<double>(k) / K);
    const double sgn = (k / 2) % 2 == 0 ? 1.0 : -1.0;  // i^k for even k
    terms.push_back(w == 0.0 ? 0.0 : sgn * w * bessel_j_half(static_cast<int>(k - 2), x));
  }
  Accumulator<double> acc;
  if (reverse)
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) acc.add(*it);
  else
    for (double v : terms) acc.add(v);
  return {acc.value(), 0.0};
}

}  // namespace rnorm
