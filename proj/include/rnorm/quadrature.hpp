#pragma once

// Gauss-Legendre panels and double-exponential rules, generic in the value
// type (double or std::complex<double>).

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "rnorm/core.hpp"

namespace rnorm::quad {

struct Rule {
  std::vector<double> x, w;  // on [-1, 1]
};

inline Rule make_gauss_legendre(int n) {
  Rule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    long double pp = 0;
    for (int it = 0; it < 100; ++it) {
      long double p1 = 1, p2 = 0;
      for (int j = 1; j <= n; ++j) {
        long double p3 = p2;
        p2 = p1;
        p1 = ((2.0L * j - 1.0L) * z * p2 - (j - 1.0L) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0L);
      long double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-19L) break;
    }
    const double w = static_cast<double>(2.0L / ((1.0L - z * z) * pp * pp));
    r.x[static_cast<std::size_t>(i)] = -static_cast<double>(z);
    r.x[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(z);
    r.w[static_cast<std::size_t>(i)] = r.w[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

inline const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

// One Gauss-Legendre panel on [a, b].
template <class F>
auto gl_panel(F&& f, double a, double b, const Rule& r) -> decltype(f(a)) {
  using T = decltype(f(a));
  const double m = 0.5 * (a + b), h = 0.5 * (b - a);
  T s{};
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(m + h * r.x[i]);
  return s * h;
}

// Composite rule over `panels` equal panels.
template <class F>
auto gl_composite(F&& f, double a, double b, int panels, int order = 20) -> decltype(f(a)) {
  using T = decltype(f(a));
  const Rule& r = gauss_legendre(order);
  Accumulator<T> acc;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) acc.add(gl_panel(f, a + p * h, p + 1 == panels ? b : a + (p + 1) * h, r));
  return acc.value();
}

template <class T>
struct Result {
  T value{};
  double error = 0.0;
};

// Doubles the panel count until two successive composite values agree to tol.
template <class F>
auto gl_refine(F&& f, double a, double b, int panels, double tol, int max_panels = 1 << 16)
    -> Result<decltype(f(a))> {
  using T = decltype(f(a));
  T prev = gl_composite(f, a, b, panels);
  for (;;) {
    panels *= 2;
    T cur = gl_composite(f, a, b, panels);
    double err = std::abs(cur - prev);
    if (err <= tol || panels >= max_panels) return {cur, err};
    prev = cur;
  }
}

// Tanh-sinh on [a, b]; f must be finite in the open interval.
template <class F>
auto tanh_sinh(F&& f, double a, double b, double tol, int max_level = 12) -> Result<decltype(f(a))> {
  using T = decltype(f(a));
  const double hw = 0.5 * (b - a);
  auto node = [&](double t, double& x, double& w, bool& ok) {
    const double s = 0.5 * pi * std::sinh(t);
    const double ch = std::cosh(s);
    const double u = 1.0 / (std::exp(2.0 * s) + 1.0);  // (1 - tanh s) / 2
    // distance from the nearer endpoint, in the original variable
    const double dist = 2.0 * hw * (t >= 0 ? u : 1.0 - u);
    x = t >= 0 ? b - dist : a + dist;
    w = hw * 0.5 * pi * std::cosh(t) / (ch * ch);
    ok = dist > 0.0 && x > a && x < b;
  };
  auto level_sum = [&](double h, bool odd_only) {
    Accumulator<T> acc;
    for (int sgn : {1, -1}) {
      for (int k = odd_only ? 1 : (sgn > 0 ? 0 : 1);; k += odd_only ? 2 : 1) {
        const double t = sgn * k * h;
        double x, w;
        bool ok;
        node(t, x, w, ok);
        if (!ok || w < 1e-300) break;
        T v = w * f(x);
        acc.add(v);
        if (std::abs(v) < 1e-20 * (std::abs(acc.value()) + 1e-300) && k * h > 3.0) break;
      }
    }
    return acc.value();
  };
  double h = 1.0;
  T s = level_sum(h, false);
  T est = s * h;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    s += level_sum(h, true);
    T next = s * h;
    double err = std::abs(next - est);
    est = next;
    if (level >= 3 && err <= tol) return {est, err};
  }
  return {est, std::abs(est) * 1e-16 + tol * 10};
}

// Exp-sinh on [0, inf) with y = L exp(pi/2 sinh t).
template <class F>
auto exp_sinh(F&& f, double L, double tol, int max_level = 12) -> Result<decltype(f(L))> {
  using T = decltype(f(L));
  auto level_sum = [&](double h, bool odd_only) {
    Accumulator<T> acc;
    for (int sgn : {1, -1}) {
      int small = 0;
      for (int k = odd_only ? 1 : (sgn > 0 ? 0 : 1);; k += odd_only ? 2 : 1) {
        const double t = sgn * k * h;
        const double e = 0.5 * pi * std::sinh(t);
        if (e > 700.0) break;
        const double y = L * std::exp(e);
        if (y <= 1e-300) break;
        const double w = y * 0.5 * pi * std::cosh(t);
        T v = w * f(y);
        acc.add(v);
        if (std::abs(v) < 1e-19 * (std::abs(acc.value()) + 1e-300)) {
          if (++small >= 2) break;
        } else {
          small = 0;
        }
      }
    }
    return acc.value();
  };
  double h = 1.0;
  T s = level_sum(h, false);
  T est = s * h;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    s += level_sum(h, true);
    T next = s * h;
    double err = std::abs(next - est);
    est = next;
    if (level >= 3 && err <= tol) return {est, err};
  }
  return {est, std::abs(est) * 1e-16 + tol * 10};
}

}  // namespace rnorm::quad
