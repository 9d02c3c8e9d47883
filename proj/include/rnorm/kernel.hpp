#pragma once

// Gamma-factor kernel: c_k, G(tau, k, s), the duplication identity, the
// Gaussian model, the cutoff V, kappa(0) and the spectral moment.
//
// Logs are kept in long double; only differences are exponentiated.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "rnorm/core.hpp"
#include "rnorm/gamma.hpp"

namespace rnorm {

namespace detail {
inline constexpr long double log_2pi = 1.837877066409345483560659472811235279723L;
inline constexpr long double log_4pi = 2.531024246969290792696601123085402600849L;
inline constexpr long double log_pi = 1.144729885849400174143427351353058711647L;
inline constexpr long double log_2 = 0.693147180559945309417232121458176568076L;

inline void check_weight(int k) { require(k >= 6 && k % 2 == 0, "kernel: k must be even and >= 6"); }
}  // namespace detail

// log c_k, c_k = 2 sqrt(pi) (4 pi)^(3-2k) Gamma(k-3/2) Gamma(k-2).
inline long double log_c_k(int k) {
  detail::check_weight(k);
  const long double kk = k;
  return detail::log_2 + 0.5L * detail::log_pi + (3.0L - 2.0L * kk) * detail::log_4pi +
         log_gamma(kk - 1.5L) + log_gamma(kk - 2.0L);
}

// Same constant through the duplication formula.
inline long double log_c_k_duplication(int k) {
  detail::check_weight(k);
  const long double kk = k;
  return -detail::log_2 + (2.5L - 2.0L * kk) * detail::log_2pi + log_gamma((kk - 1.5L) / 2.0L) +
         log_gamma((kk - 0.5L) / 2.0L) + log_gamma((kk - 2.0L) / 2.0L) + log_gamma((kk - 1.0L) / 2.0L);
}

// log G(tau, k, s), G = 4 (2 pi)^(-(k-1)-2s) Gamma(l/2 + s + i tau/2) Gamma(l/2 + s - i tau/2).
inline cplxl log_gamma_factor(cplxl tau, int k, cplxl s) {
  detail::check_weight(k);
  require(std::abs(tau.imag()) <= 2.0L, "gamma_factor: |Im tau| must be <= 2");
  const long double half_l = (k - 1.5L) / 2.0L;
  const cplxl I(0.0L, 1.0L);
  const cplxl z1 = half_l + s + I * tau / 2.0L, z2 = half_l + s - I * tau / 2.0L;
  require(z1.real() > 0.0L && z2.real() > 0.0L, "gamma_factor: Gamma argument on or left of a pole");
  return 2.0L * detail::log_2 - (static_cast<long double>(k - 1) + 2.0L * s) * detail::log_2pi + log_gamma(z1) +
         log_gamma(z2);
}

// log of c_k^-1 G(tau, k, v+1/2+it) G(tau, k, v+1/2-it).
inline cplxl log_kernel_product(int k, long double t, cplxl tau, cplxl v) {
  const cplxl I(0.0L, 1.0L);
  return log_gamma_factor(tau, k, v + 0.5L + I * t) + log_gamma_factor(tau, k, v + 0.5L - I * t) - log_c_k(k);
}

inline double gaussian_model(int k, double t, double tau) {
  return 2.0 / std::pow(pi, 2.5) * std::pow(static_cast<double>(k), 1.5) *
         std::exp(-(4.0 * t * t + tau * tau) / static_cast<double>(k));
}

// exact / model - 1 at v = 0.
inline double gaussian_approx_error(int k, double t, double tau) {
  detail::check_weight(k);
  const double lim = std::pow(static_cast<double>(k), 0.6);
  require(std::abs(t) <= lim && std::abs(tau) <= lim, "gaussian_approx_error: |t|, |tau| must be <= k^0.6");
  const long double le = log_kernel_product(k, t, tau, 0.0L).real();
  const long double lm = std::log(2.0L) - 2.5L * detail::log_pi + 1.5L * std::log(static_cast<long double>(k)) -
                         (4.0L * t * t + static_cast<long double>(tau) * tau) / k;
  return static_cast<double>(std::expm1(le - lm));
}

// ---- cutoff V ----

struct QuadSpec {
  double tol = 1e-10;  // relative target for quadrature and truncation
  double h = 0.0;      // fixed trapezoid step; 0 selects it by halving
  int max_halvings = 8;
};

struct CutoffResult {
  double value = 0.0;
  double sigma = 0.0;        // real part of the v-contour
  double h = 0.0;            // trapezoid step used for t and Im v
  double quad_error = 0.0;   // difference to the previous step
  double scale = 0.0;        // integral of |integrand| on the contour
  double tail_estimate = 0.0;  // t-tail of the Gaussian model beyond T_max, relative
  double t_max = 0.0, v_max = 0.0;
};

namespace detail {

struct ContourPlan {
  long double sigma;
  bool residue;
};

// Picks the contour Re v = sigma with the smallest integrand scale; to the
// left of 0 the residue at v = 0 is added back.
inline ContourPlan choose_contour(int k, long double logx, long double tau) {
  const long double base = (k - 0.5L) / 2.0L;
  ContourPlan best{3.0L, false};
  long double best_m = INFINITY;
  for (long double s : {-2.0L, -1.0L, -0.5L, 0.5L, 1.0L, 2.0L, 3.0L}) {
    if (base + s < 0.75L) continue;
    const long double m = log_kernel_product(k, 0.0L, tau, s).real() - s * logx + s * s - std::log(std::fabs(s));
    if (m < best_m) {
      best_m = m;
      best = {s, s < 0};
    }
  }
  return best;
}

// Trapezoid approximation of V for a fixed step h.
struct FixedStep {
  long double value, l1;  // l1: integral of |integrand|, the cancellation scale
};

inline FixedStep cutoff_v_fixed(int k, long double logx, long double logratio, long double tau,
                                  const ContourPlan& plan, long double h, long double t_max, long double y_max) {
  const long double base = (k - 0.5L) / 2.0L;
  const long double logc = log_c_k(k);
  const long M = static_cast<long>(std::ceil(t_max / h));
  const long J = static_cast<long>(std::ceil(y_max / h));
  const long R = M + J;
  const cplxl I(0.0L, 1.0L);
  // Lp[n] = log Gamma(alpha + i(nh + tau/2)), Lm[n] = log Gamma(alpha + i(nh - tau/2))
  auto table = [&](long double alpha, long range, std::vector<cplxl>& lp, std::vector<cplxl>& lm) {
    lp.resize(static_cast<std::size_t>(2 * range + 1));
    lm.resize(static_cast<std::size_t>(2 * range + 1));
    for (long n = -range; n <= range; ++n) {
      lp[static_cast<std::size_t>(n + range)] = log_gamma(cplxl(alpha, n * h + tau / 2.0L));
      lm[static_cast<std::size_t>(n + range)] = log_gamma(cplxl(alpha, n * h - tau / 2.0L));
    }
  };
  std::vector<cplxl> lp, lm;
  table(base + plan.sigma, R, lp, lm);
  auto at = [&](const std::vector<cplxl>& v, long n, long range) { return v[static_cast<std::size_t>(n + range)]; };

  Accumulator<long double> outer;
  long double l1 = 0.0L;
  for (long m = 0; m <= M; ++m) {
    const long double t = m * h;
    // inner integral over y: conjugate symmetry gives 2 Re over y >= 0
    Accumulator<long double> inner;
    for (long j = 0; j <= J; ++j) {
      const cplxl v(plan.sigma, j * h);
      const cplxl lg = at(lp, j + m, R) + at(lm, j + m, R) + at(lp, j - m, R) + at(lm, j - m, R);
      const cplxl logp = -logc + 4.0L * log_2 - (2.0L * k + 4.0L * v) * log_2pi + lg;
      const cplxl term = std::exp(v * v + logp - v * logx) / v;
      inner.add((j == 0 ? 1.0L : 2.0L) * term.real());
      l1 += (j == 0 ? 1.0L : 2.0L) * (m == 0 ? 1.0L : 2.0L) * std::abs(term);
    }
    long double v1 = inner.value() * h / (2.0L * static_cast<long double>(pi));
    outer.add((m == 0 ? 1.0L : 2.0L) * std::cos(t * logratio) * v1);
  }
  long double total = outer.value() * h;
  l1 *= h * h / (2.0L * static_cast<long double>(pi));
  if (plan.residue) {
    std::vector<cplxl> rp, rm;
    table(base, M, rp, rm);
    Accumulator<long double> res;
    for (long m = 0; m <= M; ++m) {
      const long double t = m * h;
      const cplxl lg = at(rp, m, M) + at(rm, m, M) + at(rp, -m, M) + at(rm, -m, M);
      const long double logp = (-logc + 4.0L * log_2 - 2.0L * k * log_2pi + lg).real();
      res.add((m == 0 ? 1.0L : 2.0L) * std::cos(t * logratio) * std::exp(logp));
    }
    total += res.value() * h;
  }
  return {total, l1};
}

}  // namespace detail

// V(x1, x2, tau, k) for real tau.
inline CutoffResult cutoff_v(double x1, double x2, double tau, int k, const QuadSpec& spec = {}) {
  detail::check_weight(k);
  require(x1 > 0.0 && x2 > 0.0, "cutoff_v: x1, x2 must be positive");
  const long double logx = std::log(static_cast<long double>(x1)) + std::log(static_cast<long double>(x2));
  const long double logratio = std::log(static_cast<long double>(x2)) - std::log(static_cast<long double>(x1));
  const auto plan = detail::choose_contour(k, logx, tau);
  const long double lntol = std::log(1.0L / spec.tol);
  CutoffResult r;
  r.sigma = static_cast<double>(plan.sigma);
  r.t_max = std::sqrt(static_cast<double>(k) * static_cast<double>(lntol) * 2.0);
  // |Gamma(a + ib)| <= Gamma(a): the y-decay is governed by e^{sigma^2 - y^2}
  r.v_max = std::sqrt(static_cast<double>(plan.sigma * plan.sigma + lntol)) + 2.0;
  // t-tail of the Gaussian model relative to its total mass
  r.tail_estimate = std::erfc(2.0 * r.t_max / std::sqrt(static_cast<double>(k)));
  auto eval = [&](long double h) {
    return detail::cutoff_v_fixed(k, logx, logratio, tau, plan, h, r.t_max, r.v_max);
  };
  if (spec.h > 0.0) {
    const auto f = eval(spec.h);
    r.h = spec.h;
    r.value = static_cast<double>(f.value);
    r.scale = static_cast<double>(f.l1);
    return r;
  }
  // below ~1e-14 of the contour scale the value is pure cancellation noise
  auto close = [&](const detail::FixedStep& a, const detail::FixedStep& b) {
    return std::fabs(a.value - b.value) <= spec.tol * std::fabs(a.value) + 1e-14L * a.l1;
  };
  long double h = std::min(0.5L, std::fabs(plan.sigma) / 2.0L);
  auto prev = eval(h);
  for (int i = 0; i < spec.max_halvings; ++i) {
    h /= 2.0L;
    const auto cur = eval(h);
    r.quad_error = static_cast<double>(std::fabs(cur.value - prev.value));
    r.value = static_cast<double>(cur.value);
    r.scale = static_cast<double>(cur.l1);
    r.h = static_cast<double>(h);
    if (close(cur, prev)) return r;
    prev = cur;
  }
  throw tolerance_error("cutoff_v: trapezoid refinement did not converge");
}

// ---- kappa(0) ----

struct Kappa0Result {
  double value = 0.0;
  double h_tau = 0.0, tau_max = 0.0;
  double h_inner = 0.0;
};

// kappa(0) = (1/4 pi) int V(x, x, tau, k) tau tanh(pi tau) d tau.
inline Kappa0Result kappa0(double x, int k, bool half_range = true, double tol = 1e-10, unsigned threads = 1) {
  detail::check_weight(k);
  require(x > 0.0, "kappa0: x must be positive");
  Kappa0Result r;
  r.tau_max = std::sqrt(static_cast<double>(k) * std::log(1.0 / tol) * 2.0);
  r.h_tau = 0.1;  // poles of tanh(pi tau) at +-i/2 bound the trapezoid error by e^{-pi/h}
  QuadSpec spec;
  spec.tol = tol;
  // fix the inner step from the widest integrand (tau = 0)
  r.h_inner = cutoff_v(x, x, 0.0, k, spec).h;
  spec.h = r.h_inner;
  const long n = static_cast<long>(std::ceil(r.tau_max / r.h_tau));
  const long lo = half_range ? 1 : -n;
  auto vals = ordered_map<double>(static_cast<std::size_t>(n - lo + 1), threads, [&](std::size_t i) {
    const long j = lo + static_cast<long>(i);
    if (j == 0) return 0.0;
    const double tau = j * r.h_tau;
    return cutoff_v(x, x, tau, k, spec).value * tau * std::tanh(pi * tau);
  });
  Accumulator<double> acc;
  for (double v : vals) acc.add(v);
  const double integral = (half_range ? 2.0 : 1.0) * acc.value() * r.h_tau;
  r.value = integral / (4.0 * pi);
  return r;
}

// ---- spectral moment ----

struct MomentResult {
  double value = 0.0;
  double normalized = 0.0;  // value * pi^2 / k^3
  double h_t = 0.0, h_tau = 0.0, t_max = 0.0;
};

// int int c_k^-1 G(tau,k,1/2+it) G(tau,k,1/2-it) dt tau tanh(pi tau) d tau.
// With h_tau = 2 h_t every Gamma argument (k-1/2)/2 + i(+-t +- tau/2) lies
// on one grid, so a single log Gamma table serves the whole double sum.
inline MomentResult spectral_moment(int k, double h_t = 0.05, double tol = 1e-10) {
  detail::check_weight(k);
  require(k >= 16, "spectral_moment: k must be >= 16");
  MomentResult r;
  r.h_t = h_t;
  r.h_tau = 2.0 * h_t;
  r.t_max = std::sqrt(static_cast<double>(k) * std::log(1.0 / tol) * 2.0);
  const long M = static_cast<long>(std::ceil(r.t_max / h_t));
  const long Jt = M / 2;  // tau = 2 j h_t up to t_max
  const long R = M + Jt;
  const long double base = (k - 0.5L) / 2.0L;
  const long double logc = log_c_k(k);
  // real part of log Gamma(base + i n h); |Gamma|^2 pairs make the product real
  std::vector<long double> L(static_cast<std::size_t>(R + 1));
  for (long n = 0; n <= R; ++n) L[static_cast<std::size_t>(n)] = log_gamma(cplxl(base, n * static_cast<long double>(h_t))).real();
  auto lg = [&](long n) { return L[static_cast<std::size_t>(n < 0 ? -n : n)]; };
  const long double c0 = -logc + 4.0L * detail::log_2 - 2.0L * k * detail::log_2pi;
  Accumulator<long double> outer;
  for (long j = 1; j <= Jt; ++j) {
    const long double tau = 2.0L * j * h_t;
    Accumulator<long double> inner;
    for (long m = 0; m <= M; ++m) {
      const long double logp = c0 + 2.0L * lg(m + j) + 2.0L * lg(m - j);
      inner.add((m == 0 ? 1.0L : 2.0L) * std::exp(logp));
    }
    const long double in = inner.value() * h_t;
    outer.add(2.0L * in * tau * std::tanh(static_cast<long double>(pi) * tau));
  }
  r.value = static_cast<double>(outer.value() * r.h_tau);
  r.normalized = r.value * pi * pi / std::pow(static_cast<double>(k), 3.0);
  return r;
}

// Inner t-integral of the moment at a fixed tau.
inline double moment_inner(int k, double tau, double h_t = 0.05, double tol = 1e-10) {
  detail::check_weight(k);
  const double t_max = std::sqrt(static_cast<double>(k) * std::log(1.0 / tol) * 2.0);
  const long M = static_cast<long>(std::ceil(t_max / h_t));
  Accumulator<long double> acc;
  for (long m = 0; m <= M; ++m) {
    const long double lp = log_kernel_product(k, m * static_cast<long double>(h_t), tau, 0.0L).real();
    acc.add((m == 0 ? 1.0L : 2.0L) * std::exp(lp));
  }
  return static_cast<double>(acc.value()) * h_t;
}

// Sum over the four sign choices of digamma((k-1/2)/2 +- it +- i tau/2)
// minus 4 log(2 pi) + 4 log k; tends to -4 log(4 pi).
inline double c0_limit(double k, double t, double tau) {
  const long double base = (static_cast<long double>(k) - 0.5L) / 2.0L;
  long double s = 0.0L;
  for (int a : {1, -1})
    for (int b : {1, -1}) s += digamma(cplxl(base, a * t + b * tau / 2.0)).real();
  return static_cast<double>(s - 4.0L * detail::log_2pi - 4.0L * std::log(static_cast<long double>(k)));
}

}  // namespace rnorm
