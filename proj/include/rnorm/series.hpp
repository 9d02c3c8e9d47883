#pragma once

// Class-number Dirichlet series L(v) = sum_D h(D) D^{-3/2-2v} with its
// continuation to Re v > -1/4, the exceptional series L~(v), the constants
// C0, C1, D and the assembled constant C, and the even Euler-Maclaurin sum.
//
// D runs over quarter-integers N/4; tables are indexed by N = 4D.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <vector>

#include "rnorm/core.hpp"
#include "rnorm/kernel.hpp"
#include "rnorm/qforms.hpp"
#include "rnorm/quadrature.hpp"
#include "rnorm/specfun.hpp"

namespace rnorm {

// h[N] and the running count S[N] = sum_{M <= N} h[M].
struct ClassTable {
  i64 n_max = 0;
  std::vector<std::int32_t> h;
  std::vector<i64> S;
};

// Shared table covering at least n_max; the largest one built so far is kept.
inline std::shared_ptr<const ClassTable> class_table(i64 n_max) {
  static std::mutex mu;
  static std::shared_ptr<const ClassTable> cached;
  std::lock_guard<std::mutex> lock(mu);
  if (cached && cached->n_max >= n_max) return cached;
  auto t = std::make_shared<ClassTable>();
  t->n_max = n_max;
  t->h = class_number_table(n_max);
  t->S.resize(t->h.size());
  i64 run = 0;
  for (std::size_t n = 0; n < t->h.size(); ++n) t->S[n] = run += t->h[n];
  cached = t;
  return cached;
}

namespace detail {

// e^z - 1 without cancellation for small |z|.
inline cplx expm1c(cplx z) {
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// (1 - e^{-z}) / z, equal to 1 at z = 0.
inline cplx one_minus_exp_over(cplx z) {
  if (std::abs(z) < 1e-300) return 1.0;
  return -expm1c(-z) / z;
}

inline constexpr double four_pi_ninths = 4.0 * pi / 9.0;

inline i64 quarter_index(double X) {
  require(X >= 0.75, "series: X must be >= 3/4");
  return static_cast<i64>(std::floor(4.0 * X + 1e-9));
}

}  // namespace detail

// sum_{D <= X} h(D) D^{-3/2-2v}.
inline cplx l_partial(cplx v, double X) {
  const i64 n_hi = detail::quarter_index(X);
  const auto tab = class_table(std::max<i64>(n_hi, 3));
  const cplx s = 1.5 + 2.0 * v;
  Accumulator<cplx> acc;
  for (i64 n = 3; n <= n_hi; ++n) {
    const auto h = tab->h[static_cast<std::size_t>(n)];
    if (h != 0) acc.add(static_cast<double>(h) * std::exp(-s * std::log(0.25 * static_cast<double>(n))));
  }
  return acc.value();
}

// Tail sum_{D > X} from S(t) ~ (4 pi/9) t^{3/2} - t, by parts from the observed S(X).
inline cplx l_partial_tail(cplx v, double X) {
  require(v.real() > 0.0, "l_partial_tail: Re v must be > 0");
  const i64 n_hi = detail::quarter_index(X);
  const auto tab = class_table(std::max<i64>(n_hi, 3));
  const double Xq = 0.25 * static_cast<double>(n_hi);
  const cplx s = 1.5 + 2.0 * v;
  const double lx = std::log(Xq);
  const double SX = static_cast<double>(tab->S[static_cast<std::size_t>(n_hi)]);
  return -SX * std::exp(-s * lx) + s * (detail::four_pi_ninths * std::exp((1.5 - s) * lx) / (2.0 * v) -
                                        std::exp((1.0 - s) * lx) / (s - 1.0));
}

struct Continuation {
  cplx regular;     // L(v) - pi/(3v)
  cplx step_part;   // s * int_1^X S(t) t^{-s-1} dt, exact
  cplx tail_model;  // contribution of S beyond X from the two-term model
};

// L(v) - pi/(3v) for Re v > -1/4; regular at v = 0.
inline Continuation l_continued_parts(cplx v, i64 X_cut) {
  require(v.real() > -0.25, "l_continued: Re v must be > -1/4");
  require(X_cut >= 4, "l_continued: X_cut must be >= 4");
  const i64 n_hi = 4 * X_cut;
  const auto tab = class_table(n_hi);
  const cplx s = 1.5 + 2.0 * v;
  const double X = static_cast<double>(X_cut), lx = std::log(X);
  // s int_1^X S(t) t^{-s-1} dt over the steps [N/4, (N+1)/4)
  Accumulator<cplx> step;
  for (i64 n = 4; n < n_hi; ++n) {
    const double d = 0.25 * static_cast<double>(n);
    const cplx p = std::exp(-s * std::log(d));
    // p(N) - p(N+1) = -p(N) expm1(-s log1p(1/N))
    const cplx diff = -p * detail::expm1c(-s * std::log1p(1.0 / static_cast<double>(n)));
    step.add(static_cast<double>(tab->S[static_cast<std::size_t>(n)]) * diff);
  }
  Continuation c;
  c.step_part = step.value();
  // s (4 pi/9) int_1^X t^{-1-2v} dt = s (4 pi/9) log X (1 - X^{-2v}) / (2v log X)
  const cplx main = s * detail::four_pi_ninths * lx * detail::one_minus_exp_over(2.0 * v * lx);
  c.tail_model = -s * std::exp(-(0.5 + 2.0 * v) * lx) / (0.5 + 2.0 * v);
  // D = 3/4 lies below the lower limit 1
  const cplx boundary = std::exp(-s * std::log(0.75)) - 1.0;
  c.regular = boundary + c.step_part - main + c.tail_model + detail::four_pi_ninths;
  return c;
}

inline cplx l_continued_regular(cplx v, i64 X_cut) { return l_continued_parts(v, X_cut).regular; }

inline cplx l_continued(cplx v, i64 X_cut) {
  require(std::abs(v) > 0.0, "l_continued: pole at v = 0");
  return l_continued_regular(v, X_cut) + pi / (3.0 * v);
}

struct C1Result {
  double value = 0.0;        // analytic separation of the pole
  double richardson = 0.0;   // even part over v in {1e-2, 1e-3}, extrapolated in v^2
  double one_sided = 0.0;    // plain two-point extrapolation in v
  i64 X_cut = 0;
};

inline C1Result c1_constant(i64 X_cut) {
  require(X_cut >= 10000, "c1_constant: X_cut must be >= 10^4");
  C1Result r;
  r.X_cut = X_cut;
  r.value = l_continued_regular(0.0, X_cut).real();
  const double v1 = 1e-2, v2 = 1e-3;
  auto f = [&](double v) { return (l_continued(v, X_cut) - pi / (3.0 * v)).real(); };
  const double f1 = f(v1), f2 = f(v2);
  r.one_sided = (f2 * v1 - f1 * v2) / (v1 - v2);
  // (f(v) + f(-v))/2 = C1 + b v^2 + O(v^4)
  const double e1 = 0.5 * (f1 + f(-v1)), e2 = 0.5 * (f2 + f(-v2));
  r.richardson = (e2 * v1 * v1 - e1 * v2 * v2) / (v1 * v1 - v2 * v2);
  return r;
}

// ---- L~ ----

struct LTildeResult {
  cplx value;
  double tail_bound = 0.0;  // majorant of |sum over det > X_cut|
  i64 X_cut = 0;
  i64 terms = 0;
};

// Reduced forms with a nontrivial automorphism beyond +-I: b2 = 0, b2 = a, or
// a = c. Calls f(form) once for each such form with det4 <= n_max.
template <class F>
void for_each_exceptional(i64 n_max, F&& f) {
  for (i64 a = 1; 3 * a * a <= n_max; ++a) {
    for (i64 c = a; 4 * a * c <= n_max; ++c) f(QuadForm{a, 0, c});
    for (i64 c = a; 4 * a * c - a * a <= n_max; ++c) f(QuadForm{a, a, c});
    for (i64 b2 = a - 1; b2 >= 1 && 4 * a * a - b2 * b2 <= n_max; --b2) f(QuadForm{a, b2, a});
  }
}

// Majorant of sum over exceptional forms with det > X of det^{-sigma}, sigma > 1.
inline double l_tilde_tail_bound(double sigma, i64 X_cut) {
  require(sigma > 1.0, "l_tilde: tail bound needs Re(3/2 + 2v) > 1");
  const double X = static_cast<double>(X_cut);
  // sum_{c >= M} (c - shift)^{-sigma} <= f(M) + int_M^inf f
  auto zeta_tail = [&](double m) { return std::pow(m, -sigma) + std::pow(m, 1.0 - sigma) / (sigma - 1.0); };
  Accumulator<double> acc;
  const i64 a_loop = static_cast<i64>(std::ceil(std::sqrt(4.0 * X / 3.0))) + 1;
  for (i64 a = 1; a <= a_loop; ++a) {
    const double ad = static_cast<double>(a);
    // b2 = 0: det = a c
    const double m0 = std::max(ad, std::floor(X / ad) + 1.0);
    acc.add(std::pow(ad, -sigma) * zeta_tail(m0));
    // b2 = a: det = a (c - a/4)
    const double m1 = std::max(ad, std::floor(X / ad + ad / 4.0) + 1.0);
    acc.add(std::pow(ad, -sigma) * zeta_tail(m1 - ad / 4.0));
    // a = c, 0 < b2 < a: det >= 3a^2/4, and det <= a^2 <= X for a^2 <= X
    if (ad * ad > X) acc.add((ad - 1.0) * std::pow(0.75 * ad * ad, -sigma));
  }
  // a > a_loop: every form of the three families has det > X
  const double A = static_cast<double>(a_loop);
  const double s2 = 2.0 * sigma;
  acc.add(std::pow(A, 1.0 - s2) / (s2 - 1.0) + std::pow(A, 2.0 - s2) / ((sigma - 1.0) * (s2 - 2.0)));
  acc.add(std::pow(4.0 / 3.0, sigma) * std::pow(A, 1.0 - s2) / (s2 - 1.0) +
          std::pow(4.0 / 3.0, sigma - 1.0) * std::pow(A, 2.0 - s2) / ((sigma - 1.0) * (s2 - 2.0)));
  acc.add(std::pow(4.0 / 3.0, sigma) * std::pow(A, 2.0 - s2) / (s2 - 2.0));
  return acc.value();
}

// sum over reduced T with #Aut(T) != 2 eps(T) of det(T)^{-3/2-2v}, det <= X_cut.
inline LTildeResult l_tilde(cplx v, i64 X_cut) {
  require(v.real() > -0.25, "l_tilde: Re v must be > -1/4");
  require(X_cut >= 1, "l_tilde: X_cut must be >= 1");
  const cplx s = 1.5 + 2.0 * v;
  LTildeResult r;
  r.X_cut = X_cut;
  Accumulator<cplx> acc;
  for_each_exceptional(4 * X_cut, [&](const QuadForm& q) {
    const auto p = automorphisms(q);
    if (p.gl2_count == 2 * p.epsilon) return;
    acc.add(std::exp(-s * std::log(0.25 * static_cast<double>(det4(q)))));
    ++r.terms;
  });
  r.value = acc.value();
  r.tail_bound = l_tilde_tail_bound(s.real(), X_cut);
  return r;
}

// sum over all reduced T with det4 <= n_max of (#Aut/eps)^2/2 det^{-s}, and
// the same truncation of 2 L + 6 L~.
struct SplitCheck {
  cplx weighted, split;
};

inline SplitCheck split_identity(cplx v, i64 n_max) {
  const cplx s = 1.5 + 2.0 * v;
  Accumulator<cplx> w, all, exc;
  for_each_reduced(n_max, [&](const QuadForm& q) {
    const auto p = automorphisms(q);
    const cplx term = std::exp(-s * std::log(0.25 * static_cast<double>(det4(q))));
    const double r = static_cast<double>(p.gl2_count) / p.epsilon;
    w.add(0.5 * r * r * term);
    all.add(term);
    if (p.gl2_count != 2 * p.epsilon) exc.add(term);
  });
  return {w.value(), 2.0 * all.value() + 6.0 * exc.value()};
}

// ---- constants ----

inline double c0_constant() { return -4.0 * std::log(4.0 * pi); }

struct ConstantBundle {
  double C0 = 0.0, C1 = 0.0, Ltilde0 = 0.0, D_const = 0.0, C_final = 0.0;
  double omega = 0.0, omega_prime = 0.0;
  // provenance
  i64 X_cut = 0;
  double C0_digamma = 0.0;
  double C1_richardson = 0.0;
  double Ltilde0_tail_bound = 0.0;
};

inline double d_constant(double C0, double C1, double Ltilde0) {
  return (2.0 * pi / 3.0) * C0 + 2.0 * C1 + 6.0 * Ltilde0;
}

inline double c_final(double omega, double omega_prime, double D) {
  return 4.0 * omega_prime / omega + (3.0 / (2.0 * pi)) * D;
}

inline ConstantBundle constants_bundle(const WeightWindow& win, i64 X_cut) {
  require(X_cut >= 100000, "constants_bundle: X_cut must be >= 10^5");
  ConstantBundle b;
  b.X_cut = X_cut;
  b.C0 = c0_constant();
  b.C0_digamma = c0_limit(1e6, 0.0, 0.0);
  if (std::abs(b.C0 - b.C0_digamma) > 1e-4) throw tolerance_error("constants_bundle: C0 limit disagrees");
  const auto c1 = c1_constant(X_cut);
  b.C1 = c1.value;
  b.C1_richardson = c1.richardson;
  const auto lt = l_tilde(0.0, X_cut);
  b.Ltilde0 = lt.value.real();
  b.Ltilde0_tail_bound = lt.tail_bound;
  b.omega = win.omega;
  b.omega_prime = win.omega_prime;
  b.D_const = d_constant(b.C0, b.C1, b.Ltilde0);
  b.C_final = c_final(b.omega, b.omega_prime, b.D_const);
  return b;
}

// ---- Euler-Maclaurin over even integers ----

struct EvenSum {
  double sum = 0.0, half_integral = 0.0, bound = 0.0;
  bool holds = false;
};

inline EvenSum euler_maclaurin_even(const std::function<double(double)>& f, i64 a, i64 b) {
  require(a <= b, "euler_maclaurin_even: a must be <= b");
  EvenSum r;
  Accumulator<double> sum;
  for (i64 n = a + mod_pos(a, 2); n <= b; n += 2) sum.add(f(static_cast<double>(n)));
  r.sum = sum.value();
  const double lo = static_cast<double>(a), hi = static_cast<double>(b);
  if (b > a) {
    const int panels = static_cast<int>(std::min<i64>(std::max<i64>(8, b - a), 1 << 14));
    r.half_integral = 0.5 * quad::gl_composite(f, lo, hi, panels);
    // int |f'| as the total variation on a fine grid
    const i64 steps = std::min<i64>((b - a) * 64, 1 << 22);
    Accumulator<double> tv;
    double prev = f(lo);
    for (i64 i = 1; i <= steps; ++i) {
      const double cur = f(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps));
      tv.add(std::abs(cur - prev));
      prev = cur;
    }
    r.bound = tv.value() + std::abs(f(lo)) + std::abs(f(hi));
  } else {
    r.bound = 2.0 * std::abs(f(lo));
  }
  r.holds = std::abs(r.sum - r.half_integral) <= r.bound;
  return r;
}

struct Prediction {
  double K = 0.0;
  double formula = 0.0;   // 4 log K + C
  double k_sum = 0.0;     // (3/(pi omega K^4)) sum_k w(k/K) k^3 ((8 pi/3) log k + D)
  EvenSum em;             // Euler-Maclaurin data for w(k/K) k^3
};

inline Prediction diag_main_prediction(const WeightWindow& win, const ConstantBundle& b, double K) {
  require(K >= 8.0, "diag_main_prediction: K must be >= 8");
  Prediction p;
  p.K = K;
  p.formula = 4.0 * std::log(K) + b.C_final;
  const i64 lo = static_cast<i64>(std::floor(K)), hi = static_cast<i64>(std::ceil(2.0 * K));
  auto g = [&](double k) { return win(k / K) * k * k * k * ((8.0 * pi / 3.0) * std::log(k) + b.D_const); };
  const auto em = euler_maclaurin_even(g, lo, hi);
  p.k_sum = 3.0 / (pi * b.omega * std::pow(K, 4.0)) * em.sum;
  p.em = euler_maclaurin_even([&](double k) { return win(k / K) * k * k * k; }, lo, hi);
  return p;
}

}  // namespace rnorm
