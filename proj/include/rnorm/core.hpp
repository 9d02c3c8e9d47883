#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace rnorm {

using i64 = std::int64_t;
using cplx = std::complex<double>;

// Violated operation contract (bad input for a well-formed call).
struct precondition_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A numeric routine could not meet its own tolerance or tail budget.
struct tolerance_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw precondition_error(what);
}

inline constexpr double pi = 3.14159265358979323846264338327950288;

// Neumaier compensated accumulator.
template <class T>
class Accumulator {
 public:
  void add(T x) {
    T t = sum_ + x;
    comp_ += abs_ge(sum_, x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  static bool abs_ge(double a, double b) { return std::abs(a) >= std::abs(b); }
  static bool abs_ge(long double a, long double b) { return std::fabs(a) >= std::fabs(b); }
  T sum_{}, comp_{};
};

template <>
class Accumulator<cplx> {
 public:
  void add(cplx x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

 private:
  Accumulator<double> re_, im_;
};

// Evaluate fn(i) for i in [0, n) on up to `threads` workers; results land in
// index order so any later reduction is independent of the thread count.
template <class R, class F>
std::vector<R> ordered_map(std::size_t n, unsigned threads, F&& fn) {
  std::vector<R> out(n);
  unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(nt);
  for (unsigned w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += nt) out[i] = fn(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

inline i64 gcd(i64 a, i64 b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) {
    i64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Returns g = gcd(a, b) and x, y with a*x + b*y = g.
inline i64 ext_gcd(i64 a, i64 b, i64& x, i64& y) {
  i64 x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    i64 q = a / b;
    i64 t = a - q * b;
    a = b;
    b = t;
    t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) {
    a = -a;
    x0 = -x0;
    y0 = -y0;
  }
  x = x0;
  y = y0;
  return a;
}

inline i64 floor_div(i64 a, i64 b) {
  i64 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline i64 mod_pos(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 isqrt(i64 n) {
  if (n <= 0) return 0;
  auto r = static_cast<i64>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace rnorm
