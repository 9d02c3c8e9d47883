#pragma once

// Positive-definite integral binary quadratic forms (a, b2, c) standing for
// the half-integral matrix [[a, b2/2], [b2/2, c]]. N = 4ac - b2^2 = 4 det.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "rnorm/core.hpp"

namespace rnorm {

struct QuadForm {
  i64 a = 1, b2 = 0, c = 1;
  friend bool operator==(const QuadForm&, const QuadForm&) = default;
};

struct UnimodularMatrix {
  i64 e11 = 1, e12 = 0, e21 = 0, e22 = 1;
  i64 det() const { return e11 * e22 - e12 * e21; }
  static UnimodularMatrix identity() { return {1, 0, 0, 1}; }
  friend bool operator==(const UnimodularMatrix&, const UnimodularMatrix&) = default;
  friend auto operator<=>(const UnimodularMatrix& x, const UnimodularMatrix& y) {
    return std::tie(x.e11, x.e12, x.e21, x.e22) <=> std::tie(y.e11, y.e12, y.e21, y.e22);
  }
};

inline UnimodularMatrix operator*(const UnimodularMatrix& x, const UnimodularMatrix& y) {
  return {x.e11 * y.e11 + x.e12 * y.e21, x.e11 * y.e12 + x.e12 * y.e22,
          x.e21 * y.e11 + x.e22 * y.e21, x.e21 * y.e12 + x.e22 * y.e22};
}

inline UnimodularMatrix negate(const UnimodularMatrix& m) {
  return {-m.e11, -m.e12, -m.e21, -m.e22};
}

// Representative of {M, -M} whose first nonzero entry is positive.
inline UnimodularMatrix canonical_sign(const UnimodularMatrix& m) {
  for (i64 e : {m.e11, m.e12, m.e21, m.e22}) {
    if (e > 0) return m;
    if (e < 0) return negate(m);
  }
  return m;
}

inline i64 det4(const QuadForm& q) { return 4 * q.a * q.c - q.b2 * q.b2; }

inline bool is_positive_definite(const QuadForm& q) { return q.a >= 1 && q.c >= 1 && det4(q) > 0; }

inline bool is_weakly_reduced(const QuadForm& q) {
  i64 ab = q.b2 < 0 ? -q.b2 : q.b2;
  return ab <= q.a && q.a <= q.c;
}

inline bool is_reduced(const QuadForm& q) {
  if (!is_weakly_reduced(q)) return false;
  i64 ab = q.b2 < 0 ? -q.b2 : q.b2;
  if (ab == q.a || q.a == q.c) return q.b2 >= 0;
  return true;
}

// M^t Q M.
inline QuadForm transform(const QuadForm& q, const UnimodularMatrix& m) {
  const i64 a = q.a, b2 = q.b2, c = q.c;
  return {a * m.e11 * m.e11 + b2 * m.e11 * m.e21 + c * m.e21 * m.e21,
          2 * a * m.e11 * m.e12 + b2 * (m.e11 * m.e22 + m.e12 * m.e21) + 2 * c * m.e21 * m.e22,
          a * m.e12 * m.e12 + b2 * m.e12 * m.e22 + c * m.e22 * m.e22};
}

struct Reduction {
  QuadForm form;
  UnimodularMatrix m;
};

// Gauss reduction; the accumulated matrix satisfies transform(q, m) == form.
inline Reduction reduce(const QuadForm& q) {
  require(is_positive_definite(q), "reduce: form must be positive definite");
  const UnimodularMatrix S{0, -1, 1, 0};
  QuadForm r = q;
  UnimodularMatrix m = UnimodularMatrix::identity();
  auto apply = [&](const UnimodularMatrix& step) {
    r = transform(r, step);
    m = m * step;
  };
  for (;;) {
    i64 n = floor_div(r.a - r.b2, 2 * r.a);
    if (n != 0) apply({1, n, 0, 1});
    if (r.a > r.c) {
      apply(S);
      continue;
    }
    break;
  }
  if (r.a == r.c && r.b2 < 0) apply(S);
  return {r, m};
}

// Calls f(form) for every reduced form with det4 <= n_max, ordered by (N, a, b2).
template <class F>
void for_each_reduced(i64 n_max, F&& f) {
  require(n_max >= 3, "enumerate_reduced: N_max must be >= 3");
  std::vector<QuadForm> block;
  i64 n0 = 3;
  while (n0 <= n_max) {
    // keep roughly 2^20 forms per block
    double density = (pi / 12.0) * std::sqrt(static_cast<double>(n0)) + 1.0;
    i64 width = std::max<i64>(64, static_cast<i64>(1048576.0 / density));
    i64 n1 = std::min(n_max, n0 + width - 1);
    block.clear();
    const i64 a_max = isqrt(n1 / 3);
    for (i64 a = 1; a <= a_max; ++a) {
      for (i64 b2 = -a; b2 <= a; ++b2) {
        const i64 bb = b2 * b2;
        i64 c_lo = std::max(a, floor_div(n0 + bb + 4 * a - 1, 4 * a));
        i64 c_hi = floor_div(n1 + bb, 4 * a);
        for (i64 c = c_lo; c <= c_hi; ++c) {
          QuadForm q{a, b2, c};
          if (is_reduced(q)) block.push_back(q);
        }
      }
    }
    std::sort(block.begin(), block.end(), [](const QuadForm& x, const QuadForm& y) {
      return std::make_tuple(det4(x), x.a, x.b2) < std::make_tuple(det4(y), y.a, y.b2);
    });
    for (const auto& q : block) f(q);
    n0 = n1 + 1;
  }
}

inline std::vector<QuadForm> enumerate_reduced(i64 n_max) {
  std::vector<QuadForm> out;
  for_each_reduced(n_max, [&](const QuadForm& q) { out.push_back(q); });
  return out;
}

// h[N] = number of reduced forms with det4 = N, for 0 <= N <= n_max.
inline std::vector<std::int32_t> class_number_table(i64 n_max) {
  std::vector<std::int32_t> h(static_cast<std::size_t>(std::max<i64>(n_max, 0) + 1), 0);
  const i64 a_max = isqrt(n_max / 3);
  for (i64 a = 1; a <= a_max; ++a) {
    for (i64 b2 = -a + 1; b2 <= a; ++b2) {
      const i64 bb = b2 * b2;
      // b2 < 0 excludes the tie a == c
      i64 c = b2 < 0 ? a + 1 : a;
      for (i64 n = 4 * a * c - bb; n <= n_max; n += 4 * a) ++h[static_cast<std::size_t>(n)];
    }
  }
  return h;
}

inline i64 class_number(i64 n) {
  require(n >= 1, "class_number: N must be >= 1");
  if (n % 4 == 1 || n % 4 == 2) return 0;
  i64 count = 0;
  const i64 a_max = isqrt(n / 3);
  for (i64 a = 1; a <= a_max; ++a)
    for (i64 b2 = -a + 1; b2 <= a; ++b2) {
      i64 num = n + b2 * b2;
      if (num % (4 * a) != 0) continue;
      i64 c = num / (4 * a);
      if (c < a || (b2 < 0 && c == a)) continue;
      ++count;
    }
  return count;
}

// Number of reduced forms with det4 <= n_limit, counted in O(n_limit).
inline i64 class_count_upto(i64 n_limit) {
  i64 total = 0;
  const i64 a_max = isqrt(n_limit / 3);
  for (i64 a = 1; a <= a_max; ++a)
    for (i64 b2 = -a + 1; b2 <= a; ++b2) {
      i64 c_lo = b2 < 0 ? a + 1 : a;
      i64 c_hi = floor_div(n_limit + b2 * b2, 4 * a);
      if (c_hi >= c_lo) total += c_hi - c_lo + 1;
    }
  return total;
}

// Sum of class numbers over D = N/4 <= num/den.
inline i64 class_sum(i64 num, i64 den = 1) {
  require(den >= 1 && 4 * num >= 3 * den, "class_sum: X must be >= 3/4");
  return class_count_upto(floor_div(4 * num, den));
}

// ---- automorphisms ----

enum class AutCase {
  generic,
  diagonal,         // b2 = 0, a < c
  diagonal_square,  // b2 = 0, a = c
  equal_ends,       // a = c, 0 < |b2| < a
  edge_positive,    // b2 = a < c
  edge_negative,    // b2 = -a, a < c
  hexagonal,        // a = b2 = c
  hexagonal_negative  // a = -b2 = c
};

inline std::string_view to_string(AutCase c) {
  switch (c) {
    case AutCase::generic: return "generic";
    case AutCase::diagonal: return "diagonal";
    case AutCase::diagonal_square: return "diagonal_square";
    case AutCase::equal_ends: return "equal_ends";
    case AutCase::edge_positive: return "edge_positive";
    case AutCase::edge_negative: return "edge_negative";
    case AutCase::hexagonal: return "hexagonal";
    case AutCase::hexagonal_negative: return "hexagonal_negative";
  }
  return "?";
}

struct AutProfile {
  int gl2_count = 2;
  int sl2_count = 2;
  int epsilon = 1;
  AutCase case_tag = AutCase::generic;
  std::vector<UnimodularMatrix> matrices;  // one per +-pair, sorted
};

inline void sort_matrices(std::vector<UnimodularMatrix>& ms) {
  for (auto& m : ms) m = canonical_sign(m);
  std::sort(ms.begin(), ms.end());
}

// Table lookup. Accepts weakly reduced input so the b2 = -a rows are reachable.
inline AutProfile automorphisms(const QuadForm& q) {
  require(is_positive_definite(q) && is_weakly_reduced(q),
          "automorphisms: form must be (weakly) reduced");
  const i64 a = q.a, b2 = q.b2, c = q.c;
  AutProfile p;
  const UnimodularMatrix I{1, 0, 0, 1}, swap{0, 1, 1, 0};
  if (b2 == 0 && a == c) {
    p.case_tag = AutCase::diagonal_square;
    p.sl2_count = 4;
    p.matrices = {I, {1, 0, 0, -1}, {0, 1, -1, 0}, swap};
  } else if (b2 == 0) {
    p.case_tag = AutCase::diagonal;
    p.sl2_count = 2;
    p.matrices = {I, {1, 0, 0, -1}};
  } else if (b2 == a && a == c) {
    p.case_tag = AutCase::hexagonal;
    p.sl2_count = 6;
    p.matrices = {I, swap, {1, 1, 0, -1}, {0, 1, -1, -1}, {1, 0, -1, -1}, {1, 1, -1, 0}};
  } else if (b2 == -a && a == c) {
    p.case_tag = AutCase::hexagonal_negative;
    p.sl2_count = 6;
    p.matrices = {I, swap, {1, -1, 0, -1}, {0, 1, -1, 1}, {1, 0, 1, -1}, {1, -1, 1, 0}};
  } else if (a == c) {
    p.case_tag = AutCase::equal_ends;
    p.sl2_count = 2;
    p.matrices = {I, swap};
  } else if (b2 == a) {
    p.case_tag = AutCase::edge_positive;
    p.sl2_count = 2;
    p.matrices = {I, {1, 1, 0, -1}};
  } else if (b2 == -a) {
    p.case_tag = AutCase::edge_negative;
    p.sl2_count = 2;
    p.matrices = {I, {1, -1, 0, -1}};
  } else {
    p.case_tag = AutCase::generic;
    p.sl2_count = 2;
    p.matrices = {I};
  }
  p.gl2_count = p.case_tag == AutCase::generic ? p.sl2_count : 2 * p.sl2_count;
  p.epsilon = p.sl2_count / 2;
  sort_matrices(p.matrices);
  return p;
}

// All det +-1 matrices with entries in [-bound, bound], one per +-pair.
inline std::vector<UnimodularMatrix> unimodular_box(i64 bound) {
  std::vector<UnimodularMatrix> out;
  for (i64 e11 = -bound; e11 <= bound; ++e11)
    for (i64 e12 = -bound; e12 <= bound; ++e12)
      for (i64 e21 = -bound; e21 <= bound; ++e21)
        for (i64 e22 = -bound; e22 <= bound; ++e22) {
          UnimodularMatrix m{e11, e12, e21, e22};
          i64 d = m.det();
          if ((d == 1 || d == -1) && canonical_sign(m) == m) out.push_back(m);
        }
  return out;
}

inline std::vector<UnimodularMatrix> automorphisms_bruteforce(const QuadForm& q,
                                                              const std::vector<UnimodularMatrix>& box) {
  std::vector<UnimodularMatrix> out;
  for (const auto& m : box)
    if (transform(q, m) == q) out.push_back(m);
  sort_matrices(out);
  return out;
}

inline std::vector<UnimodularMatrix> automorphisms_bruteforce(const QuadForm& q, i64 entry_bound) {
  require(is_positive_definite(q), "automorphisms_bruteforce: form must be positive definite");
  require(entry_bound >= 2, "automorphisms_bruteforce: entry bound must be >= 2");
  return automorphisms_bruteforce(q, unimodular_box(entry_bound));
}

}  // namespace rnorm
