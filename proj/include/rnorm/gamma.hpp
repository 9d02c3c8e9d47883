#pragma once

// log Gamma and digamma for complex arguments with Re z > 0, in long double.
// Upward recurrence to |z| >= 20, then the Stirling series.

#include <cmath>
#include <complex>

#include "rnorm/core.hpp"

namespace rnorm {

using cplxl = std::complex<long double>;

namespace detail {

// B_{2m} / (2m (2m - 1)), m = 1..12
inline constexpr long double stirling_coef[] = {
    1.0L / 12.0L,          -1.0L / 360.0L,          1.0L / 1260.0L,     -1.0L / 1680.0L,
    1.0L / 1188.0L,        -691.0L / 360360.0L,     1.0L / 156.0L,      -3617.0L / 122400.0L,
    43867.0L / 244188.0L,  -174611.0L / 125400.0L,  77683.0L / 5796.0L, -236364091.0L / 1506960.0L};

// B_{2m} / (2m), m = 1..12
inline constexpr long double digamma_coef[] = {
    1.0L / 12.0L,          -1.0L / 120.0L,        1.0L / 252.0L,       -1.0L / 240.0L,
    1.0L / 132.0L,         -691.0L / 32760.0L,    1.0L / 12.0L,        -3617.0L / 8160.0L,
    43867.0L / 14364.0L,   -174611.0L / 6600.0L,  77683.0L / 276.0L,   -236364091.0L / 65520.0L};

inline constexpr long double half_log_2pi = 0.918938533204672741780329736405617639861L;

}  // namespace detail

// log Gamma(z) up to an additive multiple of 2 pi i.
inline cplxl log_gamma(cplxl z) {
  require(z.real() > 0.0L, "log_gamma: Re z must be positive on the evaluation path");
  cplxl shift = 0.0L;
  cplxl prod = 1.0L;
  int count = 0;
  while (std::abs(z) < 20.0L) {
    prod *= z;
    z += 1.0L;
    if (++count == 8) {
      shift += std::log(prod);
      prod = 1.0L;
      count = 0;
    }
  }
  shift += std::log(prod);
  const cplxl zi = 1.0L / z, zi2 = zi * zi;
  cplxl series = 0.0L, p = zi;
  for (long double c : detail::stirling_coef) {
    series += c * p;
    p *= zi2;
  }
  return (z - 0.5L) * std::log(z) - z + detail::half_log_2pi + series - shift;
}

inline long double log_gamma(long double x) { return log_gamma(cplxl(x, 0.0L)).real(); }

inline cplxl digamma(cplxl z) {
  require(z.real() > 0.0L, "digamma: Re z must be positive on the evaluation path");
  cplxl shift = 0.0L;
  while (std::abs(z) < 20.0L) {
    shift += 1.0L / z;
    z += 1.0L;
  }
  const cplxl zi = 1.0L / z, zi2 = zi * zi;
  cplxl series = 0.0L, p = zi2;
  for (long double c : detail::digamma_coef) {
    series += c * p;
    p *= zi2;
  }
  return std::log(z) - 0.5L * zi - series - shift;
}

inline long double digamma(long double x) { return digamma(cplxl(x, 0.0L)).real(); }

}  // namespace rnorm
