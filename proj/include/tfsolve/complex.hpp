#pragma once

#include "tfsolve/precision.hpp"

#include <boost/math/constants/constants.hpp>

namespace tfsolve {

/// Complex number over Real. std::complex is unspecified for non-builtin
/// scalar types, so this carries only what the resummation code needs.
struct ComplexReal {
  Real re;
  Real im;

  ComplexReal() : re(0), im(0) {}
  ComplexReal(Real r) : re(std::move(r)), im(0) {}  // NOLINT(implicit)
  ComplexReal(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

  bool is_real() const { return im == 0; }

  friend ComplexReal operator+(const ComplexReal& a, const ComplexReal& b) { return {a.re + b.re, a.im + b.im}; }
  friend ComplexReal operator-(const ComplexReal& a, const ComplexReal& b) { return {a.re - b.re, a.im - b.im}; }
  friend ComplexReal operator-(const ComplexReal& a) { return {-a.re, -a.im}; }
  friend ComplexReal operator*(const ComplexReal& a, const ComplexReal& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexReal operator/(const ComplexReal& a, const ComplexReal& b) {
    Real den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
  }
  ComplexReal& operator+=(const ComplexReal& o) { return *this = *this + o; }
  ComplexReal& operator-=(const ComplexReal& o) { return *this = *this - o; }
  ComplexReal& operator*=(const ComplexReal& o) { return *this = *this * o; }
};

inline Real abs(const ComplexReal& z) { return sqrt(z.re * z.re + z.im * z.im); }
inline Real arg(const ComplexReal& z) { return atan2(z.im, z.re); }
inline ComplexReal conj(const ComplexReal& z) { return {z.re, -z.im}; }

/// Principal square root (branch cut on the negative real axis, Re >= 0).
inline ComplexReal sqrt(const ComplexReal& z) {
  if (z.im == 0) {
    if (z.re >= 0) return {sqrt(z.re), Real(0)};
    return {Real(0), sqrt(-z.re)};
  }
  Real m = abs(z);
  Real r = sqrt((m + z.re) / 2);
  Real i = sqrt((m - z.re) / 2);
  if (z.im < 0) i = -i;
  return {r, i};
}

/// z^(1/n) chosen among the n roots as the one nearest the positive real
/// axis: modulus^(1/n) with argument arg(z)/n.
inline ComplexReal root_nearest_real(const ComplexReal& z, int n) {
  Real m = pow(abs(z), Real(1) / n);
  if (z.im == 0 && z.re >= 0) return {m, Real(0)};
  Real phi = arg(z) / n;
  return {m * cos(phi), m * sin(phi)};
}

}  // namespace tfsolve
