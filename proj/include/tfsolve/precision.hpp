#pragma once

// Arbitrary-precision scalar types and the precision context every solver
// is bound to.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tfsolve {

using Real = boost::multiprecision::mpfr_float;
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};
/// A Pade or Hermite-Pade system that is singular at the requested
/// orders; callers may retry with a lower order.
class DegenerateOrderError : public SingularMatrixError {
 public:
  using SingularMatrixError::SingularMatrixError;
};
class PoleError : public Error {
 public:
  using Error::Error;
};
class NoBracketError : public Error {
 public:
  using Error::Error;
};
class ConvergenceError : public Error {
 public:
  using Error::Error;
};
class ValidationError : public Error {
 public:
  using Error::Error;
};
class PrecisionStarvedError : public Error {
 public:
  using Error::Error;
};

/// Two-tier precision: `requested_digits` is what callers trust in the
/// output, `working_digits` is what arithmetic runs at. The working tier
/// never drops below 2*requested + 10.
class PrecisionContext {
 public:
  explicit PrecisionContext(unsigned requested_digits, unsigned working_digits = 0)
      : requested_(requested_digits), working_(std::max(working_digits, 2 * requested_digits + 10)) {
    if (requested_digits == 0) throw ValidationError("requested_digits must be positive");
  }

  unsigned requested_digits() const noexcept { return requested_; }
  unsigned working_digits() const noexcept { return working_; }

  /// Same requested digits, `extra` more working digits.
  PrecisionContext with_extra_digits(unsigned extra) const {
    return PrecisionContext(requested_, working_ + extra);
  }

  /// Working precision multiplied by `factor` (e.g. 1.5 for the certification runs).
  PrecisionContext raised(double factor) const {
    return PrecisionContext(requested_, static_cast<unsigned>(std::ceil(working_ * factor)));
  }

  Real real(std::string_view decimal) const;
  Real real(const Rational& q) const;
  Real real(long v) const;
  /// Re-rounds `x` to this context's working precision.
  Real lift(const Real& x) const { return Real(x, working_); }

  /// 10^-requested_digits.
  Real tolerance() const { return pow10(-static_cast<int>(requested_)); }
  /// 10^-working_digits.
  Real epsilon() const { return pow10(-static_cast<int>(working_)); }
  Real pow10(int e) const;

  friend bool operator==(const PrecisionContext&, const PrecisionContext&) = default;

 private:
  unsigned requested_;
  unsigned working_;
};

/// Sets the MPFR default precision for the lifetime of the scope. Values
/// created inside inherit it; arithmetic results take the widest operand.
class PrecisionScope {
 public:
  explicit PrecisionScope(const PrecisionContext& ctx) : saved_(Real::default_precision()) {
    Real::default_precision(ctx.working_digits());
  }
  explicit PrecisionScope(unsigned digits) : saved_(Real::default_precision()) {
    Real::default_precision(digits);
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

inline Real PrecisionContext::real(std::string_view decimal) const {
  PrecisionScope scope(*this);
  return Real(std::string(decimal));
}

inline Real PrecisionContext::real(const Rational& q) const {
  PrecisionScope scope(*this);
  return Real(q);
}

inline Real PrecisionContext::real(long v) const {
  PrecisionScope scope(*this);
  return Real(v);
}

inline Real PrecisionContext::pow10(int e) const {
  PrecisionScope scope(*this);
  return boost::multiprecision::pow(Real(10), e);
}

inline Real to_real(const Rational& q) { return Real(q); }
inline Real to_real(const Real& x) { return x; }

/// Number of leading significant decimal digits on which `value` agrees
/// with `reference`: floor(-log10(|value - reference| / |reference|)).
/// Exact agreement reports `cap`.
inline int agreed_digits(const Real& value, const Real& reference, int cap = 1000) {
  Real diff = abs(value - reference);
  if (diff == 0) return cap;
  Real scale = abs(reference);
  if (scale == 0) scale = 1;
  Real d = -log10(diff / scale);
  if (d < 0) return 0;
  return std::min(cap, static_cast<int>(floor(d).convert_to<long>()));
}

/// Decimal string with `digits` significant digits, scientific notation
/// only when the magnitude calls for it.
inline std::string to_decimal(const Real& x, unsigned digits) {
  return x.str(static_cast<std::streamsize>(digits));
}

inline std::string to_string(const Rational& q) {
  return q.str();
}

/// Exact parse of "p/q", "p" or a terminating decimal like "-1.25e-3".
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.find('/') != std::string::npos) return Rational(s);
  auto epos = s.find_first_of("eE");
  int exponent = 0;
  if (epos != std::string::npos) {
    exponent = std::stoi(s.substr(epos + 1));
    s = s.substr(0, epos);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    exponent -= static_cast<int>(s.size() - dot - 1);
    s.erase(dot, 1);
  }
  if (s.empty() || s == "-" || s == "+") throw ValidationError("not a number: " + std::string(text));
  if (s[0] == '+') s.erase(0, 1);
  Rational q{BigInt(s)};
  BigInt ten_pow = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(exponent)));
  return exponent >= 0 ? q * Rational(ten_pow) : q / Rational(ten_pow);
}

}  // namespace tfsolve
