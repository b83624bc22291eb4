#pragma once

// Truncated expansions of the two Thomas-Fermi problems: origin series in
// x and in t = sqrt(x), the universal endpoint series of the magnetic
// problem, and the endpoint series of the transformed function v(z).

#include "tfsolve/complex.hpp"
#include "tfsolve/polynomial.hpp"
#include "tfsolve/precision.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace tfsolve {

enum class EquationKind { Atom, Magnetic };

inline std::string to_string(EquationKind kind) { return kind == EquationKind::Atom ? "atom" : "magnetic"; }

inline EquationKind parse_equation(std::string_view name) {
  if (name == "atom") return EquationKind::Atom;
  if (name == "magnetic") return EquationKind::Magnetic;
  throw ValidationError("unknown equation '" + std::string(name) + "' (expected atom or magnetic)");
}

namespace detail {

template <class T>
struct is_polynomial : std::false_type {};
template <class C>
struct is_polynomial<Polynomial<C>> : std::true_type {};

/// Embeds an exact rational into the scalar type T.
template <class T>
T from_rational(const Rational& q) {
  if constexpr (std::is_same_v<T, Rational>) {
    return q;
  } else if constexpr (std::is_same_v<T, Real>) {
    return Real(q);
  } else if constexpr (std::is_same_v<T, ComplexReal>) {
    return ComplexReal(Real(q));
  } else if constexpr (is_polynomial<T>::value) {
    return T::constant(from_rational<typename std::decay_t<decltype(T().coefficient(0))>>(q));
  } else {
    static_assert(!sizeof(T), "unsupported series scalar");
  }
}

template <class T>
T from_int(long v) {
  return from_rational<T>(Rational(v));
}

template <class T>
bool is_exact_zero(const T& x) {
  if constexpr (is_polynomial<T>::value) {
    return x.is_zero();
  } else if constexpr (std::is_same_v<T, ComplexReal>) {
    return x.re == 0 && x.im == 0;
  } else {
    return x == 0;
  }
}

/// Appends the next coefficient of w = u^alpha, given w already holds
/// w_0..w_{n-1} and u holds at least u_0..u_n. Uses the standard
/// recurrence n u_0 w_n = sum_{j=1..n} ((alpha+1) j - n) u_j w_{n-j};
/// `inv_u0` is 1/u_0.
template <class T>
void extend_power(const std::vector<T>& u, const Rational& alpha, std::vector<T>& w, const T& inv_u0) {
  const long n = static_cast<long>(w.size());
  T acc = from_int<T>(0);
  for (long j = 1; j <= n; ++j) {
    if (j >= static_cast<long>(u.size())) break;
    Rational f = (alpha + 1) * j - n;
    if (f == 0 || is_exact_zero(u[j])) continue;
    acc += from_rational<T>(f) * (u[j] * w[n - j]);
  }
  w.push_back(acc * from_rational<T>(Rational(1, n)) * inv_u0);
}

/// Coefficients 0..n of u^alpha for a series with u_0 == 1.
template <class T>
std::vector<T> unit_power(const std::vector<T>& u, const Rational& alpha, int n) {
  std::vector<T> w{from_int<T>(1)};
  const T one = from_int<T>(1);
  while (static_cast<int>(w.size()) <= n) extend_power(u, alpha, w, one);
  return w;
}

}  // namespace detail

/// Coefficients 0..n of u^alpha for a Real series with u_0 > 0.
inline std::vector<Real> series_power(const std::vector<Real>& u, const Rational& alpha, int n) {
  if (u.empty() || u[0] <= 0) throw ValidationError("series_power needs a positive constant term");
  std::vector<Real> w{pow(u[0], Real(alpha))};
  const Real inv = 1 / u[0];
  while (static_cast<int>(w.size()) <= n) detail::extend_power(u, alpha, w, inv);
  return w;
}

/// Exponent of the form r + c*sqrt(m), wide enough for the irrational
/// exponents of the large-x expansions. m == 0 means purely rational.
struct Exponent {
  Rational rational{0};
  Rational sqrt_coefficient{0};
  unsigned radicand = 0;

  Exponent() = default;
  Exponent(Rational r) : rational(std::move(r)) {}  // NOLINT(implicit)
  Exponent(long r) : rational(r) {}                 // NOLINT(implicit)
  Exponent(Rational r, Rational c, unsigned m) : rational(std::move(r)), sqrt_coefficient(std::move(c)), radicand(m) {
    if (sqrt_coefficient == 0) radicand = 0;
    if (radicand == 0) sqrt_coefficient = 0;
  }

  bool is_rational() const { return radicand == 0; }
  Real value() const {
    Real v(rational);
    if (radicand != 0) v += Real(sqrt_coefficient) * sqrt(Real(radicand));
    return v;
  }
  std::string str() const {
    if (is_rational()) return rational.str();
    std::string s = rational == 0 ? "" : rational.str();
    Rational c = sqrt_coefficient;
    std::string sign = c < 0 ? "-" : (s.empty() ? "" : "+");
    if (c < 0) c = -c;
    s += sign + (c == 1 ? "" : c.str() + "*") + "sqrt(" + std::to_string(radicand) + ")";
    return s;
  }
  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.rational == b.rational && a.sqrt_coefficient == b.sqrt_coefficient && a.radicand == b.radicand;
  }
  friend bool operator<(const Exponent& a, const Exponent& b) {
    if (a.radicand == b.radicand && a.sqrt_coefficient == b.sqrt_coefficient) return a.rational < b.rational;
    PrecisionScope scope(60);
    return a.value() < b.value();
  }
};

template <class T>
struct SeriesTerm {
  Exponent exponent;
  T coefficient;
};

/// Sum of coefficient * variable^exponent over finitely many terms.
template <class T>
struct GeneralizedSeries {
  std::string variable;
  std::string expansion_point;
  std::vector<SeriesTerm<T>> terms;
  Exponent order;

  /// Coefficient of the given exponent, zero if absent.
  T coefficient(const Exponent& e) const {
    for (const auto& t : terms)
      if (t.exponent == e) return t.coefficient;
    return detail::from_int<T>(0);
  }

  /// k-th derivative with respect to the series variable at xi > 0.
  Real evaluate(const Real& xi, int derivative = 0) const {
    Real sum = 0;
    for (const auto& t : terms) {
      Real e = t.exponent.value();
      Real factor = 1;
      for (int k = 0; k < derivative; ++k) factor *= (e - k);
      if (factor == 0) continue;
      sum += factor * to_real(t.coefficient) * pow(xi, e - derivative);
    }
    return sum;
  }
};

/// Integer-power series, coefficients ascending.
template <class T>
struct PowerSeries {
  std::string variable;
  std::vector<T> coefficients;
  std::optional<std::string> parameter_note;

  int order() const { return static_cast<int>(coefficients.size()) - 1; }
  const T& operator[](std::size_t i) const { return coefficients[i]; }

  template <class U>
  U evaluate(const U& x, int derivative = 0) const {
    U acc(0);
    for (int k = order(); k >= derivative; --k) {
      Rational f = 1;
      for (int i = 0; i < derivative; ++i) f *= (k - i);
      acc = acc * x + U(coefficients[k]) * U(Real(f));
    }
    return acc;
  }
};

namespace detail {

template <class T>
std::string scalar_text(const T& x) {
  if constexpr (std::is_same_v<T, Rational>) {
    return x.str();
  } else {
    return x.str(0);
  }
}

}  // namespace detail

template <class T>
nlohmann::json to_json(const GeneralizedSeries<T>& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : s.terms) terms.push_back({t.exponent.str(), detail::scalar_text(t.coefficient)});
  return {{"variable", s.variable}, {"point", s.expansion_point}, {"order", s.order.str()}, {"terms", terms}};
}

template <class T>
nlohmann::json to_json(const PowerSeries<T>& s, std::string_view point = "0") {
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t j = 0; j < s.coefficients.size(); ++j)
    terms.push_back({std::to_string(j), detail::scalar_text(s.coefficients[j])});
  nlohmann::json out{{"variable", s.variable}, {"point", std::string(point)}, {"terms", terms}};
  if (s.parameter_note) out["parameter"] = *s.parameter_note;
  return out;
}

/// Coefficients e_0..e_K of u as a power series in t = sqrt(x). T may be
/// Real, Rational, ComplexReal or Polynomial<Rational> (symbolic slope).
template <class T>
std::vector<T> origin_coefficients_t(EquationKind kind, const T& a, int K) {
  std::vector<T> e{detail::from_int<T>(1), detail::from_int<T>(0), a};
  std::vector<T> w{detail::from_int<T>(1)};
  const T one = detail::from_int<T>(1);
  const Rational alpha = kind == EquationKind::Atom ? Rational(3, 2) : Rational(1, 2);
  const int lag = kind == EquationKind::Atom ? 3 : 5;
  for (int k = 3; k <= K; ++k) {
    int idx = k - lag;
    if (idx < 0) {
      e.push_back(detail::from_int<T>(0));
      continue;
    }
    while (static_cast<int>(w.size()) <= idx) detail::extend_power(e, alpha, w, one);
    e.push_back(w[idx] * detail::from_rational<T>(Rational(4, static_cast<long>(k) * (k - 2))));
  }
  e.resize(K + 1);
  return e;
}

/// Origin expansion in x with half-integer exponents through `order`.
template <class T>
GeneralizedSeries<T> origin_series_u(EquationKind kind, const T& a, const Rational& order) {
  if (order < 3) throw ValidationError("origin_series_u needs order >= 3");
  Rational twice = order * 2;
  BigInt K = numerator(twice) / denominator(twice);
  auto e = origin_coefficients_t(kind, a, K.convert_to<int>());
  GeneralizedSeries<T> s{"x", "0", {}, Exponent(order)};
  for (std::size_t k = 0; k < e.size(); ++k)
    if (!detail::is_exact_zero(e[k])) s.terms.push_back({Exponent(Rational(static_cast<long>(k), 2)), e[k]});
  return s;
}

/// Coefficients v_0..v_order of v(t) = sqrt(u(t^2)).
template <class T>
PowerSeries<T> origin_series_v(EquationKind kind, const T& a, int order) {
  if (order < 4) throw ValidationError("origin_series_v needs order >= 4");
  auto e = origin_coefficients_t(kind, a, order);
  PowerSeries<T> v{"t", detail::unit_power(e, Rational(1, 2), order), std::nullopt};
  if constexpr (std::is_same_v<T, Real> || std::is_same_v<T, Rational>) v.parameter_note = "a=" + detail::scalar_text(a);
  return v;
}

/// Universal coefficients c_j of the magnetic endpoint expansion
/// u = x0^5 s^4 sum c_j s^j, s = (x0 - x)/x0, from (w'')^2 = (1-s) w.
inline PowerSeries<Rational> endpoint_series(int order) {
  if (order < 0) throw ValidationError("endpoint_series needs order >= 0");
  std::vector<Rational> c{Rational(1, 144)};
  for (int m = 1; m <= order; ++m) {
    Rational rhs = -c[m - 1];
    for (int i = 1; i < m; ++i) rhs -= Rational(static_cast<long>((i + 4) * (i + 3)) * ((m - i + 4) * (m - i + 3))) * c[i] * c[m - i];
    c.push_back(rhs / (Rational((m + 4) * (m + 3), 6) - 1));
  }
  return {"s", std::move(c), std::nullopt};
}

/// Universal coefficients c~_j with v = x0^(5/2) t^2 sum c~_j t^j near
/// z = 1 (t = z - 1) for z(v v'' + v'^2) - v v' = 2 x0^(5/2) z^4 v.
inline PowerSeries<Rational> v_endpoint_series(int order) {
  if (order < 0) throw ValidationError("v_endpoint_series needs order >= 0");
  const int top = order + 2;
  std::vector<Rational> w(top + 1, Rational(0));
  w[2] = Rational(1, 3);
  auto y = [&](int k, int skip) {
    Rational s = 0;
    for (int i = 2; i <= k - 2; ++i)
      if (i != skip && k - i != skip) s += w[i] * w[k - i];
    return s;
  };
  static const long binom4[] = {1, 4, 6, 4, 1};
  for (int n = 3; n <= top; ++n) {
    Rational rest = Rational((n + 2) * (n + 1), 2) * y(n + 2, n);
    Rational y1 = y(n + 1, -1);
    rest += Rational((n + 1) * n, 2) * y1 - Rational(n + 1, 2) * y1;
    for (int i = 1; i <= 4 && n - i >= 2; ++i) rest -= 2 * binom4[i] * w[n - i];
    w[n] = -rest / (Rational((n + 2) * (n + 1), 3) - 2);
  }
  return {"t", std::vector<Rational>(w.begin() + 2, w.end()), std::nullopt};
}

}  // namespace tfsolve
