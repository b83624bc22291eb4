#pragma once

// Local expansions about movable points (zero/branch point, minimum,
// pole), at large x, and at the magnetic endpoint.

#include "tfsolve/series.hpp"

#include <optional>
#include <string>

namespace tfsolve {

enum class LocalModel {
  AtomZero,
  AtomMin,
  AtomPole,
  AtomInfinity,
  MagneticZero,
  MagneticMin,
  MagneticInfinity,
  MagneticCritical
};

inline std::string to_string(LocalModel m) {
  switch (m) {
    case LocalModel::AtomZero: return "AtomZero";
    case LocalModel::AtomMin: return "AtomMin";
    case LocalModel::AtomPole: return "AtomPole";
    case LocalModel::AtomInfinity: return "AtomInfinity";
    case LocalModel::MagneticZero: return "MagneticZero";
    case LocalModel::MagneticMin: return "MagneticMin";
    case LocalModel::MagneticInfinity: return "MagneticInfinity";
    case LocalModel::MagneticCritical: return "MagneticCritical";
  }
  return "?";
}

struct LocalModelParams {
  LocalModel model = LocalModel::AtomZero;
  std::optional<Real> b;
  std::optional<Real> a0;
  std::optional<Real> x_q;
  std::optional<Real> x_m;
  std::optional<Real> x_s;
  std::optional<Real> x0;
  std::optional<Real> d;
  std::optional<Real> c0;

  /// The movable point the local variable s is measured from, if any.
  std::optional<Real> location() const {
    if (x_q) return x_q;
    if (x_m) return x_m;
    if (x_s) return x_s;
    if (x0) return x0;
    return std::nullopt;
  }
};

/// Truncation index of the pole expansion: the next power is resonant
/// and carries a free constant.
inline constexpr int kAtomPoleMaxExponent = 5;

namespace detail {

inline void require_fields(const LocalModelParams& p, std::initializer_list<const char*> wanted) {
  struct Field {
    const char* name;
    const std::optional<Real>* value;
  };
  const Field fields[] = {{"b", &p.b},     {"a0", &p.a0}, {"x_q", &p.x_q}, {"x_m", &p.x_m},
                          {"x_s", &p.x_s}, {"x0", &p.x0}, {"d", &p.d},     {"c0", &p.c0}};
  for (const auto& f : fields) {
    bool want = false;
    for (const char* w : wanted) want = want || std::string(w) == f.name;
    if (want && !f.value->has_value())
      throw ValidationError(std::string(f.name) + " is required by the " + to_string(p.model) + " model");
    if (!want && f.value->has_value())
      throw ValidationError(std::string(f.name) + " is not a parameter of the " + to_string(p.model) + " model");
  }
  for (const auto* loc : {&p.x_q, &p.x_m, &p.x_s, &p.x0})
    if (loc->has_value() && **loc <= 0) throw ValidationError("movable-point locations must be positive");
}

/// Coefficients of (1 - s)^beta.
inline std::vector<Rational> binomial_series(const Rational& beta, int n) {
  std::vector<Rational> c{Rational(1)};
  for (int k = 1; k <= n; ++k) c.push_back(c.back() * (k - 1 - beta) / k);
  return c;
}

/// Expansion about a zero (u = b s + ...) or a minimum (u = a0 + ...) in
/// sigma = sqrt(s). With u = sum f_k sigma^k the equation u_ss = G
/// becomes k(k-2) f_k = 4 [G]_{k-4}, G = C (1 - s)^beta u^alpha.
inline std::vector<Real> sigma_coefficients(bool zero, const Real& start, const Real& C, const Rational& alpha,
                                            const Rational& beta, int K) {
  std::vector<Real> f(K + 1, Real(0));
  if (zero)
    f[2] = start;
  else
    f[0] = start;
  auto bin = binomial_series(beta, K);
  const int shift = zero ? (alpha == Rational(3, 2) ? 3 : 1) : 0;  // sigma^(2 alpha)
  for (int k = 3; k <= K; ++k) {
    int idx = k - 4;
    if (idx < 0) continue;
    // power series of u^alpha in sigma, as b^alpha sigma^shift (1+g)^alpha or directly
    std::vector<Real> pw;
    if (zero) {
      std::vector<Real> g(idx + 1, Real(0));
      for (int j = 0; j <= idx && j + 2 <= K; ++j) g[j] = f[j + 2] / start;
      pw = series_power(g, alpha, idx);
      Real lead = pow(start, Real(alpha));
      std::vector<Real> shifted(idx + 1, Real(0));
      for (int j = shift; j <= idx; ++j) shifted[j] = lead * pw[j - shift];
      pw = std::move(shifted);
    } else {
      std::vector<Real> u(f.begin(), f.begin() + idx + 1);
      pw = series_power(u, alpha, idx);
    }
    Real g = 0;
    for (int i = 0; 2 * i <= idx; ++i) g += Real(bin[i]) * pw[idx - 2 * i];
    f[k] = 4 * C * g / (static_cast<long>(k) * (k - 2));
  }
  return f;
}

}  // namespace detail

/// Truncated local expansion. `order` bounds the exponent of the local
/// variable (number of correction terms for the large-x models).
inline GeneralizedSeries<Real> local_model_series(const LocalModelParams& p, int order) {
  if (order < 0) throw ValidationError("local_model_series needs order >= 0");
  GeneralizedSeries<Real> out;
  const bool atom = p.model == LocalModel::AtomZero || p.model == LocalModel::AtomMin ||
                    p.model == LocalModel::AtomPole || p.model == LocalModel::AtomInfinity;
  const Rational alpha = atom ? Rational(3, 2) : Rational(1, 2);
  const Rational beta = atom ? Rational(-1, 2) : Rational(1, 2);
  switch (p.model) {
    case LocalModel::AtomZero:
    case LocalModel::MagneticZero:
    case LocalModel::AtomMin:
    case LocalModel::MagneticMin: {
      const bool zero = p.model == LocalModel::AtomZero || p.model == LocalModel::MagneticZero;
      if (zero)
        detail::require_fields(p, {"b", "x_q"});
      else
        detail::require_fields(p, {"a0", "x_m"});
      const Real& x = zero ? *p.x_q : *p.x_m;
      const Real C = pow(x, Real(atom ? Rational(3, 2) : Rational(5, 2)));
      auto f = detail::sigma_coefficients(zero, zero ? *p.b : *p.a0, C, alpha, beta, 2 * order);
      out.variable = "s";
      out.expansion_point = zero ? "x_q" : "x_m";
      for (std::size_t k = 0; k < f.size(); ++k)
        if (f[k] != 0) out.terms.push_back({Exponent(Rational(static_cast<long>(k), 2)), f[k]});
      out.order = Exponent(order);
      return out;
    }
    case LocalModel::AtomPole: {
      detail::require_fields(p, {"x_s"});
      // u = x_s^-3 s^-4 sum p_k s^k, (k-4)(k-5) p_k = [(1-s)^(-1/2) P^(3/2)]_k.
      const int top = std::min(order, kAtomPoleMaxExponent) + 4;
      auto bin = detail::binomial_series(Rational(-1, 2), top);
      std::vector<Rational> pc{Rational(400)};
      for (int k = 1; k <= top; ++k) {
        pc.push_back(Rational(0));
        std::vector<Rational> w{Rational(8000)};
        while (static_cast<int>(w.size()) <= k) detail::extend_power(pc, Rational(3, 2), w, Rational(1, 400));
        Rational rest = 0;
        for (int i = 0; i <= k; ++i) rest += bin[i] * w[k - i];
        pc[k] = rest / (Rational((k - 4) * (k - 5)) - 30);
      }
      const Real scale = 1 / pow(*p.x_s, 3);
      out.variable = "s";
      out.expansion_point = "x_s";
      for (int k = 0; k <= top; ++k)
        if (pc[k] != 0) out.terms.push_back({Exponent(Rational(k - 4)), Real(pc[k]) * scale});
      out.order = Exponent(top - 4);
      return out;
    }
    case LocalModel::AtomInfinity:
    case LocalModel::MagneticInfinity: {
      // u = sum a_j K^j x^(e0 - j r), a_1 = 1 (resonant, K = d or c0).
      const bool a = p.model == LocalModel::AtomInfinity;
      detail::require_fields(p, {a ? "d" : "c0"});
      const Real K = a ? *p.d : *p.c0;
      const unsigned m = a ? 73 : 41;
      const Real r = a ? Real((sqrt(Real(73)) - 7) / 2) : Real((9 - sqrt(Real(41))) / 2);
      const Real e0 = a ? Real(-3) : Real(5);
      const Rational a0 = a ? Rational(144) : Rational(1, 400);
      const Real lin = a ? Real(18) : Real(10);  // d(u^alpha)/du at the leading term times the prefactor
      std::vector<Real> coef{Real(a0)};
      for (int j = 1; j <= order; ++j) {
        coef.push_back(Real(0));
        if (j == 1) {
          coef[1] = 1;
          continue;
        }
        auto w = series_power(coef, alpha, j);
        Real rest = w[j];
        Real ej = e0 - j * r;
        coef[j] = rest / (ej * (ej - 1) - lin);
      }
      out.variable = "x";
      out.expansion_point = "infinity";
      for (int j = 0; j <= order; ++j) {
        Exponent e = a ? Exponent(Rational(-3) + Rational(7 * j, 2), Rational(-j, 2), m)
                       : Exponent(Rational(5) - Rational(9 * j, 2), Rational(j, 2), m);
        out.terms.push_back({e, coef[j] * pow(K, j)});
      }
      out.order = Exponent(order);
      return out;
    }
    case LocalModel::MagneticCritical: {
      detail::require_fields(p, {"x0"});
      auto c = endpoint_series(order);
      const Real x05 = pow(*p.x0, 5);
      out.variable = "s";
      out.expansion_point = "x0";
      for (int j = 0; j <= order; ++j) out.terms.push_back({Exponent(Rational(4 + j)), x05 * Real(c[j])});
      out.order = Exponent(order + 4);
      return out;
    }
  }
  throw ValidationError("unknown local model");
}

/// u (derivative = 0) or du/dx (1) or d2u/dx2 (2) from a local series at
/// physical coordinate x. Models about a point use s = (loc - x)/loc.
inline Real evaluate_local_model(const LocalModelParams& p, const GeneralizedSeries<Real>& series, const Real& x,
                                 int derivative = 0) {
  auto loc = p.location();
  if (!loc) return series.evaluate(x, derivative);
  Real s = (*loc - x) / *loc;
  Real chain = pow(-1 / *loc, derivative);
  return chain * series.evaluate(s, derivative);
}

}  // namespace tfsolve
