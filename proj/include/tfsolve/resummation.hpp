#pragma once

// Pade and quadratic Hermite-Pade (Shafer) approximants of the magnetic
// endpoint series, and the x0 / u'(0) estimates built on them.

#include "tfsolve/complex.hpp"
#include "tfsolve/linalg.hpp"
#include "tfsolve/polynomial.hpp"
#include "tfsolve/reference.hpp"
#include "tfsolve/roots.hpp"
#include "tfsolve/series.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tfsolve {

enum class ShaferBranch { Plus, Minus };
enum class Acceleration { None, Pade };

inline std::string to_string(ShaferBranch b) { return b == ShaferBranch::Plus ? "plus" : "minus"; }
inline std::string to_string(Acceleration a) { return a == Acceleration::Pade ? "pade" : "none"; }

template <class T>
struct PadeApproximant {
  Polynomial<T> numerator;
  Polynomial<T> denominator;
  int J = 0;
  int K = 0;
  int matched_order = 0;
};

template <class T>
struct QuadApproximant {
  Polynomial<T> P, Q, R;
  int K = 0, L = 0, M = 0;
  int matched_order = 0;                 // N = K + L + M + 1
  std::optional<std::string> note;       // set when the P(0)=Q(0)=1 normalization had to be dropped
};

namespace detail {

inline std::vector<Rational> solve_system(const Matrix<Rational>& m, const std::vector<Rational>& b,
                                          const PrecisionContext*) {
  return solve_linear(m, b);
}
inline std::vector<Real> solve_system(const Matrix<Real>& m, const std::vector<Real>& b,
                                      const PrecisionContext* ctx) {
  return solve_linear(m, b, *ctx);
}

template <class T>
T coeff(const std::vector<T>& c, int i) {
  return (i >= 0 && i < static_cast<int>(c.size())) ? c[i] : T(0);
}

template <class T>
PadeApproximant<T> pade_fit_impl(const PowerSeries<T>& s, int J, int K, const PrecisionContext* ctx) {
  if (J < 0 || K < 0) throw ValidationError("Pade orders must be non-negative");
  if (s.order() < J + K) throw ValidationError("Pade [" + std::to_string(J) + "/" + std::to_string(K) +
                                               "] needs series order >= " + std::to_string(J + K));
  const auto& c = s.coefficients;
  std::vector<T> q{T(1)};
  if (K > 0) {
    Matrix<T> m(K, K, T(0));
    std::vector<T> rhs(K);
    for (int r = 0; r < K; ++r) {
      const int n = J + 1 + r;
      for (int i = 1; i <= K; ++i) m(r, i - 1) = coeff(c, n - i);
      rhs[r] = -c[n];
    }
    std::vector<T> sol;
    try {
      sol = solve_system(m, rhs, ctx);
    } catch (const SingularMatrixError&) {
      throw DegenerateOrderError("Pade [" + std::to_string(J) + "/" + std::to_string(K) +
                                 "] system is singular; retry with a lower J or K");
    }
    q.insert(q.end(), sol.begin(), sol.end());
  }
  std::vector<T> p(J + 1, T(0));
  for (int n = 0; n <= J; ++n)
    for (int i = 0; i <= std::min(n, K); ++i) p[n] += q[i] * c[n - i];
  return {Polynomial<T>(std::move(p)), Polynomial<T>(std::move(q)), J, K, J + K};
}

template <class T>
QuadApproximant<T> shafer_fit_impl(const PowerSeries<T>& s, int K, int L, int M, const PrecisionContext* ctx) {
  if (K < 0 || L < 0 || M < 0) throw ValidationError("Hermite-Pade degrees must be non-negative");
  const int N = K + L + M + 1;
  if (s.order() < N - 1)
    throw ValidationError("Hermite-Pade fit needs series order >= " + std::to_string(N - 1));
  const auto& f = s.coefficients;
  std::vector<T> f2(N + 1, T(0));
  for (int n = 0; n <= N; ++n)
    for (int i = 0; i <= n; ++i) f2[n] += coeff(f, i) * coeff(f, n - i);

  // Unknowns p_1..p_K, q_1..q_L, r_0..r_M; with `free_q0` also q_0 and one
  // more matching equation.
  auto build = [&](bool free_q0) {
    const int n_unknowns = N + (free_q0 ? 1 : 0);
    Matrix<T> m(n_unknowns, n_unknowns, T(0));
    std::vector<T> rhs(n_unknowns, T(0));
    for (int n = 0; n < n_unknowns; ++n) {
      rhs[n] = -f2[n] - (free_q0 ? T(0) : coeff(f, n));
      for (int i = 1; i <= K; ++i) m(n, i - 1) = n - i >= 0 ? f2[n - i] : T(0);
      for (int i = 1; i <= L; ++i) m(n, K + i - 1) = coeff(f, n - i);
      if (n <= M) m(n, K + L + n) = T(1);
      if (free_q0) m(n, N) = coeff(f, n);
    }
    return std::make_pair(m, rhs);
  };

  QuadApproximant<T> out;
  out.K = K;
  out.L = L;
  out.M = M;
  out.matched_order = N;
  std::vector<T> sol;
  T q0(1);
  try {
    auto [m, rhs] = build(false);
    sol = solve_system(m, rhs, ctx);
  } catch (const SingularMatrixError&) {
    if (s.order() < N) throw DegenerateOrderError("Hermite-Pade system is singular and the series is too short to free Q(0)");
    auto [m, rhs] = build(true);
    try {
      sol = solve_system(m, rhs, ctx);
    } catch (const SingularMatrixError&) {
      throw DegenerateOrderError("Hermite-Pade system is singular with and without Q(0) = 1");
    }
    q0 = sol[N];
    out.matched_order = N + 1;
    out.note = "normalized system singular; Q(0) left free";
  }
  std::vector<T> p{T(1)}, q{q0}, r;
  for (int i = 0; i < K; ++i) p.push_back(sol[i]);
  for (int i = 0; i < L; ++i) q.push_back(sol[K + i]);
  for (int i = 0; i <= M; ++i) r.push_back(sol[K + L + i]);
  out.P = Polynomial<T>(std::move(p));
  out.Q = Polynomial<T>(std::move(q));
  out.R = Polynomial<T>(std::move(r));
  return out;
}

template <class T>
QuadApproximant<Real> to_real(const QuadApproximant<T>& q, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  QuadApproximant<Real> r;
  auto lift = [&](const Polynomial<T>& p) {
    std::vector<Real> c;
    for (const auto& x : p.coefficients()) c.push_back(ctx.lift(Real(x)));
    return Polynomial<Real>(std::move(c));
  };
  r.P = lift(q.P);
  r.Q = lift(q.Q);
  r.R = lift(q.R);
  r.K = q.K;
  r.L = q.L;
  r.M = q.M;
  r.matched_order = q.matched_order;
  r.note = q.note;
  return r;
}

/// Value and first two s-derivatives of one branch.
struct BranchJet {
  ComplexReal u, du, d2u;
  bool complex = false;
};

inline BranchJet branch_jet(const QuadApproximant<Real>& q, const Real& s, ShaferBranch branch) {
  const Real P = q.P(s), Q = q.Q(s), R = q.R(s);
  if (P == 0) throw PoleError("Hermite-Pade approximant has P(s) = 0 at s = " + to_decimal(s, 20));
  const Real disc = Q * Q - 4 * P * R;
  ComplexReal root = sqrt(ComplexReal(disc));
  if (branch == ShaferBranch::Minus) root = -root;
  BranchJet j;
  j.complex = disc < 0;
  j.u = (ComplexReal(-Q) + root) / ComplexReal(2 * P);
  const auto dP = q.P.derivative(), dQ = q.Q.derivative(), dR = q.R.derivative();
  const Real P1 = dP(s), Q1 = dQ(s), R1 = dR(s);
  const Real P2 = dP.derivative()(s), Q2 = dQ.derivative()(s), R2 = dR.derivative()(s);
  const ComplexReal W = root;  // 2 P u + Q
  const ComplexReal u = j.u;
  j.du = -(ComplexReal(P1) * u * u + ComplexReal(Q1) * u + ComplexReal(R1)) / W;
  j.d2u = -(ComplexReal(P2) * u * u + ComplexReal(Q2) * u + ComplexReal(R2) +
            ComplexReal(2) * (ComplexReal(2 * P1) * u + ComplexReal(Q1)) * j.du + ComplexReal(2 * P) * j.du * j.du) /
          W;
  return j;
}

}  // namespace detail

/// Endpoint coefficients in the variable s = x/x0 - 1, which runs over
/// [-1, 0] from the origin to the endpoint: u = x0^5 s^4 sum c_j (-s)^j.
inline PowerSeries<Rational> shifted_endpoint_series(int order) {
  auto c = endpoint_series(order);
  for (std::size_t j = 1; j < c.coefficients.size(); j += 2) c.coefficients[j] = -c.coefficients[j];
  c.variable = "s";
  c.parameter_note = "s = x/x0 - 1";
  return c;
}

inline PadeApproximant<Rational> pade_fit(const PowerSeries<Rational>& s, int J, int K) {
  return detail::pade_fit_impl(s, J, K, nullptr);
}

inline PadeApproximant<Real> pade_fit(const PowerSeries<Real>& s, int J, int K, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  return detail::pade_fit_impl(s, J, K, &ctx);
}

/// Value (derivative 0), first or second derivative of num/den at x.
template <class T>
Real pade_evaluate(const PadeApproximant<T>& p, const Real& x, int derivative = 0) {
  auto N = convert<Real>(p.numerator), D = convert<Real>(p.denominator);
  const Real n0 = N(x), d0 = D(x);
  if (d0 == 0) throw PoleError("Pade denominator vanishes at " + to_decimal(x, 20));
  if (derivative == 0) return n0 / d0;
  const Real n1 = N.derivative()(x), d1 = D.derivative()(x);
  const Real first = (n1 * d0 - n0 * d1) / (d0 * d0);
  if (derivative == 1) return first;
  if (derivative != 2) throw ValidationError("pade_evaluate supports derivatives 0..2");
  const Real n2 = N.derivative().derivative()(x), d2 = D.derivative().derivative()(x);
  return (n2 * d0 - n0 * d2) / (d0 * d0) - 2 * d1 * first / d0;
}

/// Exact fit for rational series.
inline QuadApproximant<Rational> shafer_fit(const PowerSeries<Rational>& s, int K, int L, int M) {
  return detail::shafer_fit_impl(s, K, L, M, nullptr);
}

inline QuadApproximant<Real> shafer_fit(const PowerSeries<Real>& s, int K, int L, int M, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  return detail::shafer_fit_impl(s, K, L, M, &ctx);
}

struct ShaferValue {
  ComplexReal value;
  bool complex = false;  // negative discriminant
};

template <class T>
ShaferValue shafer_eval(const QuadApproximant<T>& q, const Real& s, ShaferBranch branch, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  auto qr = detail::to_real(q, ctx);
  auto j = detail::branch_jet(qr, ctx.lift(s), branch);
  return {j.u, j.complex};
}

/// Coefficients of P u^2 + Q u + R for the series itself, through `order`;
/// the first matched_order of them vanish for a fitted approximant.
inline std::vector<Rational> shafer_matching_defect(const QuadApproximant<Rational>& q, const PowerSeries<Rational>& s,
                                                    int order) {
  Polynomial<Rational> f(std::vector<Rational>(s.coefficients.begin(),
                                               s.coefficients.begin() + std::min<int>(order + 1, s.coefficients.size())));
  auto total = q.P * f * f + q.Q * f + q.R;
  std::vector<Rational> out;
  for (int n = 0; n <= order; ++n) out.push_back(total.coefficient(n));
  return out;
}

struct ShaferEstimate {
  int K = 0;
  int N = 0;
  ComplexReal root_plus, root_minus, average;  // x0 estimates
  ComplexReal error_plus, error_minus, error_average;
  Real taylor_error;  // partial sums through order N
  bool complex = false;
};

inline Real endpoint_x0_partial_sums(int M, const PrecisionContext& ctx) {
  if (M < 0) throw ValidationError("partial sums need M >= 0");
  PrecisionScope scope(ctx);
  auto c = endpoint_series(M);
  Rational sum = 0;
  for (const auto& x : c.coefficients) sum += x;
  return pow(ctx.real(sum), -1 / ctx.real(5));
}

/// Diagonal K=L=M Shafer estimate of x0 = u~(-1)^(-1/5) from both
/// branches and their average, with errors against the reference x0.
inline ShaferEstimate shafer_x0(int K, const PrecisionContext& ctx) {
  if (K < 1) throw ValidationError("shafer_x0 needs K >= 1");
  PrecisionScope scope(ctx);
  ShaferEstimate e;
  e.K = K;
  e.N = 3 * K + 1;
  auto series = shifted_endpoint_series(e.N);
  auto q = detail::to_real(shafer_fit(series, K, K, K), ctx);
  const Real s = -1;
  auto plus = detail::branch_jet(q, s, ShaferBranch::Plus);
  auto minus = detail::branch_jet(q, s, ShaferBranch::Minus);
  e.complex = plus.complex;
  e.root_plus = root_nearest_real(ComplexReal(1) / plus.u, 5);
  e.root_minus = root_nearest_real(ComplexReal(1) / minus.u, 5);
  e.average = (e.root_plus + e.root_minus) / ComplexReal(2);
  const Real ref = ReferenceStore::value("magnetic_x0", ctx);
  e.error_plus = e.root_plus - ComplexReal(ref);
  e.error_minus = e.root_minus - ComplexReal(ref);
  e.error_average = e.average - ComplexReal(ref);
  e.taylor_error = endpoint_x0_partial_sums(e.N, ctx) - ref;
  return e;
}

struct VSeriesEstimate {
  Real u0_prime;
  Real x0;
  int J = 0;  // Pade orders actually used (J = M, K = 0 without acceleration)
  int K = 0;
};

/// x0 and u'(0) from the v-series through order M: v_M(0) = 1 fixes
/// x0^(5/2) f(-1) = 1, and u'(0) = v''(0)/x0 with v = x0^(5/2) t^2 f(t).
inline VSeriesEstimate vseries_estimates(int M, Acceleration acc, const PrecisionContext& ctx) {
  if (M < 1) throw ValidationError("vseries_estimates needs M >= 1");
  PrecisionScope scope(ctx);
  auto c = v_endpoint_series(M);
  PadeApproximant<Rational> p;
  if (acc == Acceleration::None) {
    p = pade_fit(c, M, 0);
  } else {
    const int K = (M + 1) / 2, J = M - K;
    bool done = false;
    for (auto [j, k] : {std::pair{J, K}, std::pair{J, K - 1}, std::pair{J - 1, K}}) {
      try {
        p = pade_fit(c, j, k);
        done = true;
        break;
      } catch (const DegenerateOrderError&) {
      }
    }
    if (!done) throw ConvergenceError("no non-degenerate Pade approximant near [" + std::to_string(J) + "/" +
                                      std::to_string(K) + "]");
  }
  const Real t = -1;
  const Real f0 = pade_evaluate(p, t, 0), f1 = pade_evaluate(p, t, 1), f2 = pade_evaluate(p, t, 2);
  if (f0 <= 0) throw ConvergenceError("v-series approximant is not positive at the origin");
  VSeriesEstimate out;
  out.x0 = pow(f0, -2 / ctx.real(5));
  out.u0_prime = (2 * f0 - 4 * f1 + f2) / (f0 * out.x0);
  out.J = p.J;
  out.K = p.K;
  return out;
}

struct ShaferResidual {
  Real s;
  Real plus;
  Real minus;
  ShaferBranch physical = ShaferBranch::Plus;  // smaller residual; plus on a tie
  bool tie = false;
};

/// |u_ss/x0^2 - sqrt(x0 (s+1) u)| for u = x0^5 s^4 u~ on each branch.
template <class T>
std::vector<ShaferResidual> shafer_residual(const QuadApproximant<T>& q, const Real& x0, const std::vector<Real>& grid,
                                            const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  auto qr = detail::to_real(q, ctx);
  const Real X = ctx.lift(x0), x05 = pow(X, 5);
  std::vector<ShaferResidual> out;
  for (const auto& point : grid) {
    if (!(point > -1 && point < 0)) throw ValidationError("residual grid must lie inside (-1, 0)");
    const Real s = ctx.lift(point);
    ShaferResidual r;
    r.s = s;
    for (auto branch : {ShaferBranch::Plus, ShaferBranch::Minus}) {
      auto j = detail::branch_jet(qr, s, branch);
      ComplexReal u = ComplexReal(x05 * s * s * s * s) * j.u;
      ComplexReal uss = ComplexReal(x05) * (ComplexReal(12 * s * s) * j.u + ComplexReal(8 * s * s * s) * j.du +
                                            ComplexReal(s * s * s * s) * j.d2u);
      ComplexReal rho = uss / ComplexReal(X * X) - sqrt(ComplexReal(X * (s + 1)) * u);
      (branch == ShaferBranch::Plus ? r.plus : r.minus) = abs(rho);
    }
    r.tie = r.plus == r.minus;
    r.physical = r.minus < r.plus ? ShaferBranch::Minus : ShaferBranch::Plus;
    out.push_back(r);
  }
  return out;
}

struct SpuriousSingularity {
  Real s;
  Real p_ratio;     // |P(s)| / max |P| on [-1, 0]
  Real disc_ratio;  // |Q^2 - 4PR|(s) / max |Q^2 - 4PR| on [-1, 0]
};

/// Points of (-1, 0) where |P| and the discriminant are both below
/// 10^(-requested/2) times their maxima over the interval. Candidates are
/// the real zeros of P and of the discriminant (sign changes on a uniform
/// grid, refined) and grid-local minima of |discriminant|.
template <class T>
std::vector<SpuriousSingularity> detect_spurious_singularities(const QuadApproximant<T>& q, const PrecisionContext& ctx,
                                                              int samples = 2000) {
  PrecisionScope scope(ctx);
  auto qr = detail::to_real(q, ctx);
  const auto disc_poly = qr.Q * qr.Q - Real(4) * qr.P * qr.R;
  std::vector<Real> xs, pv, dv;
  Real pmax = 0, dmax = 0;
  for (int i = 0; i <= samples; ++i) {
    Real x = Real(-1) + Real(i) / samples;
    xs.push_back(x);
    pv.push_back(qr.P(x));
    dv.push_back(disc_poly(x));
    pmax = max(pmax, Real(abs(pv.back())));
    dmax = max(dmax, Real(abs(dv.back())));
  }
  std::vector<Real> candidates;
  for (int i = 0; i < samples; ++i) {
    if (detail::opposite_signs(pv[i], pv[i + 1]))
      candidates.push_back(find_root([&](const Real& x) { return qr.P(x); }, {xs[i], xs[i + 1]}, ctx));
    if (detail::opposite_signs(dv[i], dv[i + 1]))
      candidates.push_back(find_root([&](const Real& x) { return disc_poly(x); }, {xs[i], xs[i + 1]}, ctx));
    if (i > 0 && abs(dv[i]) < abs(dv[i - 1]) && abs(dv[i]) < abs(dv[i + 1])) candidates.push_back(xs[i]);
  }
  const Real threshold = ctx.pow10(-static_cast<int>(ctx.requested_digits()) / 2);
  std::vector<SpuriousSingularity> out;
  for (const auto& s : candidates) {
    if (!(s > -1 && s < 0)) continue;
    Real pr = abs(qr.P(s)) / pmax, dr = abs(disc_poly(s)) / dmax;
    if (pr <= threshold && dr <= threshold) out.push_back({s, pr, dr});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.s < b.s; });
  return out;
}

namespace detail {

inline std::string error_text(const ComplexReal& z, unsigned digits = 3) {
  if (z.im == 0) return to_decimal(z.re, digits);
  std::string im = to_decimal(abs(z.im), digits);
  return to_decimal(z.re, digits) + (z.im < 0 ? "-" : "+") + "i" + im;
}

}  // namespace detail

/// Error table over K: columns K, N, Taylor, first root (plus), second
/// root (minus), average of roots.
inline std::vector<ShaferEstimate> shafer_table(const std::vector<int>& Ks, const PrecisionContext& ctx) {
  std::vector<ShaferEstimate> rows;
  for (int K : Ks) rows.push_back(shafer_x0(K, ctx));
  return rows;
}

inline nlohmann::json to_json(const std::vector<ShaferEstimate>& rows, unsigned digits = 3) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"K", r.K},
                   {"N", r.N},
                   {"taylor_error", to_decimal(r.taylor_error, digits)},
                   {"plus_error", detail::error_text(r.error_plus, digits)},
                   {"minus_error", detail::error_text(r.error_minus, digits)},
                   {"average_error", detail::error_text(r.error_average, digits)},
                   {"complex", r.complex}});
  return out;
}

inline std::string to_csv(const std::vector<ShaferEstimate>& rows, unsigned digits = 3) {
  std::ostringstream out;
  out << "K,N,taylor_error,plus_error,minus_error,average_error\n";
  for (const auto& r : rows)
    out << r.K << ',' << r.N << ',' << to_decimal(r.taylor_error, digits) << ','
        << detail::error_text(r.error_plus, digits) << ',' << detail::error_text(r.error_minus, digits) << ','
        << detail::error_text(r.error_average, digits) << '\n';
  return out.str();
}

inline std::string to_text(const std::vector<ShaferEstimate>& rows, unsigned digits = 3) {
  std::ostringstream out;
  out << std::setw(4) << "K" << std::setw(5) << "N" << std::setw(14) << "Taylor" << std::setw(26) << "plus root"
      << std::setw(26) << "minus root" << std::setw(26) << "average" << '\n';
  for (const auto& r : rows)
    out << std::setw(4) << r.K << std::setw(5) << r.N << std::setw(14) << to_decimal(r.taylor_error, digits)
        << std::setw(26) << detail::error_text(r.error_plus, digits) << std::setw(26)
        << detail::error_text(r.error_minus, digits) << std::setw(26) << detail::error_text(r.error_average, digits)
        << '\n';
  return out.str();
}

}  // namespace tfsolve
