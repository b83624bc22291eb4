#pragma once

// Chebyshev collocation for the magnetic equation on z in [0, 1] with
// x = x0 z^2 and v = sqrt(u):
//   z v v'' + z v'^2 - v v' - lambda z^4 v = 0,  lambda = 2 x0^(5/2),
//   v(0) = 1, v(1) = 0, v'(1) = 0.
// Large N solves for (lambda, a_0..a_N) in the free basis sum a_n T_n(2z-1);
// small N uses the basis (z-1)^2 {1 + sum d_n [T_n + T_{n-1}](2z-1)} that
// carries all three boundary conditions.

#include "tfsolve/linalg.hpp"
#include "tfsolve/polynomial.hpp"
#include "tfsolve/reference.hpp"
#include "tfsolve/roots.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tfsolve {

enum class ChebBasis { Free, Embedded };

inline std::string to_string(ChebBasis b) { return b == ChebBasis::Free ? "free" : "embedded"; }

struct ChebSolution {
  int N = 0;
  ChebBasis basis = ChebBasis::Free;
  Real x0;
  Real lambda;
  std::vector<Real> coefficients;  // a_0..a_N (free) or d_1..d_N (embedded)
  Real residual_norm;              // max |residual| over the N+1 Chebyshev-Gauss check points
  std::optional<Real> mu;
  int iterations = 0;
  std::vector<Real> update_norms;
  bool physical = false;
};

/// Small-N collocation points z_j = (1 + cos(pi j/(N+2)))/2, j = 1..N+1.
inline std::vector<Real> collocation_grid(int N, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const Real pi = boost::math::constants::pi<Real>();
  std::vector<Real> z;
  for (int j = 1; j <= N + 1; ++j) z.push_back((1 + cos(pi * j / (N + 2))) / 2);
  return z;
}

/// Interior Chebyshev-Lobatto points of degree N, z_j = (1 + cos(pi j/N))/2,
/// j = 1..N-1.
inline std::vector<Real> lobatto_interior(int N, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const Real pi = boost::math::constants::pi<Real>();
  std::vector<Real> z;
  for (int j = 1; j <= N - 1; ++j) z.push_back((1 + cos(pi * j / N)) / 2);
  return z;
}

namespace detail {

inline std::vector<Real> gauss_check_points(int N) {
  const Real pi = boost::math::constants::pi<Real>();
  std::vector<Real> z;
  for (int j = 0; j <= N; ++j) z.push_back((1 + cos(pi * (2 * j + 1) / (2 * N + 2))) / 2);
  return z;
}

/// T_n(y) and its first two y-derivatives for n = 0..n_max by the
/// three-term recurrence.
struct ChebTable {
  std::vector<Real> t, dt, d2t;
};

inline ChebTable chebyshev_table(int n_max, const Real& y) {
  ChebTable c;
  c.t.assign(n_max + 1, Real(0));
  c.dt.assign(n_max + 1, Real(0));
  c.d2t.assign(n_max + 1, Real(0));
  c.t[0] = 1;
  if (n_max >= 1) {
    c.t[1] = y;
    c.dt[1] = 1;
  }
  for (int n = 1; n < n_max; ++n) {
    c.t[n + 1] = 2 * y * c.t[n] - c.t[n - 1];
    c.dt[n + 1] = 2 * c.t[n] + 2 * y * c.dt[n] - c.dt[n - 1];
    c.d2t[n + 1] = 4 * c.dt[n] + 2 * y * c.d2t[n] - c.d2t[n - 1];
  }
  return c;
}

/// Value and z-derivatives of one basis function at a point.
struct Jet {
  Real v, d1, d2;
};

/// Basis jets at z: free basis T_n(2z-1), n = 0..N, or embedded basis
/// (z-1)^2 [T_n + T_{n-1}](2z-1), n = 1..N, plus its fixed part (z-1)^2.
inline std::vector<Jet> basis_jets(ChebBasis basis, int N, const Real& z, Jet& offset) {
  auto c = chebyshev_table(N, 2 * z - 1);
  std::vector<Jet> out;
  if (basis == ChebBasis::Free) {
    offset = {Real(0), Real(0), Real(0)};
    for (int n = 0; n <= N; ++n) out.push_back({c.t[n], 2 * c.dt[n], 4 * c.d2t[n]});
    return out;
  }
  const Real w = (z - 1) * (z - 1), dw = 2 * (z - 1);
  offset = {w, dw, Real(2)};
  for (int n = 1; n <= N; ++n) {
    Real s = c.t[n] + c.t[n - 1], ds = 2 * (c.dt[n] + c.dt[n - 1]), d2s = 4 * (c.d2t[n] + c.d2t[n - 1]);
    out.push_back({w * s, dw * s + w * ds, 2 * s + 2 * dw * ds + w * d2s});
  }
  return out;
}

inline Jet combine(const std::vector<Jet>& jets, const Jet& offset, const std::vector<Real>& c) {
  Jet v = offset;
  for (std::size_t n = 0; n < jets.size(); ++n) {
    v.v += c[n] * jets[n].v;
    v.d1 += c[n] * jets[n].d1;
    v.d2 += c[n] * jets[n].d2;
  }
  return v;
}

inline Real equation_residual(const Real& z, const Jet& v, const Real& lambda) {
  return z * v.v * v.d2 + z * v.d1 * v.d1 - v.v * v.d1 - lambda * pow(z, 4) * v.v;
}

struct System {
  std::vector<Real> F;
  Matrix<Real> J;
};

/// Residuals and Jacobian for unknowns (lambda, c_0, c_1, ...).
inline System assemble(ChebBasis basis, int N, const std::vector<Real>& points, const Real& lambda,
                       const std::vector<Real>& c) {
  const std::size_t m = c.size() + 1;
  System s{std::vector<Real>(), Matrix<Real>(m, m)};
  std::size_t row = 0;
  for (const auto& z : points) {
    Jet off;
    auto jets = basis_jets(basis, N, z, off);
    Jet v = combine(jets, off, c);
    s.F.push_back(equation_residual(z, v, lambda));
    const Real z4 = pow(z, 4);
    s.J(row, 0) = -z4 * v.v;
    for (std::size_t n = 0; n < jets.size(); ++n) {
      const Jet& p = jets[n];
      s.J(row, n + 1) = z * (p.v * v.d2 + v.v * p.d2) + 2 * z * v.d1 * p.d1 - (p.v * v.d1 + v.v * p.d1) - lambda * z4 * p.v;
    }
    ++row;
  }
  if (basis == ChebBasis::Free) {
    // v(0) = 1, v(1) = 0, v'(1) = 0 with T_n(-1) = (-1)^n, T_n(1) = 1,
    // T_n'(1) = n^2.
    Real at0 = -1, at1 = 0, d_at1 = 0;
    for (std::size_t n = 0; n < c.size(); ++n) {
      const long sign = n % 2 == 0 ? 1 : -1;
      const long nn = static_cast<long>(n * n);
      at0 += c[n] * sign;
      at1 += c[n];
      d_at1 += c[n] * nn;
      s.J(row, n + 1) = sign;
      s.J(row + 1, n + 1) = 1;
      s.J(row + 2, n + 1) = nn;
    }
    s.F.push_back(at0);
    s.F.push_back(at1);
    s.F.push_back(d_at1);
  }
  return s;
}

inline Real max_norm(const std::vector<Real>& v) {
  Real m = 0;
  for (const auto& x : v) m = max(m, abs(x));
  return m;
}

struct NewtonOutcome {
  Real lambda;
  std::vector<Real> c;
  int iterations = 0;
  std::vector<Real> update_norms;
  bool converged = false;
};

/// Newton with step halving on residual growth (at most 8 halvings).
inline NewtonOutcome newton(ChebBasis basis, int N, const std::vector<Real>& points, Real lambda, std::vector<Real> c,
                            const Real& tol, int max_iter, const PrecisionContext& ctx) {
  NewtonOutcome out;
  auto sys = assemble(basis, N, points, lambda, c);
  Real fnorm = max_norm(sys.F);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Real> rhs(sys.F.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -sys.F[i];
    auto delta = solve_linear(sys.J, rhs, ctx);
    Real step = 1;
    Real new_lambda;
    std::vector<Real> new_c(c.size());
    System trial;
    Real tnorm;
    for (int halving = 0;; ++halving) {
      new_lambda = lambda + step * delta[0];
      for (std::size_t n = 0; n < c.size(); ++n) new_c[n] = c[n] + step * delta[n + 1];
      trial = assemble(basis, N, points, new_lambda, new_c);
      tnorm = max_norm(trial.F);
      if (tnorm <= fnorm || halving == 8) break;
      step /= 2;
    }
    Real unorm = max_norm(delta) * step;
    out.update_norms.push_back(unorm);
    lambda = new_lambda;
    c = new_c;
    sys = std::move(trial);
    fnorm = tnorm;
    out.iterations = it + 1;
    if (unorm < tol) {
      out.converged = true;
      break;
    }
    if (!isfinite(unorm) || unorm > Real(1e12)) break;
  }
  out.lambda = lambda;
  out.c = std::move(c);
  return out;
}

inline Real lambda_to_x0(const Real& lambda) { return pow(lambda / 2, Real(2) / 5); }

}  // namespace detail

/// v, v' or v'' at z in [0, 1].
inline Real cheb_eval(const ChebSolution& sol, const Real& z, int derivative_order = 0) {
  if (derivative_order < 0 || derivative_order > 2) throw ValidationError("derivative_order must be 0, 1 or 2");
  if (z < 0 || z > 1) throw ValidationError("cheb_eval needs z in [0, 1]");
  detail::Jet off;
  auto jets = detail::basis_jets(sol.basis, sol.N, z, off);
  auto v = detail::combine(jets, off, sol.coefficients);
  return derivative_order == 0 ? v.v : derivative_order == 1 ? v.d1 : v.d2;
}

/// Residual of the transformed equation at z for a solution.
inline Real cheb_residual(const ChebSolution& sol, const Real& z) {
  detail::Jet off;
  auto jets = detail::basis_jets(sol.basis, sol.N, z, off);
  return detail::equation_residual(z, detail::combine(jets, off, sol.coefficients), sol.lambda);
}

/// u'(0) = v''(0)/x0.
inline Real slope_from_cheb(const ChebSolution& sol) { return cheb_eval(sol, Real(0), 2) / sol.x0; }

namespace detail {

inline Real check_residual(const ChebSolution& sol) {
  Real m = 0;
  for (const auto& z : gauss_check_points(sol.N)) m = max(m, abs(cheb_residual(sol, z)));
  return m;
}

}  // namespace detail

/// Least-squares slope of -ln|c_n| against n over the coefficients above
/// ten times the floor.
inline Real decay_rate(const std::vector<Real>& coefficients, const Real& floor, std::size_t first = 1) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t n = first; n < coefficients.size(); ++n) {
    if (abs(coefficients[n]) <= 10 * floor) continue;
    double x = static_cast<double>(n), y = static_cast<double>(log(abs(coefficients[n])));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 3) throw ValidationError("decay_rate: fewer than three usable coefficients");
  double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return Real(-slope);
}

/// Decay rate of a solved free-basis expansion, fitted over n >= 10 to skip
/// the non-geometric head.
inline Real decay_rate(const ChebSolution& sol, const PrecisionContext& ctx) {
  if (sol.basis != ChebBasis::Free || sol.N < 20) throw ValidationError("decay_rate needs a free-basis solution with N >= 20");
  Real scale = 0;
  for (const auto& a : sol.coefficients) scale = max(scale, abs(a));
  return decay_rate(sol.coefficients, Real(scale * ctx.epsilon()), 10);
}

namespace detail {

/// Physical-branch test for a free-basis solution: lambda > 0, v positive
/// and decreasing at interior check points, and |a_N| below 10^(-N/4) of
/// the leading coefficients.
inline bool plausible(const ChebSolution& s) {
  if (!(s.lambda > 0)) return false;
  Real prev = 2;
  for (int j = 1; j < 40; ++j) {
    Real z = Real(j) / 40;
    Real v = cheb_eval(s, z), dv = cheb_eval(s, z, 1);
    if (!(v > 0) || !(v < prev) || !(dv < 0)) return false;
    prev = v;
  }
  Real head = abs(s.coefficients[0]) + abs(s.coefficients[1]);
  return abs(s.coefficients.back()) < head * pow(Real(10), -Real(s.N) / 4);
}

inline ChebSolution free_solution(int N, const NewtonOutcome& r) {
  ChebSolution s;
  s.N = N;
  s.basis = ChebBasis::Free;
  s.lambda = r.lambda;
  s.x0 = r.lambda > 0 ? lambda_to_x0(r.lambda) : Real(0);
  s.coefficients = r.c;
  s.iterations = r.iterations;
  s.update_norms = r.update_norms;
  return s;
}

inline constexpr int kCoarseN = 12;

}  // namespace detail

/// Newton-collocation solve for (lambda, a_0..a_N). Starts from v = (z-1)^2
/// and lambda = 2 x0^(5/2) at N = 12 in a 30-digit context, trying x0 values
/// fanning out from the guess across [2, 6] in steps of 1/4 until a root
/// passes the physical-branch test; that root is then padded with zeros
/// and refined at N and full precision.
inline ChebSolution cheb_solve(int N, const PrecisionContext& ctx, const Real& x0_guess = Real(3)) {
  if (N < 4) throw ValidationError("cheb_solve needs N >= 4");
  if (x0_guess < 2 || x0_guess > 6) throw ValidationError("x0_guess must lie in [2, 6]");
  PrecisionScope scope(ctx);
  const int nc = std::min(N, detail::kCoarseN);
  const PrecisionContext coarse(std::min(30u, ctx.requested_digits()));
  std::vector<Real> starts{x0_guess};
  for (int k = 1; k <= 16; ++k)
    for (int sign : {1, -1}) {
      Real x = x0_guess + sign * Real(k) / 4;
      if (x >= 2 && x <= 6) starts.push_back(x);
    }
  std::optional<ChebSolution> seed;
  std::vector<std::string> tried;
  for (const auto& x0s : starts) {
    PrecisionScope cs(coarse);
    // (z-1)^2 = 3/8 - T_1/2 + T_2/8 in y = 2z - 1
    std::vector<Real> a(nc + 1, Real(0));
    a[0] = Real(3) / 8;
    a[1] = Real(-1) / 2;
    a[2] = Real(1) / 8;
    detail::NewtonOutcome r;
    try {
      r = detail::newton(ChebBasis::Free, nc, lobatto_interior(nc, coarse), Real(2 * pow(Real(x0s), Real(5) / 2)), a,
                         coarse.tolerance(), 60, coarse);
    } catch (const SingularMatrixError&) {
      continue;
    }
    auto cand = detail::free_solution(nc, r);
    if (r.converged && detail::plausible(cand)) {
      seed = cand;
      break;
    }
    tried.push_back(to_decimal(Real(x0s), 4) + (r.converged ? " (lambda " + to_decimal(r.lambda, 6) + ")" : " (diverged)"));
  }
  if (!seed) {
    std::string msg = "cheb_solve: no physical root from starts";
    for (const auto& t : tried) msg += " " + t;
    throw ConvergenceError(msg);
  }
  std::vector<Real> a(N + 1, Real(0));
  for (int n = 0; n <= nc; ++n) a[n] = ctx.lift(seed->coefficients[n]);
  auto r = detail::newton(ChebBasis::Free, N, lobatto_interior(N, ctx), ctx.lift(seed->lambda), a, ctx.tolerance(), 60,
                          ctx);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "cheb_solve: Newton did not converge; update norms:";
    for (const auto& u : r.update_norms) msg << ' ' << to_decimal(u, 3);
    throw ConvergenceError(msg.str());
  }
  auto sol = detail::free_solution(N, r);
  sol.iterations += seed->iterations;
  sol.residual_norm = detail::check_residual(sol);
  if (N >= 20) sol.mu = decay_rate(sol, ctx);
  sol.physical = detail::plausible(sol);
  return sol;
}

/// Real roots of a real polynomial: critical points of the derivative
/// split the line into monotone pieces, each bracketed and refined.
inline std::vector<Real> real_roots(const Polynomial<Real>& p, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  const int d = p.degree();
  if (d < 1) return {};
  const auto& c = p.coefficients();
  if (d == 1) return {Real(-c[0] / c[1])};
  Real bound = 0;
  for (int i = 0; i < d; ++i) bound = max(bound, abs(c[i] / c[d]));
  bound += 1;
  std::vector<Real> cuts{-bound};
  for (const auto& r : real_roots(p.derivative(), ctx))
    if (r > -bound && r < bound) cuts.push_back(r);
  cuts.push_back(bound);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Real> roots;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Real fa = p(cuts[i]), fb = p(cuts[i + 1]);
    if (fa == 0) {
      if (roots.empty() || roots.back() != cuts[i]) roots.push_back(cuts[i]);
      continue;
    }
    if (detail::opposite_signs(fa, fb)) roots.push_back(find_root([&](const Real& x) { return p(x); }, {cuts[i], cuts[i + 1]}, ctx));
  }
  if (p(cuts.back()) == 0) roots.push_back(cuts.back());
  return roots;
}

/// Exact N = 1 collocation residuals at z = 1/4 and 3/4 as quadratics in
/// d_1 with coefficients linear in lambda, and their resultant in lambda.
inline Polynomial<Rational> small_n_eliminant() {
  using P = Polynomial<Rational>;
  // v = (z-1)^2 (1 + 2 d z): residual = A d^2 + B d + C with
  // A, B, C polynomials in lambda.
  auto residual_parts = [](const Rational& z) {
    const Rational w = (z - 1) * (z - 1), dw = 2 * (z - 1), d2w = 2;
    // basis pieces: f0 = w, f1 = 2 z w
    const Rational f0 = w, f0p = dw, f0pp = d2w;
    const Rational f1 = 2 * z * w, f1p = 2 * w + 2 * z * dw, f1pp = 4 * dw + 2 * z * d2w;
    auto bil = [&](const Rational& a, const Rational& ap, const Rational& app, const Rational& b, const Rational& bp,
                   const Rational& bpp) { return z * a * bpp + z * ap * bp - a * bp; };
    const Rational z4 = z * z * z * z;
    Rational A = bil(f1, f1p, f1pp, f1, f1p, f1pp);
    Rational Bc = bil(f0, f0p, f0pp, f1, f1p, f1pp) + bil(f1, f1p, f1pp, f0, f0p, f0pp);
    Rational Cc = bil(f0, f0p, f0pp, f0, f0p, f0pp);
    P B{Bc, -z4 * f1};
    P C{Cc, -z4 * f0};
    return std::tuple{P{A}, B, C};
  };
  auto [A1, B1, C1] = residual_parts(Rational(1, 4));
  auto [A2, B2, C2] = residual_parts(Rational(3, 4));
  P ac = A1 * C2 - A2 * C1;
  return ac * ac - (A1 * B2 - A2 * B1) * (B1 * C2 - B2 * C1);
}

namespace detail {

inline ChebSolution embedded_solution(int N, const Real& lambda, std::vector<Real> d, const NewtonOutcome& r) {
  ChebSolution s;
  s.N = N;
  s.basis = ChebBasis::Embedded;
  s.lambda = lambda;
  s.x0 = lambda > 0 ? lambda_to_x0(lambda) : Real(0);
  s.coefficients = std::move(d);
  s.iterations = r.iterations;
  s.update_norms = r.update_norms;
  s.residual_norm = check_residual(s);
  return s;
}

}  // namespace detail

/// All solutions of the small-N embedded-basis collocation system found by
/// Newton from a deterministic lattice of starts (lambda in [-100, 2000],
/// d_n in [-4, 4]), deduplicated and polished at full precision. The
/// physical one is marked: nearest to `known_x0` when given, otherwise the
/// smallest residual norm among positive lambda. Finding every solution is
/// best effort.
inline std::vector<ChebSolution> cheb_solve_smallN(int N, const PrecisionContext& ctx,
                                                   std::optional<Real> known_x0 = std::nullopt) {
  if (N < 1 || N > 4) throw ValidationError("cheb_solve_smallN needs 1 <= N <= 4");
  PrecisionScope scope(ctx);
  const PrecisionContext coarse(10);
  const auto points_coarse = collocation_grid(N, coarse);
  const auto points = collocation_grid(N, ctx);
  const std::vector<double> lambdas{-100, -30, 0, 30, 100, 300, 1000, 2000};
  const std::vector<double> ds{-4, -2, 0, 2, 4};
  std::vector<std::pair<Real, std::vector<Real>>> found;
  std::vector<int> idx(N, 0);
  while (true) {
    for (double l0 : lambdas) {
      std::vector<Real> d(N);
      for (int n = 0; n < N; ++n) d[n] = ds[idx[n]];
      detail::NewtonOutcome r;
      {
        PrecisionScope cs(coarse);
        try {
          r = detail::newton(ChebBasis::Embedded, N, points_coarse, Real(l0), d, coarse.pow10(-15), 25, coarse);
        } catch (const SingularMatrixError&) {
          continue;
        }
      }
      if (!r.converged) continue;
      bool dup = false;
      for (const auto& [l, dd] : found) {
        Real diff = abs(l - r.lambda) / max(Real(1), abs(l));
        for (int n = 0; n < N; ++n) diff = max(diff, abs(dd[n] - r.c[n]));
        if (diff < Real(1e-8)) {
          dup = true;
          break;
        }
      }
      if (!dup) found.push_back({r.lambda, r.c});
    }
    int k = 0;
    while (k < N && ++idx[k] == static_cast<int>(ds.size())) idx[k++] = 0;
    if (k == N) break;
  }
  std::vector<ChebSolution> out;
  for (const auto& [l, d] : found) {
    std::vector<Real> dl;
    for (const auto& x : d) dl.push_back(ctx.lift(x));
    auto r = detail::newton(ChebBasis::Embedded, N, points, ctx.lift(l), dl, ctx.tolerance(), 60, ctx);
    if (!r.converged) continue;
    out.push_back(detail::embedded_solution(N, r.lambda, r.c, r));
  }
  if (out.empty()) throw ConvergenceError("cheb_solve_smallN: no real solution found");
  std::sort(out.begin(), out.end(), [](const ChebSolution& a, const ChebSolution& b) { return a.lambda < b.lambda; });
  std::size_t best = 0;
  bool have = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].lambda <= 0) continue;
    bool better;
    if (!have) {
      better = true;
    } else if (known_x0) {
      better = abs(out[i].x0 - *known_x0) < abs(out[best].x0 - *known_x0);
    } else {
      better = out[i].residual_norm < out[best].residual_norm;
    }
    if (better) {
      best = i;
      have = true;
    }
  }
  if (have) out[best].physical = true;
  return out;
}

/// Coefficient dump as (n, a_n) decimal strings.
inline nlohmann::json to_json(const ChebSolution& s, unsigned digits) {
  nlohmann::json coeffs = nlohmann::json::array();
  const int first = s.basis == ChebBasis::Free ? 0 : 1;
  for (std::size_t i = 0; i < s.coefficients.size(); ++i)
    coeffs.push_back({{"n", static_cast<int>(i) + first}, {"value", to_decimal(s.coefficients[i], digits)}});
  nlohmann::json j{{"N", s.N},
                   {"basis", to_string(s.basis)},
                   {"lambda", to_decimal(s.lambda, digits)},
                   {"residual_norm", to_decimal(s.residual_norm, 6)},
                   {"iterations", s.iterations},
                   {"physical", s.physical},
                   {"coefficients", coeffs}};
  j["x0"] = s.lambda > 0 ? nlohmann::json(to_decimal(s.x0, digits)) : nlohmann::json(nullptr);
  j["slope"] = s.lambda > 0 ? nlohmann::json(to_decimal(slope_from_cheb(s), digits)) : nlohmann::json(nullptr);
  j["mu"] = s.mu ? nlohmann::json(to_decimal(*s.mu, 6)) : nlohmann::json(nullptr);
  return j;
}

inline std::string to_text(const ChebSolution& s, unsigned digits) {
  std::ostringstream out;
  out << "N = " << s.N << " (" << to_string(s.basis) << " basis)\n";
  if (s.lambda > 0) out << "x0 = " << to_decimal(s.x0, digits) << "\n";
  if (s.lambda > 0) out << "u'(0) = " << to_decimal(slope_from_cheb(s), digits) << "\n";
  out << "lambda = " << to_decimal(s.lambda, digits) << "\n";
  if (s.mu) out << "decay rate = " << to_decimal(*s.mu, 6) << "\n";
  out << "residual = " << to_decimal(s.residual_norm, 3) << "\n";
  const int first = s.basis == ChebBasis::Free ? 0 : 1;
  for (std::size_t i = 0; i < s.coefficients.size(); ++i)
    out << std::setw(4) << static_cast<int>(i) + first << "  " << to_decimal(s.coefficients[i], digits) << "\n";
  return out.str();
}

}  // namespace tfsolve
