#pragma once

#include "tfsolve/precision.hpp"

#include <string>
#include <utility>

namespace tfsolve {

struct Bracket {
  Real lo;
  Real hi;
};

namespace detail {

inline bool opposite_signs(const Real& a, const Real& b) {
  return (a < 0 && b > 0) || (a > 0 && b < 0);
}

}  // namespace detail

/// Brent's method (bisection with inverse-quadratic/secant steps) on a
/// bracket with a sign change. Stops when the bracket is narrower than
/// 10^-(requested+3) relative to the root.
template <class F>
Real find_root(F&& f, const Bracket& bracket, const PrecisionContext& ctx, int max_iter = 1000) {
  PrecisionScope scope(ctx);
  Real a = ctx.lift(bracket.lo), b = ctx.lift(bracket.hi);
  Real fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (!detail::opposite_signs(fa, fb))
    throw NoBracketError("no sign change on [" + to_decimal(a, 12) + ", " + to_decimal(b, 12) + "]");
  const Real rel = ctx.pow10(-static_cast<int>(ctx.requested_digits()) - 3);
  const Real eps = ctx.epsilon();
  Real c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (detail::opposite_signs(fb, fc) == false) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (abs(fc) < abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    Real scale = abs(b);
    if (scale < 1) scale = 1;
    Real tol = rel * scale / 2 + eps * scale;
    Real m = (c - b) / 2;
    if (abs(m) <= tol || fb == 0) return b;
    if (abs(e) >= tol && abs(fa) > abs(fb)) {
      Real s = fb / fa, p, q;
      if (a == c) {
        p = 2 * m * s;
        q = 1 - s;
      } else {
        Real qq = fa / fc, r = fb / fc;
        p = s * (2 * m * qq * (qq - r) - (b - a) * (r - 1));
        q = (qq - 1) * (r - 1) * (s - 1);
      }
      if (p > 0)
        q = -q;
      else
        p = -p;
      if (2 * p < std::min(Real(3 * m * q - abs(tol * q)), Real(abs(e * q)))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    if (abs(d) > tol)
      b += d;
    else
      b += (m > 0 ? tol : Real(-tol));
    fb = f(b);
  }
  throw ConvergenceError("find_root: iteration cap of " + std::to_string(max_iter) + " reached");
}

/// Searches outward from `guess` (steps step, 2*step, 4*step, ... on both
/// sides) for the nearest sign change, then refines it with find_root.
template <class F>
Real find_root_near(F&& f, const Real& guess, const Real& step, const PrecisionContext& ctx,
                    int max_expansions = 40, int max_iter = 1000) {
  PrecisionScope scope(ctx);
  Real x0 = ctx.lift(guess);
  Real f0 = f(x0);
  if (f0 == 0) return x0;
  Real h = ctx.lift(step);
  Real left = x0, fleft = f0, right = x0, fright = f0;
  for (int k = 0; k < max_expansions; ++k) {
    Real xr = x0 + h, xl = x0 - h;
    Real fr = f(xr), fl = f(xl);
    if (fr == 0) return xr;
    if (fl == 0) return xl;
    bool hit_r = detail::opposite_signs(fr, fright);
    bool hit_l = detail::opposite_signs(fl, fleft);
    if (hit_l && hit_r) {
      // Sign changes on both sides at the same distance: keep the nearer root.
      Real rr = find_root(f, Bracket{right, xr}, ctx, max_iter);
      Real rl = find_root(f, Bracket{xl, left}, ctx, max_iter);
      return abs(rr - x0) <= abs(rl - x0) ? rr : rl;
    }
    if (hit_r) return find_root(f, Bracket{right, xr}, ctx, max_iter);
    if (hit_l) return find_root(f, Bracket{xl, left}, ctx, max_iter);
    left = xl;
    fleft = fl;
    right = xr;
    fright = fr;
    h *= 2;
  }
  throw NoBracketError("find_root_near: no sign change within reach of " + to_decimal(x0, 12));
}

}  // namespace tfsolve
