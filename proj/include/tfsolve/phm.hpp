#pragma once

// Pade-Hankel method: roots of Hankel determinants built from the
// coefficients of v(t) = sqrt(u(t^2)) as functions of the slope a.

#include "tfsolve/linalg.hpp"
#include "tfsolve/roots.hpp"
#include "tfsolve/series.hpp"

#include <json.hpp>

#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace tfsolve {

struct HankelSpec {
  EquationKind kind = EquationKind::Atom;
  int d = 0;
  int D = 2;

  /// Highest series index the determinant touches.
  int series_order() const { return 2 * D + d - 1; }
};

template <class T>
Matrix<T> hankel_matrix(const HankelSpec& spec, const T& a) {
  if (spec.D < 1 || spec.d < 0) throw ValidationError("Hankel spec needs D >= 1 and d >= 0");
  auto v = origin_series_v(spec.kind, a, std::max(4, spec.series_order()));
  Matrix<T> m(spec.D, spec.D, detail::from_int<T>(0));
  for (int i = 0; i < spec.D; ++i)
    for (int j = 0; j < spec.D; ++j) m(i, j) = v[i + j + spec.d + 1];
  return m;
}

/// Exact determinant at a rational slope.
inline Rational hankel_value_exact(const HankelSpec& spec, const Rational& a) {
  return determinant(hankel_matrix(spec, a));
}

/// Determinant at complex slope (used by the root tracker).
inline ComplexReal hankel_value(const HankelSpec& spec, const ComplexReal& a, const PrecisionContext& ctx) {
  PrecisionScope scope(ctx);
  ComplexReal lifted{ctx.lift(a.re), ctx.lift(a.im)};
  return determinant(hankel_matrix(spec, lifted), ctx);
}

namespace detail {

inline Real hadamard_bound(const Matrix<Real>& m) {
  Real bound = 1;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Real row = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) row += m(i, j) * m(i, j);
    bound *= sqrt(row);
  }
  return bound;
}

}  // namespace detail

/// Determinant at real slope a. With `check_precision`, the value is
/// recomputed with 20 extra guard digits and PrecisionStarvedError is
/// thrown when the two disagree by more than 10^-requested relative to
/// the wider value.
inline Real hankel_value(const HankelSpec& spec, const Real& a, const PrecisionContext& ctx,
                         bool check_precision = false) {
  PrecisionScope scope(ctx);
  auto m = hankel_matrix(spec, ctx.lift(a));
  Real h = determinant(m, ctx);
  if (check_precision) {
    PrecisionContext wide = ctx.with_extra_digits(20);
    PrecisionScope wscope(wide);
    auto mw = hankel_matrix(spec, wide.lift(a));
    Real hw = determinant(mw, wide);
    if (abs(h - hw) > wide.tolerance() * abs(hw))
      throw PrecisionStarvedError("Hankel determinant D=" + std::to_string(spec.D) + " d=" + std::to_string(spec.d) +
                                  " lost its digits at " + std::to_string(ctx.working_digits()) +
                                  " working digits; raise the working precision");
  }
  return h;
}

struct HankelRoot {
  Real value;      // real part
  Real imag{0};    // imaginary part, zero when the root is real
  int iterations = 0;
};

/// Root in a bracket with a sign change.
inline HankelRoot hankel_root(const HankelSpec& spec, const Bracket& bracket, const PrecisionContext& ctx) {
  auto f = [&](const Real& a) { return hankel_value(spec, a, ctx); };
  return {find_root(f, bracket, ctx), Real(0), 0};
}

/// Root nearest `guess` by secant iteration in complex arithmetic. The
/// second starting point is offset by `step` along the imaginary axis so
/// that the iteration can follow a root that has left the real axis.
inline HankelRoot hankel_root(const HankelSpec& spec, const Real& guess, const PrecisionContext& ctx,
                              const Real& step = Real(1e-4), int max_iter = 200) {
  PrecisionScope scope(ctx);
  ComplexReal x0(ctx.lift(guess)), x1(ctx.lift(guess), ctx.lift(step));
  ComplexReal f0 = hankel_value(spec, x0, ctx), f1 = hankel_value(spec, x1, ctx);
  const Real tol = ctx.pow10(-static_cast<int>(ctx.requested_digits()) - 5);
  for (int it = 1; it <= max_iter; ++it) {
    ComplexReal df = f1 - f0;
    if (abs(df) == 0) {
      if (abs(f1) == 0) return {x1.re, x1.im, it};
      throw ConvergenceError("secant stalled on a flat Hankel determinant at D=" + std::to_string(spec.D));
    }
    ComplexReal x2 = x1 - f1 * (x1 - x0) / df;
    Real change = abs(x2 - x1);
    x0 = x1;
    f0 = f1;
    x1 = x2;
    f1 = hankel_value(spec, x1, ctx);
    if (change <= tol * abs(x1) || abs(f1) == 0) {
      if (abs(x1.im) <= tol * abs(x1)) x1.im = 0;
      return {x1.re, x1.im, it};
    }
  }
  throw ConvergenceError("no Hankel root near " + to_decimal(guess, 20) + " at D=" + std::to_string(spec.D) +
                         " d=" + std::to_string(spec.d));
}

struct RootSequence {
  EquationKind kind = EquationKind::Atom;
  int d = 0;
  std::vector<int> dims;
  std::vector<Real> roots;
  std::vector<Real> imag_parts;
  std::vector<int> agreed_digits;  // vs the previous D; -1 for the first entry
  std::vector<int> skipped;        // degenerate dimensions without a root in the start bracket
  Real estimate;
  int estimate_digits = 0;
};

namespace detail {

/// Rounds x to `digits` significant decimal digits.
inline Real round_significant(const Real& x, int digits) {
  if (digits <= 0 || x == 0) return x;
  return Real(x.str(digits));
}

inline const Bracket& phm_start_bracket() {
  static const Bracket b{Real(-3), Real(Rational(-1, 2))};
  return b;
}

/// Sign-change scan of the start bracket; returns the sign change
/// nearest `target` (default: the bracket centre), if any.
inline std::optional<Bracket> scan_start_bracket(const HankelSpec& spec, const PrecisionContext& ctx, int samples = 250,
                                                 std::optional<Real> target = std::nullopt) {
  PrecisionScope scope(ctx);
  const Bracket& b = phm_start_bracket();
  Real lo = ctx.lift(b.lo), hi = ctx.lift(b.hi);
  Real centre = target ? ctx.lift(*target) : Real((lo + hi) / 2);
  std::optional<Bracket> best;
  Real prev_x = lo, prev_f = hankel_value(spec, lo, ctx);
  for (int i = 1; i <= samples; ++i) {
    Real x = lo + (hi - lo) * i / samples;
    Real f = hankel_value(spec, x, ctx);
    if (opposite_signs(prev_f, f) || f == 0) {
      Real mid = (prev_x + x) / 2;
      if (!best || abs(mid - centre) < abs((best->lo + best->hi) / 2 - centre)) best = Bracket{prev_x, x};
    }
    prev_x = x;
    prev_f = f;
  }
  return best;
}

}  // namespace detail

/// Root sequence over D = 2..D_max at fixed d. The first non-degenerate
/// D is located by a sign-change scan of [-3, -1/2]; each later D is
/// seeded with the previous root. If that secant run fails or leaves the
/// scan bracket, the bracket is rescanned for the sign change nearest the
/// previous root. Three consecutive drops in agreed digits abort with
/// ConvergenceError.
inline RootSequence critical_slope_phm(EquationKind kind, int d, int D_max, const PrecisionContext& ctx) {
  if (D_max < 3) throw ValidationError("critical_slope_phm needs D_max >= 3");
  if (d < 0) throw ValidationError("Hankel offset d must be non-negative");
  PrecisionScope scope(ctx);
  RootSequence seq;
  seq.kind = kind;
  seq.d = d;
  int drops = 0;
  for (int D = 2; D <= D_max; ++D) {
    HankelSpec spec{kind, d, D};
    HankelRoot r;
    if (seq.roots.empty()) {
      auto bracket = detail::scan_start_bracket(spec, ctx);
      if (!bracket) {
        seq.skipped.push_back(D);
        continue;
      }
      r = hankel_root(spec, *bracket, ctx);
    } else {
      Real step = seq.roots.size() >= 2 ? Real(abs(seq.roots.back() - seq.roots[seq.roots.size() - 2])) : Real(1e-3);
      step = std::max(Real(std::min(step, Real(1e-2))), ctx.pow10(-static_cast<int>(ctx.requested_digits())));
      std::optional<HankelRoot> tracked;
      try {
        tracked = hankel_root(spec, seq.roots.back(), ctx, step);
        const Bracket& b = detail::phm_start_bracket();
        if (tracked->value < b.lo || tracked->value > b.hi) tracked.reset();
      } catch (const ConvergenceError&) {
      }
      if (tracked) {
        r = *tracked;
      } else {
        auto bracket = detail::scan_start_bracket(spec, ctx, 250, seq.roots.back());
        if (!bracket) {
          seq.skipped.push_back(D);
          continue;
        }
        r = hankel_root(spec, *bracket, ctx);
      }
    }
    int agreed = seq.roots.empty() ? -1 : agreed_digits(r.value, seq.roots.back(), ctx.working_digits());
    if (!seq.agreed_digits.empty() && seq.agreed_digits.back() >= 0 && agreed < seq.agreed_digits.back())
      ++drops;
    else
      drops = 0;
    seq.dims.push_back(D);
    seq.roots.push_back(r.value);
    seq.imag_parts.push_back(r.imag);
    seq.agreed_digits.push_back(agreed);
    if (drops >= 3) {
      std::ostringstream msg;
      msg << "PHM sequence (" << to_string(kind) << ", d=" << d << ") is not converging: agreed digits fell three "
          << "times in a row up to D=" << D << "; last roots";
      for (std::size_t i = seq.roots.size() >= 4 ? seq.roots.size() - 4 : 0; i < seq.roots.size(); ++i)
        msg << ' ' << to_decimal(seq.roots[i], 20);
      throw ConvergenceError(msg.str());
    }
  }
  if (seq.roots.empty()) throw NoBracketError("no Hankel root found for any D up to " + std::to_string(D_max));
  seq.estimate_digits = std::max(0, seq.agreed_digits.back());
  seq.estimate = detail::round_significant(seq.roots.back(), seq.estimate_digits);
  return seq;
}

/// Estimate from two sequences with different d: digits on which their
/// final roots agree, value from the sequence with the better internal
/// agreement.
struct CombinedEstimate {
  Real value;
  int digits = 0;
};

inline CombinedEstimate combine_sequences(const RootSequence& a, const RootSequence& b) {
  int cross = agreed_digits(a.roots.back(), b.roots.back());
  const RootSequence& best = a.agreed_digits.back() >= b.agreed_digits.back() ? a : b;
  return {detail::round_significant(best.roots.back(), cross), cross};
}

inline nlohmann::json to_json(const RootSequence& s, unsigned digits = 30) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < s.roots.size(); ++i) {
    nlohmann::json row{{"D", s.dims[i]}, {"root", to_decimal(s.roots[i], digits)}};
    row["agreed_digits"] = s.agreed_digits[i] < 0 ? nlohmann::json(nullptr) : nlohmann::json(s.agreed_digits[i]);
    if (s.imag_parts[i] != 0) row["imag"] = to_decimal(s.imag_parts[i], 6);
    rows.push_back(row);
  }
  return {{"equation", to_string(s.kind)},
          {"d", s.d},
          {"skipped_D", s.skipped},
          {"rows", rows},
          {"estimate", to_decimal(s.estimate, std::max(1, s.estimate_digits))},
          {"estimate_digits", s.estimate_digits}};
}

inline std::string to_text(const RootSequence& s, unsigned digits = 30) {
  std::ostringstream out;
  out << "# PHM " << to_string(s.kind) << " d=" << s.d << "\n";
  out << std::setw(4) << "D" << "  " << std::left << std::setw(digits + 8) << "root" << std::right << "agreed\n";
  for (std::size_t i = 0; i < s.roots.size(); ++i) {
    out << std::setw(4) << s.dims[i] << "  " << std::left << std::setw(digits + 8) << to_decimal(s.roots[i], digits)
        << std::right << (s.agreed_digits[i] < 0 ? std::string("-") : std::to_string(s.agreed_digits[i]));
    if (s.imag_parts[i] != 0) out << "  (imag " << to_decimal(s.imag_parts[i], 3) << ")";
    out << "\n";
  }
  out << "estimate " << to_decimal(s.estimate, std::max(1, s.estimate_digits)) << " (" << s.estimate_digits
      << " digits)\n";
  return out.str();
}

}  // namespace tfsolve
