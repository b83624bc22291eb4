#pragma once

#include "tfsolve/cheb.hpp"
#include "tfsolve/local_models.hpp"
#include "tfsolve/phm.hpp"
#include "tfsolve/resummation.hpp"
#include "tfsolve/shooting.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace tfsolve {

struct AcceptanceOptions {
  unsigned digits = 60;  // context size; below 60 the digit thresholds scale down
};

struct CheckOutcome {
  bool pass = true;
  std::string detail;
};

struct AcceptanceCheck {
  int criterion = 0;
  std::string id;
  double budget_seconds = 0;
  std::function<CheckOutcome(const AcceptanceOptions&)> run;
};

struct CheckResult {
  int criterion = 0;
  std::string id;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  double budget_seconds = 0;
};

namespace acceptance {

/// Digit threshold n scaled by digits/60 when running below 60 digits.
inline int scaled(int n, const AcceptanceOptions& o) {
  if (o.digits >= 60) return n;
  return std::max(1, static_cast<int>(n * static_cast<long>(o.digits) / 60));
}

/// Accumulates sub-check verdicts into one line of detail.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) pass_ = false;
    parts_.push_back((ok ? "" : "FAILED ") + what);
  }
  CheckOutcome outcome() const {
    std::string d;
    for (std::size_t i = 0; i < parts_.size(); ++i) d += (i ? "; " : "") + parts_[i];
    return {pass_, d};
  }

 private:
  bool pass_ = true;
  std::vector<std::string> parts_;
};

inline std::string sci(const Real& x) { return to_decimal(x, 3); }

inline Real reference(std::string_view key, const PrecisionContext& ctx) { return ReferenceStore::value(key, ctx); }

inline CheckOutcome atom_phm(const AcceptanceOptions& o) {
  PrecisionContext ctx(o.digits);
  PrecisionScope scope(ctx);
  auto seq = critical_slope_phm(EquationKind::Atom, 3, 20, ctx);
  int got = agreed_digits(seq.roots.back(), reference("atom_slope", ctx));
  Tally t;
  t.check(got >= scaled(10, o), "d=3 D=" + std::to_string(seq.dims.back()) + " root " + to_decimal(seq.roots.back(), 20) +
                                    " agrees to " + std::to_string(got) + " digits (need " +
                                    std::to_string(scaled(10, o)) + ")");
  return t.outcome();
}

inline CheckOutcome magnetic_phm(const AcceptanceOptions& o) {
  PrecisionContext ctx(o.digits);
  PrecisionScope scope(ctx);
  const Real ref = reference("magnetic_slope", ctx);
  Tally t;
  int mag3 = 0;
  for (int d : {1, 3}) {
    auto seq = critical_slope_phm(EquationKind::Magnetic, d, 20, ctx);
    int got = agreed_digits(seq.roots.back(), ref);
    if (d == 3) mag3 = got;
    t.check(got >= scaled(15, o), "d=" + std::to_string(d) + " D=" + std::to_string(seq.dims.back()) + " " +
                                      std::to_string(got) + " digits (need " + std::to_string(scaled(15, o)) + ")");
  }
  auto atom = critical_slope_phm(EquationKind::Atom, 3, 20, ctx);
  int atom_digits = agreed_digits(atom.roots.back(), reference("atom_slope", ctx));
  t.check(mag3 > atom_digits, "magnetic d=3 beats atom d=3 at D=20 (" + std::to_string(mag3) + " vs " +
                                  std::to_string(atom_digits) + ")");
  return t.outcome();
}

inline CheckOutcome shooting(const AcceptanceOptions& o) {
  PrecisionContext ctx(o.digits);
  PrecisionScope scope(ctx);
  const int target = scaled(20, o);
  Tally t;
  for (auto kind : {EquationKind::Atom, EquationKind::Magnetic}) {
    auto r = critical_slope_shoot(kind, target, ctx);
    const Real ref = reference(kind == EquationKind::Atom ? "atom_slope" : "magnetic_slope", ctx);
    int got = agreed_digits(r.slope, ref);
    t.check(got >= target && r.final_verdict == Verdict::CriticalWithinTolerance,
            to_string(kind) + " " + to_decimal(r.slope, target + 3) + " " + std::to_string(got) + " digits, " +
                to_string(r.final_verdict));
  }
  return t.outcome();
}

inline CheckOutcome atom_table(const AcceptanceOptions& o) {
  PrecisionContext ctx(std::max(40u, o.digits));
  PrecisionScope scope(ctx);
  auto rows = ReferenceStore::atom_table();
  auto grid = uniform_grid("0", "10", static_cast<int>(rows.size()), ctx);
  auto table = tabulate(EquationKind::Atom, reference("atom_slope", ctx), grid, 14, ctx);
  Tally t;
  const auto& spot = rows[1];
  auto base = integrate(EquationKind::Atom, reference("atom_slope", ctx), Real(10), ctx, {Real(10)});
  auto printed_match = [&](const Real& v, std::string_view p) {
    std::string s(p);
    int sig = 0;
    bool started = false;
    for (char c : s.substr(0, s.find_first_of("eE"))) {
      if (c < '0' || c > '9') continue;
      if (c != '0') started = true;
      if (started) ++sig;
    }
    return to_decimal(v, sig) == to_decimal(ctx.real(s), sig);
  };
  t.check(printed_match(base.grid[0].u, spot.u) && printed_match(base.grid[0].du, spot.du),
          "u(10), u'(10) = " + to_decimal(base.grid[0].u, 14) + ", " + to_decimal(base.grid[0].du, 14));
  int mismatched = 0;
  // every printed row reproduced by the certified table at 14 digits
  int short_rows = 0;
  std::string first_short;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (table.digits[i] < 14) {
      if (short_rows++ == 0) first_short = table.x[i];
      continue;
    }
    if (!printed_match(ctx.real(table.u[i]), rows[i].u) || !printed_match(ctx.real(table.du[i]), rows[i].du))
      ++mismatched;
  }
  t.check(mismatched == 0, std::to_string(mismatched) + " certified rows differ from the printed table");
  t.check(short_rows == 0, std::to_string(short_rows) + " of " + std::to_string(rows.size()) +
                               " rows not byte-stable at 14 digits under the precision/perturbation protocol" +
                               (short_rows ? " (first at x=" + first_short + ")" : ""));
  return t.outcome();
}

inline CheckOutcome cheb_large(const AcceptanceOptions& o) {
  PrecisionContext ctx(o.digits);
  PrecisionScope scope(ctx);
  auto s = cheb_solve(60, ctx);
  Tally t;
  int xd = agreed_digits(s.x0, reference("magnetic_x0", ctx));
  int sd = agreed_digits(slope_from_cheb(s), reference("magnetic_slope_50", ctx));
  t.check(xd >= scaled(30, o), "x0 " + std::to_string(xd) + " digits");
  t.check(sd >= scaled(25, o), "u'0 " + std::to_string(sd) + " digits");
  Real worst = 0;
  auto ref = ReferenceStore::chebyshev_coefficients();
  for (std::size_t n = 0; n < ref.size(); ++n)
    worst = max(worst, Real(abs(s.coefficients[n] - ctx.real(std::string(ref[n])))));
  const int tol = std::min(14, static_cast<int>(o.digits) - 5);
  t.check(worst <= ctx.pow10(-tol), "a0..a22 max deviation " + sci(worst));
  t.check(s.mu && *s.mu >= Real(1.3) && *s.mu <= Real(1.5), "mu " + (s.mu ? to_decimal(*s.mu, 4) : "none"));
  return t.outcome();
}

inline CheckOutcome cheb_small(const AcceptanceOptions& o) {
  PrecisionContext ctx(std::min(30u, std::max(20u, o.digits)));
  PrecisionScope scope(ctx);
  Tally t;
  auto one = cheb_solve_smallN(1, ctx);
  auto roots = real_roots(convert<Real>(small_n_eliminant()), ctx);
  const ChebSolution* phys = nullptr;
  for (const auto& s : one)
    if (s.physical) phys = &s;
  bool eliminant_ok = roots.size() == 3 && one.size() == 3;
  if (eliminant_ok) {
    std::sort(roots.begin(), roots.end());
    for (int i = 0; i < 3; ++i) eliminant_ok = eliminant_ok && abs(roots[i] - one[i].lambda) < ctx.pow10(-15) * abs(roots[i]);
  }
  bool printed_cubic = true;
  auto e = small_n_eliminant();
  auto cubic = ReferenceStore::small_n_cubic();
  for (int i = 0; i <= 3; ++i) printed_cubic = printed_cubic && e.coefficient(i) == Rational(std::string(cubic[i]));
  t.check(eliminant_ok && printed_cubic, std::to_string(one.size()) + " N=1 solutions, eliminant roots " +
                                             std::to_string(roots.size()) + (printed_cubic ? ", cubic as printed" : ""));
  t.check(phys && to_decimal(phys->lambda, 7) == "34.33616" && to_decimal(phys->coefficients[0], 6) == "1.31544",
          "N=1 physical lambda " + (phys ? to_decimal(phys->lambda, 7) : "-") + " d1 " +
              (phys ? to_decimal(phys->coefficients[0], 6) : "-"));
  auto four = cheb_solve_smallN(4, ctx, reference("magnetic_x0", ctx));
  for (const auto& s : four) {
    if (!s.physical) continue;
    Real err = s.x0 - reference("magnetic_x0", ctx);
    t.check(to_decimal(err, 5) == to_decimal(ctx.real("0.19274e-4"), 5), "N=4 x0 error " + to_decimal(err, 5));
  }
  return t.outcome();
}

inline CheckOutcome shafer_table_check(const AcceptanceOptions& o) {
  PrecisionContext ctx(std::max(30u, o.digits));
  PrecisionScope scope(ctx);
  auto rows = shafer_table({10, 15, 20}, ctx);
  const double printed[] = {0.31e-7, 0.32e-11, 0.45e-15};
  Tally t;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Real avg = abs(rows[i].error_average);
    t.check(avg <= Real(printed[i] * 10) && avg >= Real(printed[i] / 10),
            "K=" + std::to_string(rows[i].K) + " average error " + sci(avg) + " vs " + to_decimal(Real(printed[i]), 2));
  }
  auto q = shafer_fit(shifted_endpoint_series(61), 20, 20, 20);
  auto found = detect_spurious_singularities(q, PrecisionContext(16));
  t.check(!found.empty(), "K=20 spurious singularity " + (found.empty() ? std::string("not found") : "at s=" + to_decimal(found[0].s, 5)));
  return t.outcome();
}

inline CheckOutcome vseries(const AcceptanceOptions& o) {
  PrecisionContext ctx(o.digits);
  PrecisionScope scope(ctx);
  const Real up = reference("magnetic_slope_50", ctx), x0 = reference("magnetic_x0", ctx);
  Tally t;
  for (auto [M, need_u, need_x] : {std::tuple{40, 9, 16}, std::tuple{80, 17, 30}}) {
    auto e = vseries_estimates(M, Acceleration::Pade, ctx);
    int du = agreed_digits(e.u0_prime, up), dx = agreed_digits(e.x0, x0);
    t.check(du >= scaled(need_u, o) && dx >= scaled(need_x, o),
            "M=" + std::to_string(M) + " u'0 " + std::to_string(du) + " x0 " + std::to_string(dx) + " digits");
  }
  return t.outcome();
}

inline CheckOutcome partial_sums(const AcceptanceOptions& o) {
  PrecisionContext ctx(std::max(30u, o.digits));
  PrecisionScope scope(ctx);
  const Real x0 = reference("magnetic_x0", ctx);
  Tally t;
  Real at61 = endpoint_x0_partial_sums(61, ctx);
  t.check(to_decimal(at61, 6) == "3.06882", "M=61 partial sum " + to_decimal(at61, 8));
  const double expected = std::pow(2.0, 2.5);
  std::string ratios;
  bool ok = true;
  for (int M : {16, 32, 64, 128}) {
    double r = static_cast<double>(abs(endpoint_x0_partial_sums(M, ctx) - x0) / abs(endpoint_x0_partial_sums(2 * M, ctx) - x0));
    ok = ok && r >= expected / 2 && r <= expected * 2;
    std::ostringstream s;
    s << std::setprecision(3) << r;
    ratios += (ratios.empty() ? "" : ",") + s.str();
  }
  t.check(ok, "error ratios M/2M = " + ratios + " (M^-5/2 gives 5.66)");
  return t.outcome();
}

inline CheckOutcome properties(const AcceptanceOptions& o) {
  PrecisionContext ctx(o.digits);
  PrecisionScope scope(ctx);
  Tally t;
  const Real atom_a = reference("atom_slope", ctx), mag_a = reference("magnetic_slope", ctx);

  {  // origin and local series: residual at |local variable| = 0.1 shrinks >= 5x per two orders
    bool ok = true;
    for (auto kind : {EquationKind::Atom, EquationKind::Magnetic}) {
      const Real a = kind == EquationKind::Atom ? atom_a : mag_a, x = ctx.real("0.1");
      Real prev = -1;
      for (int order : {6, 8, 10}) {
        auto s = origin_series_u(kind, a, Rational(order));
        Real u = s.evaluate(x), upp = s.evaluate(x, 2);
        Real rhs = kind == EquationKind::Atom ? Real(pow(u, Real(1.5)) / sqrt(x)) : Real(sqrt(x * u));
        Real r = abs(upp - rhs);
        if (prev > 0 && !(r * 5 < prev)) ok = false;
        prev = r;
      }
    }
    std::vector<std::pair<LocalModelParams, Real>> cases;
    LocalModelParams p{LocalModel::AtomZero};
    p.b = ctx.real("0.4");
    p.x_q = ctx.real("3");
    cases.push_back({p, ctx.real("2.7")});
    p = LocalModelParams{LocalModel::MagneticZero};
    p.b = ctx.real("0.3");
    p.x_q = ctx.real("2");
    cases.push_back({p, ctx.real("1.8")});
    p = LocalModelParams{LocalModel::MagneticMin};
    p.a0 = ctx.real("0.5");
    p.x_m = ctx.real("1");
    cases.push_back({p, ctx.real("0.9")});
    for (const auto& [params, x] : cases) {
      const bool atom = params.model == LocalModel::AtomZero;
      Real prev = -1;
      for (int order : {6, 8, 10}) {
        auto s = local_model_series(params, order);
        Real u = evaluate_local_model(params, s, x, 0), upp = evaluate_local_model(params, s, x, 2);
        Real rhs = atom ? Real(pow(u, Real(1.5)) / sqrt(x)) : Real(sqrt(x * u));
        Real r = abs(upp - rhs) / abs(rhs);
        if (prev > 0 && !(r * 5 < prev)) ok = false;
        prev = r;
      }
    }
    t.check(ok, "series residual decay");
  }
  {  // matching-order identities, exact arithmetic
    auto s = v_endpoint_series(24);
    bool ok = true;
    for (auto [J, K] : {std::pair{6, 5}, std::pair{10, 12}}) {
      auto p = pade_fit(s, J, K);
      for (int n = 0; n <= J + K; ++n) {
        Rational v = p.numerator.coefficient(n);
        for (int i = 0; i <= n; ++i) v -= p.denominator.coefficient(i) * s[n - i];
        ok = ok && v == 0;
      }
    }
    auto es = shifted_endpoint_series(37);
    auto q = shafer_fit(es, 12, 12, 12);
    auto defect = shafer_matching_defect(q, es, q.matched_order);
    for (int n = 0; n < q.matched_order; ++n) ok = ok && defect[n] == 0;
    t.check(ok, "Pade/Shafer matching orders");
  }
  {  // convexity u >= 1 + a x on every sample
    bool ok = true;
    PrecisionContext c20(20);
    for (auto kind : {EquationKind::Atom, EquationKind::Magnetic})
      for (double a : {-0.5, -0.93, -1.2, -1.58, -1.6, -2.0}) {
        auto tr = integrate(kind, Real(a), Real(50), c20);
        for (const auto& s : tr.samples) ok = ok && s.u > 0 && s.u >= 1 + Real(a) * s.x;
      }
    t.check(ok, "convexity on all trajectories");
  }
  {  // atom tail: x^3 u increasing and below 144 on [100, 1000]
    auto grid = uniform_grid("100", "10", 91, ctx);
    auto tr = integrate(EquationKind::Atom, atom_a, Real(1000), ctx, grid);
    bool ok = tr.grid.size() == grid.size();
    Real prev = 0;
    for (const auto& s : tr.grid) {
      Real v = s.x * s.x * s.x * s.u;
      ok = ok && v > prev && v < 144;
      prev = v;
    }
    t.check(ok, "x^3 u increasing to " + to_decimal(prev, 5) + " < 144");
  }
  {  // v'(0) = 0 emerges, with N large enough that truncation sits below precision
    const int N = std::max(100, static_cast<int>(std::ceil(1.7 * o.digits)));
    auto s = cheb_solve(N, ctx);
    Real dv = abs(cheb_eval(s, Real(0), 1));
    t.check(dv <= ctx.pow10(-static_cast<int>(o.digits) + 5), "v'(0) = " + sci(dv) + " at N=" + std::to_string(N));
  }
  {  // perturbation ratio near the endpoint
    PrecisionContext c30(30);
    PrecisionScope s30(c30);
    const Real x0 = reference("magnetic_x0", c30), q = c30.real("1e-6");
    auto r = ionized(EquationKind::Magnetic, q, c30);
    Real ratio = (x0 - r.x_q) / cbrt(24 * q / (x0 * x0));
    t.check(abs(ratio - 1) <= Real(0.01), "ionization ratio at q=1e-6 " + to_decimal(ratio, 5));
  }
  {  // cross-method endpoint
    auto c = cheb_solve(60, ctx);
    auto v = vseries_estimates(80, Acceleration::Pade, ctx);
    Real diff = abs(c.x0 - v.x0);
    t.check(diff < ctx.pow10(-scaled(30, o)), "|x0 cheb - x0 v-series| = " + sci(diff));
    // regenerated magnetic table certified against the collocation profile
    PrecisionContext c40(40);
    PrecisionScope s40(c40);
    auto grid = uniform_grid("0", "0.1", 31, c40);
    auto table = tabulate(EquationKind::Magnetic, reference("magnetic_slope_50", c40), grid, 20, c40);
    Real worst = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Real z = sqrt(grid[i] / c40.lift(c.x0));
      Real v2 = pow(c40.lift(cheb_eval(c, z)), 2);
      worst = max(worst, Real(abs(c40.real(table.u[i]) - v2)));
    }
    t.check(worst < Real(1e-12), "magnetic table 0..3 vs collocation " + sci(worst));
  }
  return t.outcome();
}

}  // namespace acceptance

inline std::vector<AcceptanceCheck> acceptance_checks() {
  using namespace acceptance;
  return {
      {1, "slope-atom-phm", 120, atom_phm},
      {2, "slope-magnetic-phm", 120, magnetic_phm},
      {3, "slope-shoot", 1200, shooting},
      {4, "atom-table", 900, atom_table},
      {5, "cheb-large-n", 300, cheb_large},
      {6, "cheb-small-n", 120, cheb_small},
      {7, "shafer-table", 600, shafer_table_check},
      {8, "vseries-pade", 300, vseries},
      {9, "endpoint-partial-sums", 300, partial_sums},
      {10, "properties", 1200, properties},
  };
}

/// Runs the checks (all, or the one named by `only`), printing one PASS or
/// FAIL line per criterion to `out` as it goes. A check that throws fails
/// with the exception text. A check over its time budget fails.
inline std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& out,
                                               const std::string& only = "", bool timing = true) {
  std::vector<CheckResult> results;
  for (const auto& c : acceptance_checks()) {
    if (!only.empty() && c.id != only) continue;
    CheckResult r{c.criterion, c.id, false, "", 0, c.budget_seconds};
    auto t0 = std::chrono::steady_clock::now();
    try {
      auto o = c.run(opts);
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.seconds > r.budget_seconds) {
      r.pass = false;
      r.detail += "; over the " + std::to_string(static_cast<int>(r.budget_seconds)) + " s budget";
    }
    out << (r.pass ? "PASS" : "FAIL") << " [" << r.criterion << "] " << r.id << ": " << r.detail;
    if (timing) out << " (" << std::fixed << std::setprecision(1) << r.seconds << " s)" << std::defaultfloat;
    out << "\n" << std::flush;
    results.push_back(r);
  }
  if (!only.empty() && results.empty()) throw ValidationError("no acceptance check named '" + only + "'");
  return results;
}

}  // namespace tfsolve
