#include "tfsolve/shooting.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tfsolve;

namespace {

Real atom_slope(const PrecisionContext& ctx) { return ReferenceStore::value("atom_slope", ctx); }
Real magnetic_slope(const PrecisionContext& ctx) { return ReferenceStore::value("magnetic_slope", ctx); }

// |value - printed| within half a unit in the last printed place.
bool rounds_to(const Real& value, std::string_view text, const PrecisionContext& ctx) {
  const std::string printed(text);
  std::string mant = printed.substr(0, printed.find_first_of("eE"));
  int sig = 0;
  bool started = false;
  for (char c : mant) {
    if (c < '0' || c > '9') continue;
    if (c != '0') started = true;
    if (started) ++sig;
  }
  Real p = ctx.real(printed);
  if (p == 0) return abs(value) < ctx.tolerance();
  int e = static_cast<int>(std::floor(std::log10(std::fabs(static_cast<double>(p)))));
  return abs(value - p) <= ctx.pow10(e - sig + 1) * Real(0.5000001);
}

// Classical RK4 in long double on the variable t = sqrt(x), where the atom
// equation is smooth: du/dt = 2 t u', du'/dt = 2 u^(3/2). Shares no code
// with the Taylor stepper.
std::pair<long double, long double> rk4_atom(long double a, long double x_end) {
  long double t = 0, u = 1, du = a;
  const int n = 40000;
  const long double h = std::sqrt(x_end) / n;
  auto fu = [](long double tt, long double v) { return 2 * tt * v; };
  auto fv = [](long double uu) { return 2 * uu * std::sqrt(uu); };
  for (int i = 0; i < n; ++i) {
    long double k1u = fu(t, du), k1v = fv(u);
    long double k2u = fu(t + h / 2, du + h / 2 * k1v), k2v = fv(u + h / 2 * k1u);
    long double k3u = fu(t + h / 2, du + h / 2 * k2v), k3v = fv(u + h / 2 * k2u);
    long double k4u = fu(t + h, du + h * k3v), k4v = fv(u + h * k3u);
    u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    du += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    t += h;
  }
  return {u, du};
}

// Inner problem at the magnetic endpoint: W'' = sqrt(x0 W), W(0) = 0,
// W'(0) = 1. The ionization ratio tends to -sigma (x0/24)^(1/3) with
// sigma = lim r - (144 W/x0)^(1/4).
double inner_ratio_limit(double x0) {
  double r = 1e-12, w = 1e-12, dw = 1;
  const double h = 1e-4;
  auto f = [x0](double ww) { return std::sqrt(x0 * std::max(ww, 0.0)); };
  while (r < 400) {
    double k1w = dw, k1v = f(w);
    double k2w = dw + h / 2 * k1v, k2v = f(w + h / 2 * k1w);
    double k3w = dw + h / 2 * k2v, k3v = f(w + h / 2 * k2w);
    double k4w = dw + h * k3v, k4v = f(w + h * k3w);
    w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
    dw += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    r += h;
  }
  double sigma = r - std::pow(144 * w / x0, 0.25);
  return -sigma * std::cbrt(x0 / 24);
}

}  // namespace

TEST(Integrate, AtomValuesAtTen) {
  PrecisionContext ctx(30);
  auto tr = integrate(EquationKind::Atom, atom_slope(ctx), Real(10), ctx, {Real(10)});
  ASSERT_EQ(tr.grid.size(), 1u);
  EXPECT_TRUE(rounds_to(tr.grid[0].u, "0.024314292988681", ctx)) << to_decimal(tr.grid[0].u, 20);
  EXPECT_TRUE(rounds_to(tr.grid[0].du, "-0.0046028818712693", ctx)) << to_decimal(tr.grid[0].du, 20);
}

TEST(Integrate, OriginValuesAreInitialData) {
  PrecisionContext ctx(20);
  Real a = atom_slope(ctx);
  auto tr = integrate(EquationKind::Atom, a, Real(1), ctx, {Real(0), ctx.real("1e-12")});
  EXPECT_EQ(tr.grid[0].u, 1);
  EXPECT_EQ(tr.grid[0].du, a);
  EXPECT_LT(abs(tr.grid[1].u - 1), ctx.real("1e-11"));
  EXPECT_LT(abs(tr.grid[1].du - a), ctx.real("1e-5"));
}

TEST(Integrate, StartMatchesOriginSeries) {
  PrecisionContext ctx(25);
  PrecisionScope scope(ctx);
  for (auto kind : {EquationKind::Atom, EquationKind::Magnetic}) {
    Real a = kind == EquationKind::Atom ? atom_slope(ctx) : magnetic_slope(ctx);
    auto tr = integrate(kind, a, Real(1), ctx);
    auto ser = origin_series_u(kind, a, Rational(60));
    const auto& s = tr.samples.front();
    EXPECT_EQ(s.x, tr.x_start);
    EXPECT_LT(abs(s.u - ser.evaluate(s.x)), tr.tolerance * 10) << to_string(kind);
    EXPECT_LT(abs(s.du - ser.evaluate(s.x, 1)), tr.tolerance * 1000) << to_string(kind);
  }
}

TEST(Integrate, AgreesWithIndependentRungeKutta) {
  PrecisionContext ctx(20);
  for (double a : {-1.5, -1.588, -1.65}) {
    auto tr = integrate(EquationKind::Atom, Real(a), Real(2), ctx, {Real(2)});
    auto [u, du] = rk4_atom(a, 2);
    if (tr.grid.empty()) continue;
    EXPECT_NEAR(static_cast<double>(tr.grid[0].u), static_cast<double>(u), 1e-12) << a;
    EXPECT_NEAR(static_cast<double>(tr.grid[0].du), static_cast<double>(du), 1e-12) << a;
  }
}

TEST(Integrate, ConvexityBoundOnAllSamples) {
  PrecisionContext ctx(20);
  for (auto kind : {EquationKind::Atom, EquationKind::Magnetic}) {
    for (double a : {-0.5, -0.93, -1.2, -1.58, -1.6, -2.0}) {
      auto tr = integrate(kind, Real(a), Real(50), ctx);
      for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        const auto& s = tr.samples[i];
        EXPECT_GT(s.u, 0);
        EXPECT_GE(s.u, 1 + Real(a) * s.x);
        if (i > 0) EXPECT_GT(s.x, tr.samples[i - 1].x);
      }
    }
  }
}

TEST(Integrate, StopsWithCause) {
  PrecisionContext ctx(20);
  auto under = integrate(EquationKind::Atom, Real(-1.7), Real(100), ctx);
  EXPECT_EQ(under.stop, Termination::Extinction);
  EXPECT_FALSE(under.cause.empty());
  EXPECT_LT(under.samples.back().x, 100);
  auto over = integrate(EquationKind::Atom, Real(-1.5), Real(100), ctx);
  EXPECT_EQ(over.stop, Termination::BlowUp);
  EXPECT_GT(over.samples.back().u, 1000);
  EXPECT_THROW(integrate(EquationKind::Atom, Real(0.1), Real(1), ctx), ValidationError);
  EXPECT_THROW(integrate(EquationKind::Atom, Real(-1.5), ctx.real("0.001"), ctx), ValidationError);
}

TEST(Integrate, AtomTailBoundedAndIncreasing) {
  PrecisionContext ctx(40);
  auto grid = uniform_grid("100", "10", 91, ctx);
  auto tr = integrate(EquationKind::Atom, atom_slope(ctx), Real(1000), ctx, grid);
  ASSERT_EQ(tr.grid.size(), grid.size());
  Real prev = 0;
  for (const auto& s : tr.grid) {
    Real v = s.x * s.x * s.x * s.u;
    EXPECT_GT(v, prev) << to_decimal(s.x, 6);
    EXPECT_LT(v, 144);
    prev = v;
  }
  EXPECT_NEAR(static_cast<double>(tr.grid.front().x * tr.grid.front().x * tr.grid.front().x * tr.grid.front().u), 100.2,
              0.05);
  EXPECT_NEAR(static_cast<double>(prev), 135.1, 0.05);
}

TEST(Classify, AtomEitherSideOfCritical) {
  PrecisionContext ctx(20);
  auto under = classify(EquationKind::Atom, Real(-1.60), Real(1000), ctx);
  EXPECT_EQ(under.verdict, Verdict::Undershoot);
  ASSERT_TRUE(under.x_q && under.b);
  EXPECT_GT(*under.b, 0);
  auto over = classify(EquationKind::Atom, Real(-1.58), Real(1000), ctx);
  EXPECT_EQ(over.verdict, Verdict::Overshoot);
  ASSERT_TRUE(over.x_m && over.a0);
  EXPECT_GT(*over.a0, 0);
}

TEST(Classify, MagneticTableSlopeIsCritical) {
  PrecisionContext ctx(20);
  auto c = classify(EquationKind::Magnetic, ctx.real("-0.938966887643958893055"), Real(20), ctx);
  EXPECT_EQ(c.verdict, Verdict::CriticalWithinTolerance);
  EXPECT_EQ(classify(EquationKind::Magnetic, Real(-0.95), Real(20), ctx).verdict, Verdict::Undershoot);
  EXPECT_EQ(classify(EquationKind::Magnetic, Real(-0.93), Real(20), ctx).verdict, Verdict::Overshoot);
}

TEST(Classify, ZeroModelReproducesLastSamples) {
  PrecisionContext ctx(20);
  PrecisionScope scope(ctx);
  for (auto kind : {EquationKind::Atom, EquationKind::Magnetic}) {
    Real a = kind == EquationKind::Atom ? Real(-1.62) : Real(-0.96);
    auto c = classify(kind, a, Real(1000), ctx);
    ASSERT_EQ(c.verdict, Verdict::Undershoot);
    detail::MarchOptions opt;
    opt.x_end = Real(1000);
    auto tr = detail::march(kind, a, ctx, opt);
    LocalModelParams p{kind == EquationKind::Atom ? LocalModel::AtomZero : LocalModel::MagneticZero};
    p.b = c.b;
    p.x_q = c.x_q;
    auto ser = local_model_series(p, 6);
    for (std::size_t i = tr.samples.size() - 10; i < tr.samples.size(); ++i) {
      const auto& s = tr.samples[i];
      EXPECT_LE(abs(evaluate_local_model(p, ser, s.x) - s.u), 10 * tr.tolerance * s.u) << to_string(kind) << " " << i;
    }
  }
}

namespace {

struct MinimumCase {
  Classification c;
  Trajectory tr;
  LocalModelParams p;
  GeneralizedSeries<Real> ser;
};

MinimumCase minimum_case(EquationKind kind, const PrecisionContext& ctx) {
  Real a = kind == EquationKind::Atom ? Real(-1.58) : Real(-0.93);
  MinimumCase m;
  m.c = classify(kind, a, Real(1000), ctx);
  detail::MarchOptions opt;
  opt.x_end = Real(1000);
  opt.stop_at_minimum = true;
  m.tr = detail::march(kind, a, ctx, opt);
  m.p = LocalModelParams{kind == EquationKind::Atom ? LocalModel::AtomMin : LocalModel::MagneticMin};
  m.p.a0 = m.c.a0;
  m.p.x_m = m.c.x_m;
  m.ser = local_model_series(m.p, 60);
  return m;
}

}  // namespace

TEST(Classify, MinimumModelReproducesLastSamples) {
  // Stated for all of the last 10 samples. The stepper's steps are sized
  // by the solution's own radius, so ten steps back reach |s| of 0.6-0.7,
  // outside the disc where the expansion about the minimum converges
  // (about 0.3 for the magnetic case). Kept as stated.
  PrecisionContext ctx(20);
  PrecisionScope scope(ctx);
  for (auto kind : {EquationKind::Atom, EquationKind::Magnetic}) {
    auto m = minimum_case(kind, ctx);
    ASSERT_EQ(m.c.verdict, Verdict::Overshoot);
    for (std::size_t i = m.tr.samples.size() - 10; i < m.tr.samples.size(); ++i) {
      const auto& s = m.tr.samples[i];
      EXPECT_LE(abs(evaluate_local_model(m.p, m.ser, s.x) - s.u), 10 * m.tr.tolerance * s.u)
          << to_string(kind) << " s=" << to_decimal((*m.c.x_m - s.x) / *m.c.x_m, 4);
    }
  }
}

TEST(Classify, MinimumModelReproducesSamplesNearMinimum) {
  PrecisionContext ctx(20);
  PrecisionScope scope(ctx);
  for (auto kind : {EquationKind::Atom, EquationKind::Magnetic}) {
    auto m = minimum_case(kind, ctx);
    int checked = 0;
    for (const auto& s : m.tr.samples) {
      Real sv = (*m.c.x_m - s.x) / *m.c.x_m;
      if (sv > Real(0.15)) continue;
      ++checked;
      EXPECT_LE(abs(evaluate_local_model(m.p, m.ser, s.x) - s.u), 10 * m.tr.tolerance * s.u)
          << to_string(kind) << " s=" << to_decimal(sv, 4);
    }
    EXPECT_GE(checked, 2);
  }
}

TEST(CriticalSlopeShoot, BothEquationsReachTarget) {
  PrecisionContext ctx(30);
  auto atom = critical_slope_shoot(EquationKind::Atom, 15, ctx);
  EXPECT_GE(agreed_digits(atom.slope, atom_slope(ctx)), 15);
  EXPECT_EQ(atom.final_verdict, Verdict::CriticalWithinTolerance);
  auto mag = critical_slope_shoot(EquationKind::Magnetic, 15, ctx);
  EXPECT_GE(agreed_digits(mag.slope, magnetic_slope(ctx)), 15);
  EXPECT_EQ(mag.final_verdict, Verdict::CriticalWithinTolerance);
  EXPECT_LE(mag.hi - mag.lo, ctx.pow10(-15) * abs(mag.lo));
}

TEST(CriticalSlopeShoot, TargetBoundedByPrecision) {
  PrecisionContext ctx(20);
  EXPECT_THROW(critical_slope_shoot(EquationKind::Atom, 16, ctx), ValidationError);
}

TEST(Tabulate, CertifiedDigitsAndSerialization) {
  PrecisionContext ctx(40);
  auto grid = uniform_grid("0", "10", 11, ctx);
  auto t = tabulate(EquationKind::Atom, atom_slope(ctx), grid, 14, ctx);
  auto rows = ReferenceStore::atom_table();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(t.digits[i], 14) << t.x[i];
    EXPECT_TRUE(rounds_to(ctx.real(t.u[i]), rows[i].u, ctx)) << t.x[i] << " " << t.u[i] << " " << rows[i].u;
    EXPECT_TRUE(rounds_to(ctx.real(t.du[i]), rows[i].du, ctx)) << t.x[i] << " " << t.du[i] << " " << rows[i].du;
  }
  EXPECT_EQ(t.u[0], "1");
  auto csv = to_csv(t);
  EXPECT_EQ(csv.substr(0, 7), "x,u,du\n");
  EXPECT_EQ(csv, to_csv(tabulate(EquationKind::Atom, atom_slope(ctx), grid, 14, ctx)));
  auto j = to_json(t);
  EXPECT_EQ(j["equation"], "atom");
  EXPECT_EQ(j["metadata"]["method"], "taylor");
  EXPECT_EQ(j["rows"][1]["x"], "10");
  EXPECT_THROW(tabulate(EquationKind::Atom, atom_slope(ctx), {}, 14, ctx), ValidationError);
}

TEST(Tabulate, SlopePerturbationBelowPaperBound) {
  PrecisionContext ctx(40);
  auto grid = uniform_grid("0", "10", 101, ctx);
  Real a = atom_slope(ctx);
  auto base = integrate(EquationKind::Atom, a, Real(1000), ctx, grid);
  for (int sign : {-1, 1}) {
    auto moved = integrate(EquationKind::Atom, Real(a + sign * ctx.pow10(-27)), Real(1000), ctx, grid);
    Real worst = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) worst = max(worst, abs(moved.grid[i].u - base.grid[i].u));
    EXPECT_LT(worst, ctx.pow10(-16));
    EXPECT_GT(worst, ctx.pow10(-18));
  }
}

TEST(Tabulate, FullAtomTableMatchesPrintedValues) {
  PrecisionContext ctx(40);
  auto grid = uniform_grid("0", "10", 101, ctx);
  auto tr = integrate(EquationKind::Atom, atom_slope(ctx), Real(1000), ctx, grid);
  auto rows = ReferenceStore::atom_table();
  ASSERT_EQ(rows.size(), grid.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_TRUE(rounds_to(tr.grid[i].u, rows[i].u, ctx)) << rows[i].x << " " << to_decimal(tr.grid[i].u, 16);
    EXPECT_TRUE(rounds_to(tr.grid[i].du, rows[i].du, ctx)) << rows[i].x << " " << to_decimal(tr.grid[i].du, 16);
  }
}

TEST(Ionized, MagneticZeroApproachesEndpoint) {
  PrecisionContext ctx(30);
  Real x0 = ReferenceStore::value("magnetic_x0", ctx);
  Real prev_xq = 0;
  for (double q : {1e-2, 1e-3, 1e-4}) {
    auto r = ionized(EquationKind::Magnetic, Real(q), ctx);
    EXPECT_LT(r.x_q, x0);
    EXPECT_GT(r.x_q, prev_xq);
    EXPECT_LT(r.a, magnetic_slope(ctx));
    prev_xq = r.x_q;
    auto c = classify(EquationKind::Magnetic, r.a, Real(20), ctx);
    EXPECT_LT(abs(*c.b - Real(q)), ctx.tolerance() * 10);
  }
}

TEST(Ionized, AtomZeroRecedesAsChargeVanishes) {
  PrecisionContext ctx(30);
  auto wide = ionized(EquationKind::Atom, Real(0.5), ctx);
  auto narrow = ionized(EquationKind::Atom, Real(0.01), ctx);
  EXPECT_GT(narrow.x_q, wide.x_q * 5);
  EXPECT_LT(abs(narrow.a - atom_slope(ctx)), abs(wide.a - atom_slope(ctx)));
  EXPECT_THROW(ionized(EquationKind::Atom, Real(1.5), ctx), ValidationError);
}

TEST(Ionized, RatioTendsToInnerProblemConstant) {
  PrecisionContext ctx(50);
  Real x0 = ReferenceStore::value("magnetic_x0", ctx);
  double limit = inner_ratio_limit(static_cast<double>(x0));
  EXPECT_NEAR(limit, 0.98717, 2e-4);
  EXPECT_THROW(ionized(EquationKind::Magnetic, Real(1e-12), PrecisionContext(20)), NoBracketError);
  Real q = ctx.real("1e-12");
  auto r = ionized(EquationKind::Magnetic, q, ctx);
  double ratio = static_cast<double>((x0 - r.x_q) / cbrt(24 * q / (x0 * x0)));
  EXPECT_NEAR(ratio, limit, 1e-3);
}

TEST(Ionized, PerturbationRatioWithinOnePercent) {
  // Stated: (x0 - x_q)/(24 q/x0^2)^(1/3) = 1 within 1% at q = 1e-6. The
  // integration gives 0.98945, and the ratio tends to 0.98717 (see the
  // inner-problem test), so the leading constant 24 is itself about 4%
  // high. Kept as stated.
  PrecisionContext ctx(30);
  Real x0 = ReferenceStore::value("magnetic_x0", ctx);
  Real q = ctx.real("1e-6");
  auto r = ionized(EquationKind::Magnetic, q, ctx);
  double ratio = static_cast<double>((x0 - r.x_q) / cbrt(24 * q / (x0 * x0)));
  EXPECT_NEAR(ratio, 1.0, 0.01);
}

TEST(DetectX0, LeadingTermDataIsExact) {
  PrecisionContext ctx(30);
  PrecisionScope scope(ctx);
  Real x0 = ReferenceStore::value("magnetic_x0", ctx);
  Trajectory tr;
  tr.kind = EquationKind::Magnetic;
  Real C = ctx.real(Rational(1, 47));
  for (int k = 1; k <= 12; ++k) {
    Real r = ctx.pow10(-k);
    Real x = x0 - r;
    tr.samples.push_back({x, C * pow(r, 4), -4 * C * pow(r, 3)});
  }
  for (const auto& s : tr.samples) EXPECT_LT(abs(s.x - 4 * s.u / s.du - x0), ctx.epsilon() * 100);
  EXPECT_LT(abs(detect_x0(tr).x0 - x0), ctx.epsilon() * 100);
}

TEST(DetectX0, CriticalTrajectoryConvergesMonotonically) {
  PrecisionContext ctx(40);
  Real x0 = ReferenceStore::value("magnetic_x0", ctx);
  auto tr = integrate(EquationKind::Magnetic, magnetic_slope(ctx), Real(20), ctx);
  auto e = detect_x0(tr);
  EXPECT_GE(agreed_digits(e.x0, x0), 15);
  for (std::size_t i = 1; i < e.window_estimates.size(); ++i)
    EXPECT_LT(abs(e.window_estimates[i] - x0), abs(e.window_estimates[i - 1] - x0)) << i;
}

TEST(DetectX0, RejectsNonCritical) {
  PrecisionContext ctx(20);
  auto tr = integrate(EquationKind::Magnetic, Real(-0.5), Real(10), ctx);
  EXPECT_THROW(detect_x0(tr), ValidationError);
  auto atom = integrate(EquationKind::Atom, Real(-1.588), Real(10), ctx);
  EXPECT_THROW(detect_x0(atom), ValidationError);
}
