#include "tfsolve/resummation.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tfsolve;

namespace {

PowerSeries<Rational> sqrt_one_plus(int order) {
  std::vector<Rational> c{Rational(1)};
  for (int k = 1; k <= order; ++k) c.push_back(c.back() * (Rational(1, 2) - (k - 1)) / k);
  return {"s", c, std::nullopt};
}

// Taylor coefficients of num - den * series through `order`.
template <class T>
std::vector<T> pade_defect(const PadeApproximant<T>& p, const PowerSeries<T>& s, int order) {
  std::vector<T> out;
  for (int n = 0; n <= order; ++n) {
    T v = p.numerator.coefficient(n);
    for (int i = 0; i <= n; ++i) v -= p.denominator.coefficient(i) * s[n - i];
    out.push_back(v);
  }
  return out;
}

Real x0_ref(const PrecisionContext& ctx) { return ReferenceStore::value("magnetic_x0", ctx); }

std::vector<Real> interior_grid(int n) {
  std::vector<Real> g;
  for (int i = 1; i < n; ++i) g.push_back(Real(-i) / n);
  return g;
}

}  // namespace

TEST(PadeFit, DenominatorFreeOrderIsTheTruncation) {
  auto s = v_endpoint_series(8);
  auto p = pade_fit(s, 5, 0);
  EXPECT_EQ(p.denominator, Polynomial<Rational>::constant(Rational(1)));
  for (int n = 0; n <= 5; ++n) EXPECT_EQ(p.numerator.coefficient(n), s[n]);
  EXPECT_EQ(p.numerator.degree(), 5);
}

TEST(PadeFit, GeometricSeries) {
  PowerSeries<Rational> s{"t", std::vector<Rational>(6, Rational(1)), std::nullopt};
  auto p = pade_fit(s, 1, 1);
  EXPECT_EQ(p.numerator, Polynomial<Rational>::constant(Rational(1)));
  EXPECT_EQ(p.denominator, (Polynomial<Rational>{Rational(1), Rational(-1)}));
}

TEST(PadeFit, MatchesThroughJPlusK) {
  auto s = v_endpoint_series(24);
  for (auto [J, K] : {std::pair{4, 4}, std::pair{6, 5}, std::pair{10, 12}}) {
    auto p = pade_fit(s, J, K);
    EXPECT_EQ(p.denominator.coefficient(0), 1);
    for (const auto& d : pade_defect(p, s, J + K)) EXPECT_EQ(d, 0) << J << "/" << K;
  }
  PrecisionContext ctx(30);
  PrecisionScope scope(ctx);
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long> dist(-100, 100);
  PowerSeries<Real> r{"t", {}, std::nullopt};
  for (int i = 0; i <= 12; ++i) r.coefficients.push_back(Real(dist(rng)) / 37);
  auto p = pade_fit(r, 6, 6, ctx);
  for (const auto& d : pade_defect(p, r, 12)) EXPECT_LT(abs(d), ctx.pow10(-static_cast<int>(ctx.working_digits()) + 15));
}

TEST(PadeFit, SingularSystemReportsDegenerateOrder) {
  PowerSeries<Rational> s{"t", {Rational(1), Rational(0), Rational(0), Rational(1)}, std::nullopt};
  EXPECT_THROW(pade_fit(s, 1, 1), DegenerateOrderError);
  EXPECT_THROW(pade_fit(s, 3, 1), ValidationError);
}

TEST(PadeFit, DerivativesAgreeWithDifferences) {
  PrecisionContext ctx(40);
  PrecisionScope scope(ctx);
  auto p = pade_fit(v_endpoint_series(20), 10, 10);
  const Real t = ctx.real("-0.7"), h = ctx.pow10(-20);
  Real fd1 = (pade_evaluate(p, Real(t + h)) - pade_evaluate(p, Real(t - h))) / (2 * h);
  Real fd2 = (pade_evaluate(p, Real(t + h)) - 2 * pade_evaluate(p, t) + pade_evaluate(p, Real(t - h))) / (h * h);
  EXPECT_GE(agreed_digits(pade_evaluate(p, t, 1), fd1), 30);
  EXPECT_GE(agreed_digits(pade_evaluate(p, t, 2), fd2), 25);
}

TEST(ShaferFit, SquareRootMatchesThroughMatchedOrder) {
  auto s = sqrt_one_plus(6);
  auto q = shafer_fit(s, 1, 1, 1);
  EXPECT_EQ(q.P.coefficient(0), 1);
  EXPECT_EQ(q.Q.coefficient(0), 1);
  EXPECT_FALSE(q.note);
  auto defect = shafer_matching_defect(q, s, 4);
  for (int n = 0; n < 4; ++n) EXPECT_EQ(defect[n], 0);
  EXPECT_NE(defect[4], 0);
  // The plus branch differs from sqrt(1+s) at fourth order.
  PrecisionContext ctx(30);
  for (const char* x : {"0.01", "0.001"}) {
    Real s0 = ctx.real(x);
    Real err = abs(shafer_eval(q, s0, ShaferBranch::Plus, ctx).value.re - sqrt(1 + s0));
    EXPECT_LT(err, pow(s0, 4) * Real(0.1));
    EXPECT_GT(err, pow(s0, 4) * Real(0.001));
  }
}

TEST(ShaferFit, EndpointMatchingIdentityIsExact) {
  for (int K : {2, 5, 8}) {
    const int N = 3 * K + 1;
    auto s = shifted_endpoint_series(N);
    auto q = shafer_fit(s, K, K, K);
    EXPECT_EQ(q.matched_order, N);
    auto defect = shafer_matching_defect(q, s, N);
    for (int n = 0; n < N; ++n) EXPECT_EQ(defect[n], 0) << "K=" << K << " n=" << n;
    EXPECT_NE(defect[N], 0);
  }
}

TEST(ShaferFit, FreesQZeroWhenNormalizedSystemIsSingular) {
  // With f(0) = 0 the K=0, L=1, M=0 system under Q(0) = 1 has a zero
  // column; freeing Q(0) and matching one more order gives Q = -s, R = 0.
  PowerSeries<Rational> s{"s", {Rational(0), Rational(1), Rational(1), Rational(1)}, std::nullopt};
  auto q = shafer_fit(s, 0, 1, 0);
  ASSERT_TRUE(q.note);
  EXPECT_EQ(q.matched_order, 3);
  EXPECT_EQ(q.Q, (Polynomial<Rational>{Rational(0), Rational(-1)}));
  EXPECT_TRUE(q.R.is_zero());
  auto defect = shafer_matching_defect(q, s, 2);
  for (const auto& d : defect) EXPECT_EQ(d, 0);
}

TEST(ShaferEval, BranchesAtTheEndpoint) {
  // P(0) = Q(0) = 1 and R(0) = -(c0^2 + c0), so the branches at s = 0 are
  // c0 and -1 - c0.
  PrecisionContext ctx(30);
  auto q = shafer_fit(shifted_endpoint_series(16), 5, 5, 5);
  auto plus = shafer_eval(q, Real(0), ShaferBranch::Plus, ctx);
  auto minus = shafer_eval(q, Real(0), ShaferBranch::Minus, ctx);
  EXPECT_LT(abs(plus.value.re - ctx.real(Rational(1, 144))), ctx.epsilon() * 10);
  EXPECT_LT(abs(minus.value.re + ctx.real(Rational(145, 144))), ctx.epsilon() * 10);
  EXPECT_FALSE(plus.complex);
}

TEST(ShaferEval, PoleIsReported) {
  QuadApproximant<Rational> q;
  q.P = Polynomial<Rational>{Rational(1), Rational(2)};
  q.Q = Polynomial<Rational>::constant(Rational(1));
  q.R = Polynomial<Rational>::constant(Rational(-1));
  PrecisionContext ctx(20);
  EXPECT_THROW(shafer_eval(q, Real(-0.5), ShaferBranch::Plus, ctx), PoleError);
}

TEST(ShaferEval, OrderSixteenBranchesFiniteAndPlusIsPhysical) {
  PrecisionContext ctx(30);
  PrecisionScope scope(ctx);
  auto q = shafer_fit(shifted_endpoint_series(49), 16, 16, 16);
  for (int i = 0; i <= 100; ++i) EXPECT_NE(sign(q.P(Rational(-i, 100))), 0);
  auto res = shafer_residual(q, x0_ref(ctx), interior_grid(20), ctx);
  for (const auto& r : res) {
    EXPECT_EQ(r.physical, ShaferBranch::Plus);
    EXPECT_LT(r.plus, Real(1e-15)) << to_decimal(r.s, 3);
    EXPECT_GT(r.minus, Real(0.1)) << to_decimal(r.s, 3);
  }
  EXPECT_TRUE(detect_spurious_singularities(q, PrecisionContext(16)).empty());
}

TEST(ShaferEval, OrderTwentySingularitySwapsBranches) {
  PrecisionContext ctx(30);
  auto q = shafer_fit(shifted_endpoint_series(61), 20, 20, 20);
  auto found = detect_spurious_singularities(q, PrecisionContext(16));
  ASSERT_EQ(found.size(), 1u);
  const Real s_star = found[0].s;
  EXPECT_GT(s_star, Real(-0.61));
  EXPECT_LT(s_star, Real(-0.58));
  auto res = shafer_residual(q, x0_ref(ctx), interior_grid(20), ctx);
  for (const auto& r : res) {
    EXPECT_EQ(r.physical, r.s > s_star ? ShaferBranch::Plus : ShaferBranch::Minus) << to_decimal(r.s, 3);
    if (abs(r.s - s_star) > Real(0.03)) EXPECT_LT(min(r.plus, r.minus), Real(1e-15)) << to_decimal(r.s, 3);
  }
}

TEST(ShaferEval, ResidualGridMustBeInterior) {
  PrecisionContext ctx(20);
  auto q = shafer_fit(shifted_endpoint_series(7), 2, 2, 2);
  EXPECT_THROW(shafer_residual(q, x0_ref(ctx), {Real(-1)}, ctx), ValidationError);
  EXPECT_THROW(shafer_residual(q, x0_ref(ctx), {Real(0.1)}, ctx), ValidationError);
}

TEST(ShaferX0, ErrorTableRows) {
  PrecisionContext ctx(30);
  auto rows = shafer_table({2, 5, 10, 15, 25}, ctx);
  // Printed average errors; each within a factor 2 here.
  const double printed[] = {0.023, 0.00043, 0.31e-7, 0.32e-11, 0.39e-18};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Real avg = abs(rows[i].error_average);
    EXPECT_LT(avg, Real(printed[i] * 2)) << "K=" << rows[i].K;
    EXPECT_GT(avg, Real(printed[i] / 2)) << "K=" << rows[i].K;
    EXPECT_LT(abs(rows[i].average - (rows[i].root_plus + rows[i].root_minus) / ComplexReal(2)), ctx.epsilon() * 10);
  }
  // Taylor column: partial sums through order N.
  EXPECT_LT(abs(rows[2].taylor_error + Real(0.174e-3)), Real(0.001e-3));
  EXPECT_EQ(rows[2].N, 31);
}

TEST(ShaferX0, OrderTwentyBranchErrors) {
  PrecisionContext ctx(30);
  auto e = shafer_x0(20, ctx);
  for (const auto* z : {&e.error_plus, &e.error_minus}) {
    EXPECT_GT(abs(*z), Real(0.15e-11 / 2));
    EXPECT_LT(abs(*z), Real(0.15e-11 * 2));
  }
}

TEST(ShaferX0, AverageErrorFallsWithOrder) {
  PrecisionContext ctx(30);
  auto rows = shafer_table({2, 5, 10, 15, 20, 25}, ctx);
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_LT(abs(rows[i].error_average), abs(rows[i - 1].error_average)) << "K=" << rows[i].K;
}

TEST(ShaferX0, ComplexBranchesAverageToRealAtThirty) {
  PrecisionContext ctx(30);
  auto e = shafer_x0(30, ctx);
  EXPECT_TRUE(e.complex);
  EXPECT_GT(abs(e.root_plus.im), Real(1e-17));
  EXPECT_LT(abs(e.average.im), Real(1e-20));
  EXPECT_LT(abs(e.error_average), Real(1e-22));
}

TEST(ShaferX0, ReportColumns) {
  PrecisionContext ctx(20);
  auto rows = shafer_table({2}, ctx);
  auto csv = to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "K,N,taylor_error,plus_error,minus_error,average_error");
  auto j = to_json(rows);
  EXPECT_EQ(j[0]["N"], 7);
  EXPECT_NE(to_text(rows).find("average"), std::string::npos);
}

TEST(PartialSums, SingleTermGivesFifthRootOf144) {
  PrecisionContext ctx(30);
  EXPECT_GE(agreed_digits(endpoint_x0_partial_sums(0, ctx), pow(ctx.real(144), 1 / ctx.real(5))), 60);
  EXPECT_EQ(to_decimal(endpoint_x0_partial_sums(0, ctx), 5), "2.7019");
}

TEST(PartialSums, FiveDigitsAndInverseFiveHalvesDecay) {
  PrecisionContext ctx(30);
  EXPECT_EQ(to_decimal(endpoint_x0_partial_sums(61, ctx), 6), "3.06882");
  const Real ref = x0_ref(ctx);
  for (int M : {16, 32, 64}) {
    Real ratio = abs(endpoint_x0_partial_sums(M, ctx) - ref) / abs(endpoint_x0_partial_sums(4 * M, ctx) - ref);
    EXPECT_GT(ratio, Real(16)) << M;
    EXPECT_LT(ratio, Real(64)) << M;
  }
}

TEST(VSeries, PrintedDigitCounts) {
  PrecisionContext ctx(60);
  const Real up = ReferenceStore::value("magnetic_slope_50", ctx), x0 = x0_ref(ctx);
  auto m20 = vseries_estimates(20, Acceleration::Pade, ctx);
  EXPECT_EQ(agreed_digits(m20.u0_prime, up), 5);
  EXPECT_EQ(m20.J, 10);
  EXPECT_EQ(m20.K, 10);
  auto m40 = vseries_estimates(40, Acceleration::Pade, ctx);
  EXPECT_GE(agreed_digits(m40.x0, x0), 16);
  EXPECT_GE(agreed_digits(m40.u0_prime, up), 9);
  auto m40s = vseries_estimates(40, Acceleration::None, ctx);
  EXPECT_EQ(agreed_digits(m40s.u0_prime, up), 7);
  auto m80 = vseries_estimates(80, Acceleration::Pade, ctx);
  EXPECT_GE(agreed_digits(m80.u0_prime, up), 17);
  EXPECT_GE(agreed_digits(m80.x0, x0), 30);
}
