#include "tfsolve/complex.hpp"
#include "tfsolve/linalg.hpp"
#include "tfsolve/polynomial.hpp"
#include "tfsolve/precision.hpp"
#include "tfsolve/roots.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tfsolve;

namespace {

Matrix<Real> identity(std::size_t n) {
  Matrix<Real> m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix<Real> random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> dist(-1000, 1000);
  Matrix<Real> m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Real(Rational(dist(rng), 997));
  return m;
}

}  // namespace

TEST(PrecisionContext, GuardDigitRule) {
  PrecisionContext ctx(20);
  EXPECT_EQ(ctx.working_digits(), 50u);
  EXPECT_EQ(PrecisionContext(20, 300).working_digits(), 300u);
  EXPECT_EQ(PrecisionContext(20, 10).working_digits(), 50u);
  EXPECT_THROW(PrecisionContext(0), ValidationError);
}

TEST(PrecisionContext, RealsRoundToWorkingDigits) {
  PrecisionContext ctx(30);
  Real third = ctx.real(Rational(1, 3));
  EXPECT_EQ(third.precision(), ctx.working_digits());
  PrecisionContext wide(30, 200);
  Real third_wide = wide.real(Rational(1, 3));
  EXPECT_GE(agreed_digits(third, third_wide), 68);
  EXPECT_LT(agreed_digits(third, third_wide), 75);
}

TEST(PrecisionContext, ParseRationalIsExact) {
  EXPECT_EQ(parse_rational("1/144"), Rational(1, 144));
  EXPECT_EQ(parse_rational("-1.25e-3"), Rational(-1, 800));
  EXPECT_EQ(parse_rational("42"), Rational(42));
  EXPECT_THROW(parse_rational("-"), ValidationError);
}

TEST(Determinant, Identity) {
  PrecisionContext ctx(20);
  EXPECT_EQ(determinant(identity(3), ctx), 1);
}

TEST(Determinant, TwoByTwoFromHankelEntries) {
  // [[0, a/2], [a/2, 2/3]] at a = -1: 0*2/3 - 1/4.
  PrecisionContext ctx(20);
  Matrix<Real> m(2, 2);
  m(0, 0) = 0;
  m(0, 1) = Real(-0.5);
  m(1, 0) = Real(-0.5);
  m(1, 1) = ctx.real(Rational(2, 3));
  EXPECT_LT(abs(determinant(m, ctx) + Real(0.25)), ctx.epsilon() * 10);

  Matrix<Rational> q(2, 2);
  q(0, 1) = Rational(-1, 2);
  q(1, 0) = Rational(-1, 2);
  q(1, 1) = Rational(2, 3);
  EXPECT_EQ(determinant(q), Rational(-1, 4));
}

TEST(Determinant, DuplicatedRowIsZero) {
  PrecisionContext ctx(30);
  std::mt19937_64 rng(7);
  Matrix<Real> m = random_matrix(6, rng);
  for (std::size_t j = 0; j < 6; ++j) m(4, j) = m(1, j);
  EXPECT_LT(abs(determinant(m, ctx)), ctx.pow10(-static_cast<int>(ctx.working_digits()) + 5));
}

TEST(Determinant, RowPermutationFlipsSign) {
  PrecisionContext ctx(40);
  std::mt19937_64 rng(11);
  Matrix<Real> a = random_matrix(5, rng);
  Real base = determinant(a, ctx);
  Matrix<Real> swapped = a;
  swapped.swap_rows(0, 3);
  EXPECT_LT(abs(determinant(swapped, ctx) + base), ctx.epsilon() * 1000);
  Matrix<Real> cycled = a;  // 3-cycle, even permutation
  cycled.swap_rows(0, 1);
  cycled.swap_rows(1, 2);
  EXPECT_LT(abs(determinant(cycled, ctx) - base), ctx.epsilon() * 1000);
}

TEST(Determinant, ExactAgreesWithFloating) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> dist(-50, 50);
  Matrix<Rational> q(7, 7);
  Matrix<Real> r(7, 7);
  PrecisionContext ctx(40);
  PrecisionScope scope(ctx);
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) {
      q(i, j) = Rational(dist(rng), 1 + (i + j) % 5);
      r(i, j) = Real(q(i, j));
    }
  Real exact(determinant(q));
  EXPECT_GE(agreed_digits(determinant(r, ctx), exact), 80);
}

TEST(SolveLinear, IdentityReturnsRhs) {
  PrecisionContext ctx(20);
  std::vector<Real> b{Real(1), Real(-2), Real(3)};
  auto x = solve_linear(identity(3), b, ctx);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(x[i], b[i]);
}

TEST(SolveLinear, HilbertTwoByTwoExact) {
  // [[1, 1/2], [1/2, 1/3]] x = [1, 1] has x = (-2, 6) by Cramer's rule.
  Matrix<Rational> h(2, 2);
  h(0, 0) = 1;
  h(0, 1) = Rational(1, 2);
  h(1, 0) = Rational(1, 2);
  h(1, 1) = Rational(1, 3);
  auto x = solve_linear(h, {Rational(1), Rational(1)});
  EXPECT_EQ(x[0], Rational(-2));
  EXPECT_EQ(x[1], Rational(6));

  PrecisionContext ctx(30);
  Matrix<Real> hr(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) hr(i, j) = ctx.real(h(i, j));
  auto xr = solve_linear(hr, {Real(1), Real(1)}, ctx);
  EXPECT_LT(abs(xr[0] + 2), ctx.tolerance());
  EXPECT_LT(abs(xr[1] - 6), ctx.tolerance());
}

TEST(SolveLinear, SingularSystemsThrow) {
  PrecisionContext ctx(30);
  std::mt19937_64 rng(5);
  Matrix<Real> m = random_matrix(4, rng);
  for (std::size_t j = 0; j < 4; ++j) m(2, j) = m(0, j);
  EXPECT_THROW(solve_linear(m, std::vector<Real>(4, Real(1)), ctx), SingularMatrixError);
  Matrix<Rational> q(2, 2);
  q(0, 0) = 1;
  q(0, 1) = 2;
  q(1, 0) = 2;
  q(1, 1) = 4;
  EXPECT_THROW(solve_linear(q, {Rational(1), Rational(0)}), SingularMatrixError);
  EXPECT_THROW(solve_linear(Matrix<Real>(2, 3), std::vector<Real>(2), ctx), DimensionError);
}

class RandomSolve : public ::testing::TestWithParam<unsigned> {};

TEST_P(RandomSolve, ResidualBound) {
  PrecisionContext ctx(GetParam());
  PrecisionScope scope(ctx);
  std::mt19937_64 rng(GetParam());
  for (int trial = 0; trial < 5; ++trial) {
    Matrix<Real> a = random_matrix(10, rng);
    std::vector<Real> b(10);
    std::uniform_int_distribution<long> dist(-100, 100);
    Real bnorm = 0;
    for (auto& v : b) {
      v = Real(dist(rng));
      bnorm += v * v;
    }
    bnorm = sqrt(bnorm);
    auto x = solve_linear(a, b, ctx);
    auto ax = multiply(a, x);
    Real r = 0;
    for (int i = 0; i < 10; ++i) r += (ax[i] - b[i]) * (ax[i] - b[i]);
    EXPECT_LE(sqrt(r), ctx.tolerance() * bnorm);
  }
}

INSTANTIATE_TEST_SUITE_P(Digits, RandomSolve, ::testing::Values(50u, 200u));

TEST(FindRoot, SquareRootOfTwo) {
  PrecisionContext ctx(40);
  PrecisionScope scope(ctx);
  Real r = find_root([](const Real& x) { return Real(x * x - 2); }, {Real(1), Real(2)}, ctx);
  EXPECT_GE(agreed_digits(r, sqrt(ctx.real(2))), 40);
}

TEST(FindRoot, CubeRootOfMinusSixtyFourNinths) {
  PrecisionContext ctx(30);
  PrecisionScope scope(ctx);
  const Real c = ctx.real(Rational(64, 9));
  Real r = find_root([&](const Real& x) { return Real(x * x * x + c); }, {Real(-3), Real(-1)}, ctx);
  Real expected = -cbrt(c);
  EXPECT_GE(agreed_digits(r, expected), 30);
  EXPECT_EQ(to_decimal(r, 6), "-1.923");
}

TEST(FindRoot, NoSignChangeThrows) {
  PrecisionContext ctx(20);
  EXPECT_THROW(find_root([](const Real& x) { return Real(x * x + 1); }, {Real(-1), Real(1)}, ctx), NoBracketError);
}

TEST(FindRoot, WorkingDigitsDoNotMoveRoot) {
  PrecisionContext base(25);
  PrecisionContext doubled(25, 2 * base.working_digits());
  auto f = [](const Real& x) { return Real(exp(x) - 3 * x); };
  Real r1 = find_root(f, {Real(0), Real(1)}, base);
  Real r2 = find_root(f, {Real(0), Real(1)}, doubled);
  EXPECT_LT(abs(r1 - r2), base.tolerance());
}

TEST(FindRoot, NearestRootFromGuess) {
  PrecisionContext ctx(30);
  const Real r13 = ctx.real(Rational(13, 10));
  auto f = [&](const Real& x) { return Real((x - 1) * (x - r13) * (x + 2)); };
  Real r = find_root_near(f, Real(1.2), Real(0.01), ctx);
  EXPECT_LT(abs(r - r13), ctx.tolerance());
}

TEST(Polynomial, AlgebraAndEvaluation) {
  using P = Polynomial<Rational>;
  P p{Rational(1), Rational(-3), Rational(2)};
  EXPECT_EQ(p.degree(), 2);
  EXPECT_EQ(p(Rational(1)), Rational(0));
  EXPECT_EQ(p.derivative(), (P{Rational(-3), Rational(4)}));
  EXPECT_EQ((p - p).degree(), -1);
  P x = P::identity();
  EXPECT_EQ((x - P::constant(Rational(1))) * (Rational(2) * x - P::constant(Rational(1))), p);
}

TEST(ComplexReal, PrincipalSqrtAndNearestRoot) {
  PrecisionContext ctx(30);
  PrecisionScope scope(ctx);
  ComplexReal z(Real(-4), Real(0));
  ComplexReal r = sqrt(z);
  EXPECT_EQ(r.re, 0);
  EXPECT_EQ(r.im, 2);
  ComplexReal w(Real(3), Real(-4));
  ComplexReal s = sqrt(w);
  EXPECT_LT(abs(s - ComplexReal(Real(2), Real(-1))), ctx.epsilon() * 10);
  ComplexReal fifth = root_nearest_real(ComplexReal(Real(32), Real(0)), 5);
  EXPECT_LT(abs(fifth - ComplexReal(Real(2))), ctx.epsilon() * 10);
}
