#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <mpfr.h>

#include <random>

#include "prodhyp/scalar.hpp"

using namespace prodhyp;

namespace {

// 100-digit floating evaluation, independent of ExactScalar::to_double.
int sign_mpfr_100(long pn, long pd, long qn, long qd, long d) {
  mpfr_t x, r;
  mpfr_init2(x, 340);
  mpfr_init2(r, 340);
  mpfr_set_si(r, d, MPFR_RNDN);
  mpfr_sqrt(r, r, MPFR_RNDN);
  mpfr_mul_si(r, r, qn, MPFR_RNDN);
  mpfr_div_si(r, r, qd, MPFR_RNDN);
  mpfr_set_si(x, pn, MPFR_RNDN);
  mpfr_div_si(x, x, pd, MPFR_RNDN);
  mpfr_add(x, x, r, MPFR_RNDN);
  int s = mpfr_sgn(x);
  mpfr_clear(x);
  mpfr_clear(r);
  return s;
}

}  // namespace

TEST_CASE("rational arithmetic and ordering") {
  ExactScalar a(Rat(3, 2));
  ExactScalar b(Rat(5, 4));
  CHECK((a + b) == ExactScalar(Rat(11, 4)));
  CHECK((a * b) == ExactScalar(Rat(15, 8)));
  CHECK((a - b).sign() == 1);
  CHECK(a.inverse() == ExactScalar(Rat(2, 3)));
  CHECK(a > b);
  CHECK(ExactScalar(0).is_zero());
}

TEST_CASE("quadratic arithmetic stays closed") {
  ExactScalar r2 = ExactScalar::sqrt_of(2);
  ExactScalar x = ExactScalar(Rat(1)) + r2;          // 1 + sqrt2
  ExactScalar y = x * x;                              // 3 + 2 sqrt2
  CHECK(y == ExactScalar(Rat(3), Rat(2), 2));
  CHECK((y * y.inverse()) == ExactScalar(1));
  CHECK((x - x).is_zero());
  CHECK((r2 * r2) == ExactScalar(2));
  CHECK(x.radicand() == 2);
  CHECK((r2 - r2).is_rational());
}

TEST_CASE("mixed radicands are refused") {
  ExactScalar a = ExactScalar::sqrt_of(2);
  ExactScalar b = ExactScalar::sqrt_of(5);
  CHECK_THROWS_AS((void)(a + b), StructuralError);
  CHECK_THROWS_AS((void)a.compare(b), StructuralError);
  CHECK_THROWS_AS(ExactScalar(Rat(0), Rat(1), 12), StructuralError);  // not square-free
}

TEST_CASE("sign analysis handles opposite-sign components") {
  // 3 - 2 sqrt2 > 0 (since 9 > 8) and 1 - sqrt2 < 0.
  CHECK(ExactScalar(Rat(3), Rat(-2), 2).sign() == 1);
  CHECK(ExactScalar(Rat(1), Rat(-1), 2).sign() == -1);
  CHECK(ExactScalar(Rat(-3), Rat(2), 2).sign() == -1);
  CHECK(ExactScalar(Rat(-1), Rat(1), 2).sign() == 1);
}

TEST_CASE("comparisons agree with 100-digit evaluation on random samples") {
  std::mt19937_64 rng(20240517);
  std::uniform_int_distribution<long> num(-50, 50);
  std::uniform_int_distribution<long> den(1, 12);
  const long ds[] = {2, 3, 5, 7};
  for (int trial = 0; trial < 10000; ++trial) {
    const long d = ds[trial % 4];
    const long pn = num(rng), pd = den(rng), qn = num(rng), qd = den(rng);
    ExactScalar v(Rat(pn, pd), Rat(qn, qd), d);
    const int expected = sign_mpfr_100(pn, pd, qn, qd, d);
    CHECK(v.sign() == expected);
  }
}

TEST_CASE("exact floor of quadratic values") {
  CHECK(ExactScalar(Rat(0), Rat(1), 2).floor() == 1);       // sqrt2
  CHECK(ExactScalar(Rat(0), Rat(-1), 2).floor() == -2);     // -sqrt2
  CHECK(ExactScalar(Rat(0), Rat(5), 2).floor() == 7);       // 5 sqrt2 = 7.07
  CHECK(ExactScalar(Rat(1, 2)).floor() == 0);
  CHECK(ExactScalar(Rat(-1, 2)).floor() == -1);
  CHECK(ExactScalar(Rat(7, 2), Rat(-3, 4), 5).floor() == 1);  // 3.5 - 0.75*2.236 = 1.82
  CHECK(ExactScalar(Rat(4)).floor() == 4);
}

TEST_CASE("instrumentation counts comparisons and conversions") {
  ExactScalar::reset_stats();
  ExactScalar a(Rat(1, 3)), b(Rat(1, 4));
  (void)(a < b);
  auto s1 = ExactScalar::stats();
  CHECK(s1.exact_compares == 1);
  CHECK(s1.approx_conversions == 0);
  (void)a.to_double();
  CHECK(ExactScalar::stats().approx_conversions == 1);
  {
    ExactGuard guard;
    CHECK_THROWS_AS((void)a.to_double(), ContractError);
  }
  CHECK_NOTHROW((void)a.to_double());
}
