#include "prodhyp/highprec.hpp"

#include <mpfr.h>

#include <cmath>
#include <cstdio>
#include <cstring>

namespace prodhyp::highprec {

namespace {

struct MpfrValue {
  mpfr_t v;
  MpfrValue() { mpfr_init2(v, kPrecisionBits); }
  ~MpfrValue() { mpfr_clear(v); }
  MpfrValue(const MpfrValue&) = delete;
  MpfrValue& operator=(const MpfrValue&) = delete;
};

void set_quadratic(mpfr_t out, const mpq_class& p, const mpq_class& q, long d) {
  MpfrValue rad;
  if (d != 0) {
    mpfr_set_si(rad.v, d, MPFR_RNDN);
    mpfr_sqrt(rad.v, rad.v, MPFR_RNDN);
    mpfr_mul_q(rad.v, rad.v, q.get_mpq_t(), MPFR_RNDN);
  } else {
    mpfr_set_zero(rad.v, 1);
  }
  mpfr_set_q(out, p.get_mpq_t(), MPFR_RNDN);
  mpfr_add(out, out, rad.v, MPFR_RNDN);
}

}  // namespace

double quadratic_to_double(const mpq_class& p, const mpq_class& q, long d) {
  MpfrValue x;
  set_quadratic(x.v, p, q, d);
  return mpfr_get_d(x.v, MPFR_RNDN);
}

double acosh_rational(const mpq_class& x) {
  MpfrValue v;
  mpfr_set_q(v.v, x.get_mpq_t(), MPFR_RNDN);
  mpfr_acosh(v.v, v.v, MPFR_RNDN);
  return mpfr_get_d(v.v, MPFR_RNDN);
}

double acosh_quadratic(const mpq_class& p, const mpq_class& q, long d) {
  MpfrValue v;
  set_quadratic(v.v, p, q, d);
  mpfr_acosh(v.v, v.v, MPFR_RNDN);
  return mpfr_get_d(v.v, MPFR_RNDN);
}

double log_rational(const mpq_class& x) {
  MpfrValue v;
  mpfr_set_q(v.v, x.get_mpq_t(), MPFR_RNDN);
  mpfr_log(v.v, v.v, MPFR_RNDN);
  return mpfr_get_d(v.v, MPFR_RNDN);
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // normalizes -0
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace prodhyp::highprec
