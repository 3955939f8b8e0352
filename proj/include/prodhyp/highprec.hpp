#pragma once

#include <gmpxx.h>

#include <string>

namespace prodhyp::highprec {

// 166 bits ~ 50 decimal digits; transcendental functions are evaluated once,
// at report emission, at this precision and only then rounded to double.
constexpr int kPrecisionBits = 166;

double quadratic_to_double(const mpq_class& p, const mpq_class& q, long d);

// acosh(x) for exact rational x >= 1.
double acosh_rational(const mpq_class& x);
// acosh(p + q*sqrt(d)), argument >= 1.
double acosh_quadratic(const mpq_class& p, const mpq_class& q, long d);

double log_rational(const mpq_class& x);  // x > 0

// Round-trip stable decimal form with 12 significant digits, used by every
// serialization path so repeated runs emit identical bytes.
std::string format_double(double v);

}  // namespace prodhyp::highprec
