#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

#include "prodhyp/error.hpp"

namespace prodhyp {

using Int = mpz_class;
using Rat = mpq_class;

// Exact element of Q or of a real quadratic field Q(sqrt(d)), stored as
// p + q*sqrt(d) with p, q rational and d a square-free integer > 1.
// Rational values keep d == 0. All comparisons are decided exactly; there is
// no floating-point path inside compare()/sign(). Conversions to double go
// through a 166-bit MPFR evaluation and are counted separately so callers can
// certify that a computation never left exact arithmetic.
class ExactScalar {
 public:
  ExactScalar() : p_(0), q_(0), d_(0) {}
  ExactScalar(long v) : p_(v), q_(0), d_(0) {}  // NOLINT(runtime/explicit)
  ExactScalar(const Int& v) : p_(v), q_(0), d_(0) {}
  ExactScalar(const Rat& p) : p_(p), q_(0), d_(0) { p_.canonicalize(); }
  ExactScalar(Rat p, Rat q, long d);

  static ExactScalar sqrt_of(long d) { return ExactScalar(Rat(0), Rat(1), d); }

  const Rat& rational_part() const { return p_; }
  const Rat& radical_part() const { return q_; }
  long radicand() const { return d_; }
  bool is_rational() const { return d_ == 0; }
  bool is_zero() const { return p_ == 0 && q_ == 0; }
  bool is_integer() const;

  // Exact sign in {-1, 0, +1}.
  int sign() const;
  // Exact three-way compare; mixing two distinct radicands is refused.
  int compare(const ExactScalar& other) const;

  ExactScalar operator-() const;
  ExactScalar operator+(const ExactScalar& o) const;
  ExactScalar operator-(const ExactScalar& o) const;
  ExactScalar operator*(const ExactScalar& o) const;
  ExactScalar inverse() const;  // throws StructuralError on zero
  ExactScalar operator/(const ExactScalar& o) const { return *this * o.inverse(); }

  bool operator==(const ExactScalar& o) const { return compare(o) == 0; }
  bool operator!=(const ExactScalar& o) const { return compare(o) != 0; }
  bool operator<(const ExactScalar& o) const { return compare(o) < 0; }
  bool operator<=(const ExactScalar& o) const { return compare(o) <= 0; }
  bool operator>(const ExactScalar& o) const { return compare(o) > 0; }
  bool operator>=(const ExactScalar& o) const { return compare(o) >= 0; }

  // Largest integer <= value, computed exactly (integer sqrt on the radical).
  Int floor() const;

  double to_double() const;       // counted as an approximate conversion
  std::string str() const;        // "3/2" or "3/2+5/1*sqrt(2)"

  // Instrumentation: exact comparisons performed / approximate conversions
  // requested since the last reset. Used by the verification suites to pin
  // down that distance comparisons stayed exact.
  struct Stats {
    std::uint64_t exact_compares;
    std::uint64_t approx_conversions;
  };
  static Stats stats();
  static void reset_stats();

  static bool exact_guard_active();

 private:
  Rat p_, q_;
  long d_;

  void require_same_field(const ExactScalar& o, long& d_out) const;
};

inline ExactScalar abs(const ExactScalar& x) { return x.sign() < 0 ? -x : x; }

// While alive, any approximate conversion throws. Verification suites wrap
// distance-computation phases in this guard to certify that the arithmetic
// stayed exact end to end.
class ExactGuard {
 public:
  ExactGuard();
  ~ExactGuard();
  ExactGuard(const ExactGuard&) = delete;
  ExactGuard& operator=(const ExactGuard&) = delete;
};

std::string rat_str(const Rat& r);

}  // namespace prodhyp
