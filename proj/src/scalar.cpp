#include "prodhyp/scalar.hpp"

#include <atomic>

#include "prodhyp/highprec.hpp"

namespace prodhyp {

namespace {
std::atomic<std::uint64_t> g_exact_compares{0};
std::atomic<std::uint64_t> g_approx_conversions{0};
thread_local int g_exact_guard_depth = 0;

bool is_square_free(long d) {
  if (d < 2) return false;
  for (long f = 2; f * f <= d; ++f) {
    if (d % (f * f) == 0) return false;
  }
  return true;
}
}  // namespace

ExactScalar::ExactScalar(Rat p, Rat q, long d) : p_(std::move(p)), q_(std::move(q)), d_(d) {
  p_.canonicalize();
  q_.canonicalize();
  if (q_ == 0) {
    d_ = 0;
  } else if (!is_square_free(d_)) {
    throw StructuralError("ExactScalar: radicand must be square-free and > 1");
  }
}

bool ExactScalar::is_integer() const {
  return d_ == 0 && p_.get_den() == 1;
}

void ExactScalar::require_same_field(const ExactScalar& o, long& d_out) const {
  if (d_ != 0 && o.d_ != 0 && d_ != o.d_) {
    throw StructuralError("ExactScalar: mixed radicands " + std::to_string(d_) + " and " +
                          std::to_string(o.d_));
  }
  d_out = d_ != 0 ? d_ : o.d_;
}

int ExactScalar::sign() const {
  const int sp = sgn(p_);
  if (d_ == 0 || q_ == 0) return sp;
  const int sq = sgn(q_);
  if (sp == 0) return sq;
  if (sp == sq) return sp;
  // Opposite signs: compare p^2 against d*q^2. Equality is impossible since
  // sqrt(d) is irrational and q != 0.
  const Rat lhs = p_ * p_;
  const Rat rhs = Rat(d_) * q_ * q_;
  const int c = cmp(lhs, rhs);
  return sp * c;
}

int ExactScalar::compare(const ExactScalar& other) const {
  g_exact_compares.fetch_add(1, std::memory_order_relaxed);
  return (*this - other).sign();
}

ExactScalar ExactScalar::operator-() const {
  ExactScalar r;
  r.p_ = -p_;
  r.q_ = -q_;
  r.d_ = d_;
  return r;
}

ExactScalar ExactScalar::operator+(const ExactScalar& o) const {
  long d;
  require_same_field(o, d);
  ExactScalar r;
  r.p_ = p_ + o.p_;
  r.q_ = q_ + o.q_;
  r.d_ = r.q_ == 0 ? 0 : d;
  return r;
}

ExactScalar ExactScalar::operator-(const ExactScalar& o) const { return *this + (-o); }

ExactScalar ExactScalar::operator*(const ExactScalar& o) const {
  long d;
  require_same_field(o, d);
  ExactScalar r;
  r.p_ = p_ * o.p_ + Rat(d) * q_ * o.q_;
  r.q_ = p_ * o.q_ + q_ * o.p_;
  r.d_ = r.q_ == 0 ? 0 : d;
  return r;
}

ExactScalar ExactScalar::inverse() const {
  if (is_zero()) throw StructuralError("ExactScalar: inverse of zero");
  if (d_ == 0) {
    ExactScalar r;
    r.p_ = 1 / p_;
    return r;
  }
  // 1/(p + q sqrt d) = (p - q sqrt d) / (p^2 - d q^2); denominator is nonzero
  // because sqrt(d) is irrational.
  const Rat den = p_ * p_ - Rat(d_) * q_ * q_;
  ExactScalar r;
  r.p_ = p_ / den;
  r.q_ = -q_ / den;
  r.d_ = r.q_ == 0 ? 0 : d_;
  return r;
}

Int ExactScalar::floor() const {
  // Write the value as (A + C*sqrt(d)) / B with B > 0.
  Int B = lcm(p_.get_den(), q_.get_den());
  Int A = p_.get_num() * (B / p_.get_den());
  Int C = q_.get_num() * (B / q_.get_den());
  if (C == 0) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), A.get_mpz_t(), B.get_mpz_t());
    return q;
  }
  // f = floor(C*sqrt(d)); C*sqrt(d) is irrational, so the bound is strict.
  Int cc = C * C * Int(d_);
  Int root;
  mpz_sqrt(root.get_mpz_t(), cc.get_mpz_t());
  Int f = (C > 0) ? root : -root - 1;
  Int q;
  Int num = A + f;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), B.get_mpz_t());
  return q;
}

double ExactScalar::to_double() const {
  if (g_exact_guard_depth > 0)
    throw ContractError("approximate conversion requested inside ExactGuard");
  g_approx_conversions.fetch_add(1, std::memory_order_relaxed);
  return highprec::quadratic_to_double(p_, q_, d_);
}

bool ExactScalar::exact_guard_active() { return g_exact_guard_depth > 0; }

ExactGuard::ExactGuard() { ++g_exact_guard_depth; }
ExactGuard::~ExactGuard() { --g_exact_guard_depth; }

std::string ExactScalar::str() const {
  if (d_ == 0) return rat_str(p_);
  return rat_str(p_) + "+" + rat_str(q_) + "*sqrt(" + std::to_string(d_) + ")";
}

ExactScalar::Stats ExactScalar::stats() {
  return {g_exact_compares.load(), g_approx_conversions.load()};
}

void ExactScalar::reset_stats() {
  g_exact_compares.store(0);
  g_approx_conversions.store(0);
}

std::string rat_str(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace prodhyp
