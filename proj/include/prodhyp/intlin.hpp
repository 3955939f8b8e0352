#pragma once

#include <optional>
#include <vector>

#include "prodhyp/scalar.hpp"

namespace prodhyp {

// Dense matrices over Z and Q, sized for point groups and quasimorphism
// stacks (dimensions stay in the single digits).
using IVec = std::vector<Int>;
using IMat = std::vector<IVec>;  // row-major
using RVec = std::vector<Rat>;
using RMat = std::vector<RVec>;

namespace intlin {

IMat identity(int n);
IMat mul(const IMat& a, const IMat& b);
IVec mul_vec(const IMat& a, const IVec& v);
Int det(const IMat& a);
bool equal(const IMat& a, const IMat& b);
IMat pow(const IMat& a, long k);  // k may be negative when det(a) = +-1
IMat inverse_unimodular(const IMat& a);  // requires det = +-1

// Basis of the integer kernel {v : a v = 0}, as columns. The kernel of an
// integer matrix is automatically saturated in Z^n.
std::vector<IVec> integer_kernel(const IMat& a);

int rank_rational(RMat m);             // destructive Gaussian elimination
std::optional<RMat> inverse_rational(const RMat& a);
RVec solve_rational(const RMat& a, const RVec& b);  // a square invertible

}  // namespace intlin

}  // namespace prodhyp
