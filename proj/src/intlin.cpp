#include "prodhyp/intlin.hpp"

#include <algorithm>

namespace prodhyp::intlin {

IMat identity(int n) {
  IMat m(n, IVec(n, 0));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

IMat mul(const IMat& a, const IMat& b) {
  const size_t n = a.size(), k = b.size(), p = b.empty() ? 0 : b[0].size();
  IMat c(n, IVec(p, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < k; ++j) {
      if (a[i][j] == 0) continue;
      for (size_t l = 0; l < p; ++l) c[i][l] += a[i][j] * b[j][l];
    }
  return c;
}

IVec mul_vec(const IMat& a, const IVec& v) {
  IVec r(a.size(), 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
  return r;
}

Int det(const IMat& a) {
  // Bareiss fraction-free elimination.
  IMat m = a;
  const int n = static_cast<int>(m.size());
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (m[i][k] != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      std::swap(m[k], m[piv]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        Int num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m[k][k];
  }
  return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
}

bool equal(const IMat& a, const IMat& b) { return a == b; }

IMat pow(const IMat& a, long k) {
  const int n = static_cast<int>(a.size());
  IMat base = k >= 0 ? a : inverse_unimodular(a);
  unsigned long e = k >= 0 ? static_cast<unsigned long>(k) : static_cast<unsigned long>(-k);
  IMat r = identity(n);
  while (e > 0) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

IMat inverse_unimodular(const IMat& a) {
  const int n = static_cast<int>(a.size());
  Int d = det(a);
  if (d != 1 && d != -1) throw StructuralError("inverse_unimodular: determinant is not +-1");
  // Adjugate via cofactors; n <= 4 in practice.
  IMat inv(n, IVec(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      IMat minor;
      minor.reserve(n - 1);
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        IVec row;
        row.reserve(n - 1);
        for (int c = 0; c < n; ++c)
          if (c != j) row.push_back(a[r][c]);
        minor.push_back(std::move(row));
      }
      Int cof = det(minor);
      if ((i + j) & 1) cof = -cof;
      inv[j][i] = d == 1 ? cof : -cof;
    }
  return inv;
}

std::vector<IVec> integer_kernel(const IMat& a) {
  // Column reduction: transform A*U with unimodular U until a set of columns
  // vanishes; those columns of U span ker_Z(A).
  const int rows = static_cast<int>(a.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
  IMat m = a;
  IMat u = identity(cols);
  auto col_swap = [&](int i, int j) {
    for (int r = 0; r < rows; ++r) std::swap(m[r][i], m[r][j]);
    for (int r = 0; r < cols; ++r) std::swap(u[r][i], u[r][j]);
  };
  auto col_addmul = [&](int dst, int src, const Int& f) {
    for (int r = 0; r < rows; ++r) m[r][dst] += f * m[r][src];
    for (int r = 0; r < cols; ++r) u[r][dst] += f * u[r][src];
  };
  int lead = 0;
  for (int r = 0; r < rows && lead < cols; ++r) {
    // Euclidean gcd sweep on columns lead..cols-1 against row r.
    while (true) {
      int piv = -1;
      for (int c = lead; c < cols; ++c)
        if (m[r][c] != 0 && (piv < 0 || abs(m[r][c]) < abs(m[r][piv]))) piv = c;
      if (piv < 0) break;
      col_swap(lead, piv);
      bool cleared = true;
      for (int c = lead + 1; c < cols; ++c) {
        if (m[r][c] == 0) continue;
        Int f;
        mpz_fdiv_q(f.get_mpz_t(), m[r][c].get_mpz_t(), m[r][lead].get_mpz_t());
        col_addmul(c, lead, -f);
        if (m[r][c] != 0) cleared = false;
      }
      if (cleared) {
        ++lead;
        break;
      }
    }
  }
  std::vector<IVec> kernel;
  for (int c = 0; c < cols; ++c) {
    bool zero = true;
    for (int r = 0; r < rows; ++r)
      if (m[r][c] != 0) {
        zero = false;
        break;
      }
    if (!zero) continue;
    IVec v(cols);
    for (int r = 0; r < cols; ++r) v[r] = u[r][c];
    // Normalize orientation: first nonzero entry positive.
    for (const Int& x : v) {
      if (x != 0) {
        if (x < 0)
          for (Int& y : v) y = -y;
        break;
      }
    }
    kernel.push_back(std::move(v));
  }
  return kernel;
}

int rank_rational(RMat m) {
  const int rows = static_cast<int>(m.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[rank], m[piv]);
    const Rat lead = m[rank][c];
    for (int j = c; j < cols; ++j) m[rank][j] /= lead;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || m[r][c] == 0) continue;
      const Rat f = m[r][c];
      for (int j = c; j < cols; ++j) m[r][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

std::optional<RMat> inverse_rational(const RMat& a) {
  const int n = static_cast<int>(a.size());
  RMat m = a;
  RMat inv(n, RVec(n, 0));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r)
      if (m[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) return std::nullopt;
    std::swap(m[c], m[piv]);
    std::swap(inv[c], inv[piv]);
    const Rat lead = m[c][c];
    for (int j = 0; j < n; ++j) {
      m[c][j] /= lead;
      inv[c][j] /= lead;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      const Rat f = m[r][c];
      for (int j = 0; j < n; ++j) {
        m[r][j] -= f * m[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

RVec solve_rational(const RMat& a, const RVec& b) {
  auto inv = inverse_rational(a);
  if (!inv) throw ContractError("solve_rational: singular matrix");
  RVec r(a.size(), 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i] += (*inv)[i][j] * b[j];
  return r;
}

}  // namespace prodhyp::intlin
