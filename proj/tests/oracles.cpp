#include "oracles.hpp"

#include <cmath>
#include <deque>
#include <functional>
#include <stdexcept>

namespace prodhyp::oracle {

HeisElt heisenberg_rewrite(const std::string& word) {
  std::string w = word;
  auto apply_once = [&]() -> bool {
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      const std::string pair = w.substr(i, 2);
      std::string repl;
      if (pair == "aA" || pair == "Aa" || pair == "bB" || pair == "Bb" || pair == "cC" ||
          pair == "Cc")
        repl = "";
      else if (pair == "ba")
        repl = "abC";
      else if (pair == "bA")
        repl = "Abc";
      else if (pair == "Ba")
        repl = "aBc";
      else if (pair == "BA")
        repl = "ABC";
      else if (pair == "ca")
        repl = "ac";
      else if (pair == "cA")
        repl = "Ac";
      else if (pair == "cb")
        repl = "bc";
      else if (pair == "cB")
        repl = "Bc";
      else if (pair == "Ca")
        repl = "aC";
      else if (pair == "CA")
        repl = "AC";
      else if (pair == "Cb")
        repl = "bC";
      else if (pair == "CB")
        repl = "BC";
      else if (pair == "bc" || pair == "bC" || pair == "Bc" || pair == "BC" || pair == "ac" ||
               pair == "aC" || pair == "Ac" || pair == "AC" || pair == "ab" || pair == "aB" ||
               pair == "Ab" || pair == "AB")
        continue;  // already ordered
      else if (pair[0] == pair[1])
        continue;
      else if ((pair[0] == 'a' || pair[0] == 'A') && (pair[1] == 'a' || pair[1] == 'A'))
        continue;
      else if ((pair[0] == 'b' || pair[0] == 'B') && (pair[1] == 'b' || pair[1] == 'B'))
        continue;
      else if ((pair[0] == 'c' || pair[0] == 'C') && (pair[1] == 'c' || pair[1] == 'C'))
        continue;
      else
        continue;
      w = w.substr(0, i) + repl + w.substr(i + 2);
      return true;
    }
    return false;
  };
  while (apply_once()) {
  }
  HeisElt e{0, 0, 0};
  for (char ch : w) {
    switch (ch) {
      case 'a': e.m += 1; break;
      case 'A': e.m -= 1; break;
      case 'b': e.n += 1; break;
      case 'B': e.n -= 1; break;
      case 'c': e.k += 1; break;
      case 'C': e.k -= 1; break;
      default: throw std::runtime_error("bad letter");
    }
  }
  return e;
}

std::map<std::string, int> word_ball(const GroupHandle& g, int radius) {
  std::map<std::string, int> out;
  std::vector<GroupElement> current{identity(*g)};
  out.emplace(element_key(*g, current[0]), 0);
  const auto gens = symmetric_generators(*g);
  for (int r = 1; r <= radius; ++r) {
    std::vector<GroupElement> next;
    for (const auto& e : current)
      for (const auto& s : gens) {
        GroupElement n = mul(*g, e, s);
        auto [it, fresh] = out.emplace(element_key(*g, n), r);
        if (fresh) next.push_back(std::move(n));
      }
    current = std::move(next);
  }
  return out;
}

int word_length_bfs(const GroupHandle& g, const GroupElement& target, int max_radius) {
  const std::string key = element_key(*g, target);
  auto ball = word_ball(g, max_radius);
  auto it = ball.find(key);
  return it == ball.end() ? -1 : it->second;
}

namespace {
Rat npow(long n, long e) {
  Int p;
  mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(n),
                static_cast<unsigned long>(e >= 0 ? e : -e));
  return e >= 0 ? Rat(p) : Rat(1, p);
}
Rat rmod(const Rat& x, const Rat& m) {
  Rat q = x / m;
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return x - Rat(fl) * m;
}
std::string vkey(const TreeVertex& v) {
  return std::to_string(v.level) + "|" + rat_str(v.cls);
}
}  // namespace

int tree_distance_bfs(long n, const TreeVertex& a, const TreeVertex& b, int max_depth) {
  if (a == b) return 0;
  std::deque<std::pair<TreeVertex, int>> queue{{a, 0}};
  std::set<std::string> seen{vkey(a)};
  const std::string goal = vkey(b);
  while (!queue.empty()) {
    auto [v, d] = queue.front();
    queue.pop_front();
    if (d >= max_depth) continue;
    std::vector<TreeVertex> nbrs;
    nbrs.push_back(TreeVertex{v.level - 1, rmod(v.cls, npow(n, v.level - 1))});
    for (long j = 0; j < n; ++j)
      nbrs.push_back(TreeVertex{v.level + 1, rmod(v.cls + Rat(j) * npow(n, v.level),
                                                  npow(n, v.level + 1))});
    for (auto& w : nbrs) {
      const std::string k = vkey(w);
      if (k == goal) return d + 1;
      if (seen.insert(k).second) queue.emplace_back(std::move(w), d + 1);
    }
  }
  return -1;
}

int rank_bareiss(const RMat& mat) {
  // Clear denominators row by row, then fraction-free elimination.
  const int rows = static_cast<int>(mat.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(mat[0].size());
  std::vector<IVec> m(rows, IVec(cols));
  for (int i = 0; i < rows; ++i) {
    Int lcm_den = 1;
    for (int j = 0; j < cols; ++j) lcm_den = lcm(lcm_den, mat[i][j].get_den());
    for (int j = 0; j < cols; ++j) m[i][j] = mat[i][j].get_num() * (lcm_den / mat[i][j].get_den());
  }
  Int prev = 1;
  int rank = 0;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int piv = -1;
    for (int i = row; i < rows; ++i)
      if (m[i][col] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[row], m[piv]);
    for (int i = row + 1; i < rows; ++i) {
      for (int j = col + 1; j < cols; ++j) {
        Int num = m[i][j] * m[row][col] - m[i][col] * m[row][j];
        mpz_divexact(m[i][j].get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][col] = 0;
    }
    prev = m[row][col];
    ++row;
    ++rank;
  }
  return rank;
}

double uhp_distance_integrated(double x1, double y1, double x2, double y2) {
  if (std::abs(x1 - x2) < 1e-13) return std::abs(std::log(y2 / y1));
  // Geodesic: semicircle centered at (c, 0) with radius r; integrate ds = d(theta)/sin(theta).
  const double c = (x2 * x2 + y2 * y2 - x1 * x1 - y1 * y1) / (2.0 * (x2 - x1));
  const double t1 = std::atan2(y1, x1 - c);
  const double t2 = std::atan2(y2, x2 - c);
  const double lo = std::min(t1, t2), hi = std::max(t1, t2);
  const int steps = 1 << 16;  // Simpson, even count
  const double h = (hi - lo) / steps;
  auto f = [](double t) { return 1.0 / std::sin(t); };
  double acc = f(lo) + f(hi);
  for (int i = 1; i < steps; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

bool crysto_bruteforce_2x2(const std::vector<IMat>& point_gens) {
  // Closure first.
  std::vector<IMat> closure{intlin::identity(2)};
  size_t frontier = 0;
  while (frontier < closure.size()) {
    IMat cur = closure[frontier++];
    for (const auto& g : point_gens) {
      IMat nxt = intlin::mul(cur, g);
      if (std::find(closure.begin(), closure.end(), nxt) == closure.end())
        closure.push_back(std::move(nxt));
    }
  }
  for (long a = -3; a <= 3; ++a)
    for (long b = -3; b <= 3; ++b)
      for (long c = -3; c <= 3; ++c)
        for (long d = -3; d <= 3; ++d) {
          const long det = a * d - b * c;
          if (det != 1 && det != -1) continue;
          IMat B{{Int(a), Int(b)}, {Int(c), Int(d)}};
          IMat Binv = intlin::inverse_unimodular(B);
          bool ok = true;
          for (const auto& m : closure) {
            IMat conj = intlin::mul(Binv, intlin::mul(m, B));
            if (conj[0][1] != 0 || conj[1][0] != 0 || abs(conj[0][0]) != 1 ||
                abs(conj[1][1]) != 1) {
              ok = false;
              break;
            }
          }
          if (ok) return true;
        }
  return false;
}

Int heisenberg_cocycle_max(int radius) {
  Int best = 0;
  for (long m = -radius; m <= radius; ++m)
    for (long n = -radius; n <= radius; ++n) {
      if (std::abs(m) + std::abs(n) > radius) continue;
      for (long m2 = -radius; m2 <= radius; ++m2)
        for (long n2 = -radius; n2 <= radius; ++n2) {
          if (std::abs(m2) + std::abs(n2) > radius) continue;
          Int v = abs(Int(n) * Int(m2));
          if (v > best) best = v;
        }
    }
  return best;
}

}  // namespace prodhyp::oracle
