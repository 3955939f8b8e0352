#include "prodhyp/space.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "prodhyp/highprec.hpp"

namespace prodhyp {

namespace {

Rat rat_pow(long base, long e) {
  Int p;
  mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(base),
                static_cast<unsigned long>(e >= 0 ? e : -e));
  return e >= 0 ? Rat(p) : Rat(1, p);
}

Rat rat_mod(const Rat& x, const Rat& modulus) {
  Rat q = x / modulus;
  Int fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return x - Rat(fl) * modulus;
}

ExactScalar scalar_pow(const ExactScalar& base, long e) {
  ExactScalar b = e >= 0 ? base : base.inverse();
  unsigned long n = e >= 0 ? static_cast<unsigned long>(e) : static_cast<unsigned long>(-e);
  ExactScalar r(1);
  while (n > 0) {
    if (n & 1) r = r * b;
    b = b * b;
    n >>= 1;
  }
  return r;
}

long bs_exponent(const GroupElement& g) {
  const auto& e = g.as<BSElt>();
  if (!e.k.fits_slong_p()) throw BudgetError("BS exponent too large", 0);
  return e.k.get_si();
}

// Valuation part of the tree metric: largest l <= cap with x in n^l * Z.
long tree_meet_level(long n, const Rat& x, long cap) {
  if (x == 0) return cap;
  long l = cap;
  Rat t = x / rat_pow(n, l);
  while (t.get_den() != 1) {
    t *= n;
    --l;
  }
  return l;
}

const UhpBinding& uhp_binding(const SpaceAction& a) { return std::get<UhpBinding>(a.binding); }

std::pair<ExactScalar, ExactScalar> uhp_map(const SpaceAction& a, const GroupElement& g) {
  const auto& b = uhp_binding(a);
  if (b.kind == UhpBinding::Kind::BSAffine) {
    const auto& e = g.as<BSElt>();
    const long n = a.group->data_as<BSData>().n;
    return {ExactScalar(rat_pow(n, bs_exponent(g))),
            ExactScalar(bs_affine_part(*a.group, e))};
  }
  const auto& e = g.as<AnosovElt>();
  if (!e.k.fits_slong_p()) throw BudgetError("anosov exponent too large", 0);
  ExactScalar alpha = scalar_pow(b.rate, e.k.get_si());
  ExactScalar beta = ExactScalar(Rat(e.v0)) + ExactScalar(Rat(e.v1)) * b.covector1;
  return {std::move(alpha), std::move(beta)};
}

void require_same_kind(const Point& p, const Point& q) {
  if (p.index() != q.index()) throw StructuralError("dist: points from different spaces");
}

}  // namespace

TreeCosetCode tree_coset_code(long n, const TreeVertex& v) {
  TreeCosetCode code;
  if (v.cls == 0) {
    if (v.level < 0) {
      code.p = -v.level;
      code.q = 0;
    } else {
      code.p = 0;
      code.q = v.level;
    }
    code.m = 0;
    return code;
  }
  Int den = v.cls.get_den();
  long e = 0;
  while (den != 1) {
    den /= n;
    ++e;
  }
  code.p = e;
  code.q = v.level + e;
  code.m = v.cls.get_num();
  return code;
}

double Distance::length() const {
  if (!exact) return approx;
  if (ExactScalar::exact_guard_active())
    throw ContractError("distance emission requested inside ExactGuard");
  if (kind == Kind::Cosh)
    return highprec::acosh_quadratic(value.rational_part(), value.radical_part(),
                                     value.radicand());
  return highprec::quadratic_to_double(value.rational_part(), value.radical_part(),
                                       value.radicand());
}

int Distance::compare(const Distance& a, const Distance& b) {
  if (a.exact && b.exact && a.kind == b.kind) return a.value.compare(b.value);
  const double la = a.length(), lb = b.length();
  if (la < lb) return -1;
  if (la > lb) return 1;
  return 0;
}

// --- factories ---------------------------------------------------------------

SpaceAction make_bs_uhp_action(const GroupHandle& g, const std::string& name) {
  if (g->family() != Family::BaumslagSolitar)
    throw StructuralError("uhp action: group must be BS(1,n)");
  SpaceAction a;
  a.name = name;
  a.group = g;
  a.model = SpaceModel::UpperHalfPlane;
  a.binding = UhpBinding{UhpBinding::Kind::BSAffine, true, ExactScalar(0), ExactScalar(1)};
  a.basepoint = UHPoint{ExactScalar(0), ExactScalar(1)};
  a.delta = std::log(1.0 + std::sqrt(2.0));
  return a;
}

SpaceAction make_bs_tree_action(const GroupHandle& g, const std::string& name) {
  if (g->family() != Family::BaumslagSolitar)
    throw StructuralError("tree action: group must be BS(1,n)");
  SpaceAction a;
  a.name = name;
  a.group = g;
  a.model = SpaceModel::BassSerreTree;
  a.binding = TreeBinding{};
  a.basepoint = TreeVertex{0, 0};
  a.delta = 0.0;
  return a;
}

SpaceAction make_anosov_uhp_action(const GroupHandle& g, bool expanding,
                                   const std::string& name) {
  if (g->family() != Family::AnosovTorus)
    throw StructuralError("anosov uhp action: group must be an Anosov torus");
  const auto& d = g->data_as<AnosovData>();
  if (d.phi[0][0] + d.phi[1][1] < 2)
    throw StructuralError("anosov uhp action requires trace > 2");
  ExactScalar lam = d.lambda;
  ExactScalar lam_inv = lam.inverse();
  ExactScalar rate = expanding ? lam : lam_inv;
  // Left eigencovector (1, w) of phi for the chosen eigenvalue: w = (rate - a)/c.
  Rat a00(d.phi[0][0]), a10(d.phi[1][0]);
  if (a10 == 0) throw StructuralError("anosov uhp action: reducible phi");
  ExactScalar w = (rate - ExactScalar(a00)) * ExactScalar(Rat(1) / a10);
  SpaceAction act;
  act.name = name.empty() ? (expanding ? "uhp+" : "uhp-") : name;
  act.group = g;
  act.model = SpaceModel::UpperHalfPlane;
  act.binding = UhpBinding{UhpBinding::Kind::Anosov, expanding, std::move(w), std::move(rate)};
  act.basepoint = UHPoint{ExactScalar(0), ExactScalar(1)};
  act.delta = std::log(1.0 + std::sqrt(2.0));
  return act;
}

SpaceAction make_quasiline_action(std::shared_ptr<const Quasimorphism> phi,
                                  std::optional<GroupElement> direction,
                                  const std::string& name) {
  SpaceAction a;
  a.name = name.empty() ? "line(" + phi->name + ")" : name;
  a.group = phi->domain;
  a.model = SpaceModel::QuasiLine;
  a.qa_epsilon = phi->defect_bound;
  a.binding = LineBinding{std::move(phi), std::move(direction)};
  a.basepoint = LinePoint{};
  a.orientable_lineal = true;
  return a;
}

SpaceAction make_cayley_action(const GroupHandle& g, const std::string& name,
                               std::size_t budget) {
  SpaceAction a;
  a.name = name;
  a.group = g;
  a.model = SpaceModel::CayleyBall;
  CayleyBinding b;
  b.search_budget = budget;
  if (g->family() == Family::Abelian) {
    const auto& moduli = g->data_as<AbelianData>().moduli;
    bool free_std = std::all_of(moduli.begin(), moduli.end(), [](long m) { return m == 0; });
    if (free_std && g->generators().size() == moduli.size()) {
      for (size_t i = 0; i < moduli.size(); ++i) {
        const auto& v = g->generators()[i].element.as<AbelianElt>().v;
        for (size_t j = 0; j < v.size(); ++j)
          if (v[j] != Int(j == i ? 1 : 0)) free_std = false;
      }
      b.l1_shortcut = free_std;
    }
  }
  a.binding = b;
  a.basepoint = CayleyPoint{identity(*g)};
  return a;
}

SpaceAction make_quotient_action(std::shared_ptr<const SpaceAction> base, GroupElement center,
                                 int k_max, const std::string& name) {
  if (k_max < 1) throw StructuralError("quotient action: K_max must be >= 1");
  if (!commutes_with_generators(*base->group, center))
    throw StructuralError("quotient action: the chosen element is not central");
  SpaceAction a;
  a.name = name.empty() ? base->name + "/<c>" : name;
  a.group = base->group;
  a.model = SpaceModel::CentralQuotient;
  a.basepoint = base->basepoint;
  a.binding = QuotientBinding{std::move(base), std::move(center), k_max};
  return a;
}

// --- act / dist ----------------------------------------------------------------

Point act(const SpaceAction& a, const GroupElement& g, const Point& p) {
  check_element(*a.group, g);
  switch (a.model) {
    case SpaceModel::UpperHalfPlane: {
      const auto& z = std::get<UHPoint>(p);
      auto [alpha, beta] = uhp_map(a, g);
      return UHPoint{alpha * z.x + beta, alpha * z.y};
    }
    case SpaceModel::BassSerreTree: {
      const auto& v = std::get<TreeVertex>(p);
      const long n = a.group->data_as<BSData>().n;
      const auto& e = g.as<BSElt>();
      const long k0 = bs_exponent(g);
      const long level = k0 + v.level;
      Rat r = bs_affine_part(*a.group, e) + rat_pow(n, k0) * v.cls;
      return TreeVertex{level, rat_mod(r, rat_pow(n, level))};
    }
    case SpaceModel::QuasiLine: {
      const auto& b = std::get<LineBinding>(a.binding);
      const auto& x = std::get<LinePoint>(p);
      QmValue v = (*b.phi)(g);
      if (x.exact && v.exact) {
        Rat nv = x.value + v.rational;
        return LinePoint{true, nv, nv.get_d()};
      }
      return LinePoint{false, Rat(0), x.approx + v.approx};
    }
    case SpaceModel::CayleyBall:
      return CayleyPoint{mul(*a.group, g, std::get<CayleyPoint>(p).g)};
    case SpaceModel::CentralQuotient:
      return act(*std::get<QuotientBinding>(a.binding).base, g, p);
  }
  throw StructuralError("unknown space model");
}

Distance dist(const SpaceAction& a, const Point& p, const Point& q) {
  require_same_kind(p, q);
  switch (a.model) {
    case SpaceModel::UpperHalfPlane: {
      const auto& z = std::get<UHPoint>(p);
      const auto& w = std::get<UHPoint>(q);
      // cosh d(z,w) = 1 + (|dx|^2 + |dy|^2) / (2 Im z Im w)
      ExactScalar dx = z.x - w.x;
      ExactScalar dy = z.y - w.y;
      ExactScalar num = dx * dx + dy * dy;
      ExactScalar den = (z.y * w.y) * ExactScalar(2);
      Distance d;
      d.kind = Distance::Kind::Cosh;
      d.exact = true;
      d.value = ExactScalar(1) + num * den.inverse();
      return d;
    }
    case SpaceModel::BassSerreTree: {
      const auto& v = std::get<TreeVertex>(p);
      const auto& w = std::get<TreeVertex>(q);
      const long n = a.group->data_as<BSData>().n;
      const long cap = std::min(v.level, w.level);
      const long j = tree_meet_level(n, v.cls - w.cls, cap);
      Distance d;
      d.exact = true;
      d.value = ExactScalar(Rat(v.level + w.level - 2 * j));
      return d;
    }
    case SpaceModel::QuasiLine: {
      const auto& x = std::get<LinePoint>(p);
      const auto& y = std::get<LinePoint>(q);
      Distance d;
      if (x.exact && y.exact) {
        Rat diff = x.value - y.value;
        if (diff < 0) diff = -diff;
        d.exact = true;
        d.value = ExactScalar(diff);
      } else {
        d.exact = false;
        d.approx = std::abs(x.approx - y.approx);
      }
      return d;
    }
    case SpaceModel::CayleyBall: {
      const auto& b = std::get<CayleyBinding>(a.binding);
      GroupElement h = mul(*a.group, inv(*a.group, std::get<CayleyPoint>(p).g),
                           std::get<CayleyPoint>(q).g);
      Distance d;
      d.exact = true;
      if (b.l1_shortcut) {
        Int total = 0;
        for (const auto& c : h.as<AbelianElt>().v) total += abs(c);
        d.value = ExactScalar(Rat(total));
        return d;
      }
      WordLengthResult r = word_length(a.group, h, b.search_budget);
      if (!r.exact)
        throw BudgetError("cayley distance: word-length budget exceeded", r.lower_bound);
      d.value = ExactScalar(Rat(r.length));
      return d;
    }
    case SpaceModel::CentralQuotient:
      return quotient_dist(a, p, q).value;
  }
  throw StructuralError("unknown space model");
}

std::string point_str(const SpaceAction& a, const Point& p) {
  switch (a.model) {
    case SpaceModel::UpperHalfPlane: {
      const auto& z = std::get<UHPoint>(p);
      return z.x.str() + "+" + z.y.str() + "i";
    }
    case SpaceModel::BassSerreTree: {
      const auto& v = std::get<TreeVertex>(p);
      return "(" + std::to_string(v.level) + ";" + rat_str(v.cls) + ")";
    }
    case SpaceModel::QuasiLine: {
      const auto& x = std::get<LinePoint>(p);
      return x.exact ? rat_str(x.value) : highprec::format_double(x.approx);
    }
    case SpaceModel::CayleyBall:
      return element_key(*a.group, std::get<CayleyPoint>(p).g);
    case SpaceModel::CentralQuotient:
      return point_str(*std::get<QuotientBinding>(a.binding).base, p);
  }
  return "?";
}

// --- quotient metric -----------------------------------------------------------

namespace {

// Distance from p to the <c>-orbit of q in a Cayley model: breadth-first
// search from the identity until some c^k * (p^-1 q) appears. The first hit
// is the minimum over all shifts.
QuotientDistResult quotient_dist_cayley(const SpaceAction& base, const QuotientBinding& qb,
                                        const Point& p, const Point& q) {
  const auto& g = *base.group;
  const auto& cb = std::get<CayleyBinding>(base.binding);
  GroupElement m = mul(g, inv(g, std::get<CayleyPoint>(p).g), std::get<CayleyPoint>(q).g);
  GroupElement m_inv = inv(g, m);

  const auto gens = symmetric_generators(g);
  std::unordered_map<std::string, int> seen;
  std::vector<GroupElement> frontier{identity(g)};
  seen.emplace(element_key(g, frontier[0]), 0);

  auto test = [&](const GroupElement& x) -> std::optional<long> {
    // x == c^k m for some k iff x m^-1 is a power of the central element.
    GroupElement w = mul(g, x, m_inv);
    return solve_central_power(g, qb.center, w);
  };

  QuotientDistResult res;
  res.window = qb.k_max;
  for (int depth = 0;; ++depth) {
    std::optional<long> best_k;
    for (const auto& e : frontier) {
      if (auto k = test(e)) {
        if (!best_k || std::abs(*k) < std::abs(*best_k) ||
            (std::abs(*k) == std::abs(*best_k) && *k > *best_k))
          best_k = *k;
      }
    }
    if (best_k) {
      res.value.exact = true;
      res.value.value = ExactScalar(Rat(depth));
      res.k_at_min = *best_k;
      res.interior = std::abs(*best_k) < qb.k_max;
      res.certified = true;  // first BFS hit minimizes over all shifts
      return res;
    }
    std::vector<GroupElement> next;
    for (const auto& e : frontier) {
      for (const auto& s : gens) {
        GroupElement n = mul(g, e, s);
        std::string key = element_key(g, n);
        if (seen.count(key)) continue;
        seen.emplace(std::move(key), depth + 1);
        next.push_back(std::move(n));
      }
    }
    if (seen.size() > cb.search_budget)
      throw BudgetError("quotient distance: search budget exceeded", depth);
    if (next.empty()) throw StructuralError("quotient distance: orbit not reachable");
    frontier = std::move(next);
  }
}

}  // namespace

QuotientDistResult quotient_dist(const SpaceAction& a, const Point& p, const Point& q) {
  if (a.model != SpaceModel::CentralQuotient)
    throw StructuralError("quotient_dist: not a quotient space");
  const auto& qb = std::get<QuotientBinding>(a.binding);
  const SpaceAction& base = *qb.base;
  if (base.model == SpaceModel::CayleyBall)
    return quotient_dist_cayley(base, qb, p, q);

  constexpr int kWindowCap = 1 << 14;
  int window = qb.k_max;
  QuotientDistResult res;
  while (true) {
    std::optional<Distance> best;
    long best_k = 0;
    GroupElement shifted = power(*base.group, qb.center, -static_cast<long>(window));
    Point qs = act(base, shifted, q);
    for (long k = -window; k <= window; ++k) {
      Distance d = dist(base, p, qs);
      if (!best || Distance::compare(d, *best) < 0 ||
          (Distance::compare(d, *best) == 0 && std::abs(k) < std::abs(best_k))) {
        best = d;
        best_k = k;
      }
      if (k < window) qs = act(base, qb.center, qs);
    }
    res.value = *best;
    res.k_at_min = best_k;
    res.window = window;
    res.interior = std::abs(best_k) < window;
    res.certified = res.interior;
    if (res.interior || window >= kWindowCap) return res;
    window *= 2;
  }
}

// --- classification ---------------------------------------------------------------

ClassificationReport classify_isometry(const SpaceAction& a, const GroupElement& g, int m_max) {
  if (m_max < 4) throw StructuralError("classify_isometry: m_max must be >= 4");
  ClassificationReport rep;
  GroupElement pw = identity(*a.group);
  for (int m = 1; m <= m_max; ++m) {
    pw = mul(*a.group, pw, g);
    rep.displacements.push_back(dist(a, a.basepoint, act(a, pw, a.basepoint)).length());
  }
  rep.tau_hat = rep.displacements.back() / m_max;
  const int half = m_max / 2;
  double max_first = 0.0, max_all = 0.0;
  for (int i = 0; i < m_max; ++i) {
    max_all = std::max(max_all, rep.displacements[i]);
    if (i < half) max_first = std::max(max_first, rep.displacements[i]);
  }
  constexpr double kTol = 1e-9;
  if (max_all <= max_first + kTol) {
    rep.verdict = ClassificationReport::Verdict::EllipticEvidence;
    return rep;
  }
  bool tail_monotone = true;
  for (int i = half; i + 1 < m_max; ++i)
    if (rep.displacements[i + 1] <= rep.displacements[i] + kTol) tail_monotone = false;
  if (tail_monotone && rep.tau_hat > kTol) {
    rep.verdict = ClassificationReport::Verdict::LoxodromicEvidence;
    return rep;
  }
  rep.verdict = ClassificationReport::Verdict::Inconclusive;
  return rep;
}

}  // namespace prodhyp
