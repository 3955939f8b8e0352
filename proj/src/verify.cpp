#include "prodhyp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "prodhyp/highprec.hpp"
#include "prodhyp/intlin.hpp"

namespace prodhyp {

DisplacementProfile displacement_profile(const GroupHandle& g,
                                         const std::vector<const SpaceAction*>& actions,
                                         int r_max, const std::vector<double>& thresholds,
                                         std::size_t budget) {
  for (const auto* a : actions)
    if (a->group.get() != g.get())
      throw StructuralError("displacement_profile: action bound to a different group");
  DisplacementProfile prof;
  prof.group = g;
  for (const auto* a : actions) prof.action_names.push_back(a->name);
  prof.thresholds = thresholds;
  try {
    prof.ball = enumerate_ball(g, r_max, budget);
    prof.r_max = r_max;
  } catch (const BudgetError& e) {
    prof.partial = true;
    prof.r_max = e.reached_radius;
    prof.ball = enumerate_ball(g, prof.r_max, budget);
  }

  // Compute every distance term exactly first, then emit totals once.
  std::vector<std::vector<Distance>> terms(prof.ball.size());
  {
    for (size_t i = 0; i < prof.ball.size(); ++i) {
      const GroupElement& e = prof.ball.elements[i];
      for (const auto* a : actions)
        terms[i].push_back(dist(*a, a->basepoint, act(*a, e, a->basepoint)));
    }
  }
  prof.totals.resize(prof.ball.size());
  prof.exact_terms.resize(prof.ball.size());
  for (size_t i = 0; i < prof.ball.size(); ++i) {
    double total = 0.0;
    bool exact = true;
    for (const auto& t : terms[i]) {
      total += t.length();
      exact = exact && t.exact;
    }
    prof.totals[i] = total;
    prof.exact_terms[i] = exact;
    prof.all_exact = prof.all_exact && exact;
  }

  prof.min_per_radius.assign(prof.r_max + 1, 0.0);
  prof.max_per_radius.assign(prof.r_max + 1, 0.0);
  for (int r = 0; r <= prof.r_max; ++r) {
    double mn = 0.0, mx = 0.0;
    bool first = true;
    for (size_t i = prof.ball.sphere_begin[r]; i < prof.ball.sphere_begin[r + 1]; ++i) {
      if (first) {
        mn = mx = prof.totals[i];
        first = false;
      } else {
        mn = std::min(mn, prof.totals[i]);
        mx = std::max(mx, prof.totals[i]);
      }
    }
    prof.min_per_radius[r] = mn;
    prof.max_per_radius[r] = mx;
  }

  prof.counts.assign(thresholds.size(), std::vector<long>(prof.r_max + 1, 0));
  for (size_t t = 0; t < thresholds.size(); ++t) {
    long acc = 0;
    for (int r = 0; r <= prof.r_max; ++r) {
      for (size_t i = prof.ball.sphere_begin[r]; i < prof.ball.sphere_begin[r + 1]; ++i)
        if (prof.totals[i] <= thresholds[t]) ++acc;
      prof.counts[t][r] = acc;
    }
  }
  return prof;
}

PropernessReport properness_report(const DisplacementProfile& profile) {
  PropernessReport rep;
  rep.partial = profile.partial;
  rep.min_growth = profile.min_per_radius;
  rep.proper_evidence = !profile.thresholds.empty();
  for (size_t t = 0; t < profile.thresholds.size(); ++t) {
    ThresholdReport tr;
    tr.threshold = profile.thresholds[t];
    tr.counts = profile.counts[t];
    tr.final_count = tr.counts.back();
    int r0 = profile.r_max;
    while (r0 > 0 && tr.counts[r0 - 1] == tr.final_count) --r0;
    tr.stabilization_radius = r0;
    tr.stabilized = r0 < profile.r_max;  // at least the last two radii agree
    rep.proper_evidence = rep.proper_evidence && tr.stabilized;
    rep.per_threshold.push_back(std::move(tr));
  }
  return rep;
}

CoboundednessReport coboundedness_window(const SpaceAction& action, const Ball& ball, double w) {
  if (action.model != SpaceModel::QuasiLine)
    throw StructuralError("coboundedness_window: quasi-line action expected");
  if (ball.group.get() != action.group.get())
    throw StructuralError("coboundedness_window: ball from a different group");
  const auto& lb = std::get<LineBinding>(action.binding);
  std::vector<Rat> orbit;
  bool exact = lb.phi->exact;
  std::vector<double> orbit_approx;
  for (const auto& e : ball.elements) {
    QmValue v = (*lb.phi)(e);
    if (exact)
      orbit.push_back(v.rational);
    else
      orbit_approx.push_back(v.approx);
  }
  CoboundednessReport rep;
  rep.window_desc = "[-" + highprec::format_double(w) + ", " + highprec::format_double(w) + "]";
  rep.orbit_size = ball.size();
  if (exact) {
    std::sort(orbit.begin(), orbit.end());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
    Rat W(w);
    auto dist_to_orbit = [&](const Rat& x) {
      auto it = std::lower_bound(orbit.begin(), orbit.end(), x);
      Rat best = -1;
      if (it != orbit.end()) best = *it - x;
      if (it != orbit.begin()) {
        Rat d = x - *(it - 1);
        if (best < 0 || d < best) best = d;
      }
      return best;
    };
    Rat eps = dist_to_orbit(-W);
    Rat right = dist_to_orbit(W);
    if (right > eps) eps = right;
    for (size_t i = 0; i + 1 < orbit.size(); ++i) {
      Rat mid = (orbit[i] + orbit[i + 1]) / 2;
      if (mid < -W || mid > W) continue;
      Rat d = (orbit[i + 1] - orbit[i]) / 2;
      if (d > eps) eps = d;
    }
    rep.exact = true;
    rep.exact_value = eps;
    rep.covering_radius = eps.get_d();
    return rep;
  }
  std::sort(orbit_approx.begin(), orbit_approx.end());
  auto dist_to_orbit = [&](double x) {
    auto it = std::lower_bound(orbit_approx.begin(), orbit_approx.end(), x);
    double best = 1e300;
    if (it != orbit_approx.end()) best = *it - x;
    if (it != orbit_approx.begin()) best = std::min(best, x - *(it - 1));
    return best;
  };
  double eps = std::max(dist_to_orbit(-w), dist_to_orbit(w));
  for (size_t i = 0; i + 1 < orbit_approx.size(); ++i) {
    double mid = (orbit_approx[i] + orbit_approx[i + 1]) / 2;
    if (mid < -w || mid > w) continue;
    eps = std::max(eps, (orbit_approx[i + 1] - orbit_approx[i]) / 2);
  }
  rep.covering_radius = eps;
  return rep;
}

CoboundednessReport coboundedness_rectangle(const SpaceAction& action, const Ball& ball,
                                            const Rat& x0, const Rat& x1, const Rat& y0,
                                            const Rat& y1, int grid) {
  if (action.model != SpaceModel::UpperHalfPlane)
    throw StructuralError("coboundedness_rectangle: upper-half-plane action expected");
  if (ball.group.get() != action.group.get())
    throw StructuralError("coboundedness_rectangle: ball from a different group");
  std::vector<UHPoint> orbit;
  for (const auto& e : ball.elements)
    orbit.push_back(std::get<UHPoint>(act(action, e, action.basepoint)));
  // Max over the sample grid of the distance to the orbit, tracked in the
  // cosh domain and converted once at the end.
  ExactScalar worst_cosh(1);
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j) {
      UHPoint z{ExactScalar(x0 + (x1 - x0) * Rat(i, grid)),
                ExactScalar(y0 + (y1 - y0) * Rat(j, grid))};
      bool first = true;
      ExactScalar best(1);
      for (const auto& o : orbit) {
        Distance d = dist(action, z, o);
        if (first || d.value < best) {
          best = d.value;
          first = false;
        }
      }
      if (best > worst_cosh) worst_cosh = best;
    }
  CoboundednessReport rep;
  rep.window_desc = "rect[" + rat_str(x0) + "," + rat_str(x1) + "]x[" + rat_str(y0) + "," +
                    rat_str(y1) + "]";
  rep.orbit_size = orbit.size();
  rep.covering_radius = highprec::acosh_quadratic(worst_cosh.rational_part(),
                                                  worst_cosh.radical_part(),
                                                  worst_cosh.radicand());
  return rep;
}

// --- crystallographic decider -------------------------------------------------

namespace {

std::vector<IMat> point_group_closure(const std::vector<IMat>& gens, int r,
                                      std::size_t bound) {
  std::vector<IMat> closure{intlin::identity(r)};
  size_t frontier = 0;
  while (frontier < closure.size()) {
    IMat cur = closure[frontier++];
    for (const auto& g : gens) {
      IMat nxt = intlin::mul(cur, g);
      if (std::find(closure.begin(), closure.end(), nxt) == closure.end()) {
        closure.push_back(std::move(nxt));
        if (closure.size() > bound)
          throw StructuralError("crysto_decide: point-group closure exceeds bound");
      }
    }
  }
  return closure;
}

}  // namespace

CrystallographicDecision crysto_decide(const std::vector<IMat>& point_gens, int r,
                                       std::size_t closure_bound) {
  for (const auto& m : point_gens) {
    if (static_cast<int>(m.size()) != r)
      throw StructuralError("crysto_decide: matrix size mismatch");
    Int d = intlin::det(m);
    if (d != 1 && d != -1) throw StructuralError("crysto_decide: matrix not in GL_r(Z)");
  }
  CrystallographicDecision dec;
  dec.note = "criterion read basis-free: simultaneous GL_r(Z)-conjugation to diagonal +-1";
  std::vector<IMat> closure = point_group_closure(point_gens, r, closure_bound);
  dec.closure_size = static_cast<int>(closure.size());
  const IMat id = intlin::identity(r);

  // Exponent <= 2 (which already forces commutativity).
  for (const auto& m : closure) {
    if (!intlin::equal(intlin::mul(m, m), id)) {
      long order = 2;
      IMat p = intlin::mul(m, m);
      while (!intlin::equal(p, id)) {
        p = intlin::mul(p, m);
        ++order;
      }
      dec.obstruction = CrystallographicDecision::Obstruction::OrderGreaterThanTwo;
      dec.offending = m;
      dec.offending_order = order;
      return dec;
    }
  }
  for (const auto& a : closure)
    for (const auto& b : closure)
      if (!intlin::equal(intlin::mul(a, b), intlin::mul(b, a))) {
        dec.obstruction = CrystallographicDecision::Obstruction::NonCommuting;
        return dec;
      }

  // Joint eigenlattices over all sign characters on the generators.
  const int ng = static_cast<int>(point_gens.size());
  std::vector<IVec> basis_cols;
  int total_rank = 0;
  for (long mask = 0; mask < (1L << ng); ++mask) {
    IMat stacked;
    for (int i = 0; i < ng; ++i) {
      const long sign = (mask >> i) & 1 ? -1 : 1;
      for (int row = 0; row < r; ++row) {
        IVec v = point_gens[i][row];
        v[row] -= sign;
        stacked.push_back(std::move(v));
      }
    }
    if (ng == 0) break;
    std::vector<IVec> kernel = intlin::integer_kernel(stacked);
    total_rank += static_cast<int>(kernel.size());
    for (auto& v : kernel) basis_cols.push_back(std::move(v));
  }
  if (ng == 0) {  // trivial group: already diagonal
    dec.yes = true;
    dec.witness_basis = id;
    dec.lattice_index = 1;
    return dec;
  }
  if (total_rank < r) {
    dec.obstruction = CrystallographicDecision::Obstruction::EigenlatticeDefect;
    dec.lattice_index = 0;
    return dec;
  }
  IMat basis(r, IVec(r, 0));
  for (int c = 0; c < r; ++c)
    for (int row = 0; row < r; ++row) basis[row][c] = basis_cols[c][row];
  Int d = intlin::det(basis);
  if (d != 1 && d != -1) {
    dec.obstruction = CrystallographicDecision::Obstruction::EigenlatticeDefect;
    dec.lattice_index = abs(d);
    return dec;
  }
  dec.yes = true;
  dec.witness_basis = basis;
  dec.lattice_index = 1;
  // Exact confirmation: conjugation sends every closure element to diag(+-1).
  IMat binv = intlin::inverse_unimodular(basis);
  for (const auto& m : closure) {
    IMat conj = intlin::mul(binv, intlin::mul(m, basis));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        if (i == j ? (conj[i][j] != 1 && conj[i][j] != -1) : conj[i][j] != 0)
          throw ContractError("crysto_decide: internal witness verification failed");
      }
  }
  return dec;
}

DominanceReport dominance_compare(const GroupHandle& g, const std::vector<GroupElement>& s,
                                  const std::vector<GroupElement>& t, int radius,
                                  std::size_t budget) {
  DominanceReport rep;
  Ball bs = enumerate_ball_with(g, s, radius);
  Ball bt = enumerate_ball_with(g, t, radius);
  // Generation check: each element of either ball must be reachable from the
  // other generating set.
  for (const auto& e : bt.elements) {
    WordLengthResult w = word_length_with(g, s, e, budget);
    if (!w.exact)
      throw StructuralError("dominance_compare: S fails to generate B_T(R) within budget");
  }
  for (const auto& e : bs.elements) {
    WordLengthResult w = word_length_with(g, t, e, budget);
    if (!w.exact)
      throw StructuralError("dominance_compare: T fails to generate B_S(R) within budget");
  }
  rep.verified_generating = true;
  int sup_ts = 0;
  for (const auto& e : t) {
    WordLengthResult w = word_length_with(g, s, e, budget);
    if (!w.exact) {
      rep.relation = DominanceReport::Relation::Unknown;
      return rep;
    }
    sup_ts = std::max(sup_ts, w.length);
  }
  int sup_st = 0;
  for (const auto& e : s) {
    WordLengthResult w = word_length_with(g, t, e, budget);
    if (!w.exact) {
      rep.relation = DominanceReport::Relation::Unknown;
      return rep;
    }
    sup_st = std::max(sup_st, w.length);
  }
  rep.sup_t_in_s = sup_ts;
  rep.sup_s_in_t = sup_st;
  rep.relation = DominanceReport::Relation::Equivalent;
  return rep;
}

}  // namespace prodhyp
