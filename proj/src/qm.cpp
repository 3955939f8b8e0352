#include "prodhyp/qm.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

#include "prodhyp/space.hpp"

namespace prodhyp {

namespace {

void require_same_group(const GroupHandle& a, const GroupHandle& b, const char* what) {
  if (a.get() != b.get())
    throw StructuralError(std::string(what) + ": objects bound to different group instances");
}

Rat signed_coord(const LinePoint& p) { return p.value; }

}  // namespace

// --- factories ----------------------------------------------------------------

Quasimorphism qm_coordinate(const GroupHandle& g, int index, const std::string& name) {
  Quasimorphism q;
  q.domain = g;
  q.tag = "coordinate-homomorphism";
  q.exact = true;
  q.defect_bound = 0.0;
  switch (g->family()) {
    case Family::Abelian: {
      const auto& moduli = g->data_as<AbelianData>().moduli;
      if (index < 0 || index >= static_cast<int>(moduli.size()))
        throw StructuralError("qm_coordinate: index out of range");
      q.defect_bound = moduli[index] == 0 ? 0.0 : static_cast<double>(moduli[index]);
      q.eval = [index](const GroupElement& e) { return QmValue::of(Rat(e.as<AbelianElt>().v[index])); };
      break;
    }
    case Family::Heisenberg: {
      if (index == 0)
        q.eval = [](const GroupElement& e) { return QmValue::of(Rat(e.as<HeisElt>().m)); };
      else if (index == 1)
        q.eval = [](const GroupElement& e) { return QmValue::of(Rat(e.as<HeisElt>().n)); };
      else
        throw StructuralError(
            "qm_coordinate: the central Heisenberg exponent has unbounded defect");
      break;
    }
    case Family::BaumslagSolitar:
      q.eval = [](const GroupElement& e) { return QmValue::of(Rat(e.as<BSElt>().k)); };
      break;
    case Family::AnosovTorus:
      q.eval = [](const GroupElement& e) { return QmValue::of(Rat(e.as<AnosovElt>().k)); };
      break;
    case Family::Crystallographic: {
      const auto& d = g->data_as<CrystData>();
      if (index < 0 || index >= d.rank) throw StructuralError("qm_coordinate: index out of range");
      for (const auto& m : d.elements)
        for (int j = 0; j < d.rank; ++j)
          if (m[index][j] != Int(j == index ? 1 : 0))
            throw StructuralError(
                "qm_coordinate: coordinate is not invariant under the point group");
      q.eval = [index](const GroupElement& e) { return QmValue::of(Rat(e.as<CrystElt>().v[index])); };
      break;
    }
    default:
      throw StructuralError("qm_coordinate: unsupported family; use a component lift");
  }
  q.name = name.empty() ? "coord" + std::to_string(index) : name;
  return q;
}

Quasimorphism qm_combo(const std::vector<std::pair<Rat, Quasimorphism>>& terms,
                       const std::string& name) {
  if (terms.empty()) throw StructuralError("qm_combo: empty combination");
  Quasimorphism q;
  q.name = name;
  q.tag = "combination";
  q.domain = terms[0].second.domain;
  q.exact = true;
  double bound = 0.0;
  for (const auto& [c, phi] : terms) {
    require_same_group(q.domain, phi.domain, "qm_combo");
    q.exact = q.exact && phi.exact;
    bound += std::abs(c.get_d()) * phi.defect_bound;
  }
  q.defect_bound = bound;
  auto copy = terms;
  const bool exact = q.exact;
  q.eval = [copy, exact](const GroupElement& e) {
    if (exact) {
      Rat acc = 0;
      for (const auto& [c, phi] : copy) acc += c * phi(e).rational;
      return QmValue::of(acc);
    }
    double acc = 0.0;
    for (const auto& [c, phi] : copy) acc += c.get_d() * phi(e).approx;
    return QmValue::of(acc);
  };
  return q;
}

Quasimorphism qm_floor_sqrt(const GroupHandle& g, long d, const std::string& name) {
  if (g->family() != Family::Abelian || g->data_as<AbelianData>().moduli != std::vector<long>{0})
    throw StructuralError("qm_floor_sqrt: domain must be Z");
  Quasimorphism q;
  q.name = name.empty() ? "floor-sqrt" + std::to_string(d) : name;
  q.tag = "user-table";
  q.domain = g;
  q.exact = true;
  q.defect_bound = 1.0;  // floor(x)+floor(y) <= floor(x+y) <= floor(x)+floor(y)+1
  q.eval = [d](const GroupElement& e) {
    const Int& m = e.as<AbelianElt>().v[0];
    return QmValue::of(Rat(ExactScalar(Rat(0), Rat(m), d).floor()));
  };
  return q;
}

Quasimorphism qm_mod_linear(const GroupHandle& g, long a, long mod, const std::string& name) {
  if (g->family() != Family::Abelian || g->data_as<AbelianData>().moduli != std::vector<long>{0})
    throw StructuralError("qm_mod_linear: domain must be Z");
  if (mod < 1) throw StructuralError("qm_mod_linear: modulus must be >= 1");
  Quasimorphism q;
  q.name = name.empty() ? "linear-mod" + std::to_string(mod) : name;
  q.tag = "user-table";
  q.domain = g;
  q.exact = true;
  q.defect_bound = static_cast<double>(mod);
  q.eval = [a, mod](const GroupElement& e) {
    const Int& m = e.as<AbelianElt>().v[0];
    Int r;
    mpz_fdiv_r_ui(r.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(mod));
    return QmValue::of(Rat(Int(a) * m + r));
  };
  return q;
}

Quasimorphism qm_product_component(const GroupHandle& product, size_t factor,
                                   const Quasimorphism& inner, const std::string& name) {
  if (product->family() != Family::DirectProduct)
    throw StructuralError("qm_product_component: domain must be a direct product");
  const auto& d = product->data_as<ProductData>();
  if (factor >= d.factors.size()) throw StructuralError("qm_product_component: bad factor index");
  require_same_group(d.factors[factor], inner.domain, "qm_product_component");
  Quasimorphism q;
  q.name = name.empty() ? inner.name + "@" + std::to_string(factor) : name;
  q.tag = inner.tag;
  q.domain = product;
  q.exact = inner.exact;
  q.defect_bound = inner.defect_bound;
  Quasimorphism in = inner;
  q.eval = [in, factor](const GroupElement& e) { return in(e.as<ProdElt>().parts[factor]); };
  return q;
}

Quasimorphism qm_custom(const GroupHandle& g, std::string name,
                        std::function<QmValue(const GroupElement&)> fn, double defect_bound,
                        bool exact) {
  Quasimorphism q;
  q.name = std::move(name);
  q.tag = "user-table";
  q.domain = g;
  q.defect_bound = defect_bound;
  q.exact = exact;
  q.eval = std::move(fn);
  return q;
}

// --- defect / homogenization -----------------------------------------------------

DefectEstimate defect_estimate(const Quasimorphism& phi, const Ball& ball) {
  require_same_group(phi.domain, ball.group, "defect_estimate");
  const Group& g = *ball.group;
  DefectEstimate best;
  best.exact = phi.exact;
  if (phi.exact) {
    std::vector<Rat> vals(ball.size());
    for (size_t i = 0; i < ball.size(); ++i) vals[i] = phi(ball.elements[i]).rational;
    for (size_t i = 0; i < ball.size(); ++i)
      for (size_t j = 0; j < ball.size(); ++j) {
        Rat d = phi(mul(g, ball.elements[i], ball.elements[j])).rational - vals[i] - vals[j];
        if (d < 0) d = -d;
        if (d > best.rational) {
          best.rational = d;
          best.witness = {element_key(g, ball.elements[i]), element_key(g, ball.elements[j])};
        }
      }
    best.value = best.rational.get_d();
    return best;
  }
  std::vector<double> vals(ball.size());
  for (size_t i = 0; i < ball.size(); ++i) vals[i] = phi(ball.elements[i]).approx;
  for (size_t i = 0; i < ball.size(); ++i)
    for (size_t j = 0; j < ball.size(); ++j) {
      double d = std::abs(phi(mul(g, ball.elements[i], ball.elements[j])).approx - vals[i] - vals[j]);
      if (d > best.value) {
        best.value = d;
        best.witness = {element_key(g, ball.elements[i]), element_key(g, ball.elements[j])};
      }
    }
  return best;
}

HomogenizationResult homogenize(const Quasimorphism& phi, const GroupElement& g, long N) {
  if (N < 1) throw StructuralError("homogenize: N must be >= 1");
  HomogenizationResult r;
  r.exponent = N;
  r.error_bound = phi.defect_bound / static_cast<double>(N);
  QmValue v = phi(power(*phi.domain, g, N));
  if (v.exact) {
    r.exact = true;
    r.rational = v.rational / N;
    r.value = r.rational.get_d();
  } else {
    r.value = v.approx / static_cast<double>(N);
  }
  return r;
}

// --- Busemann ---------------------------------------------------------------------

BusemannValue busemann_qm(const SpaceAction& action, const GroupElement& g, long depth) {
  if (action.model != SpaceModel::QuasiLine || !action.orientable_lineal)
    throw ContractError("busemann_qm: requires an orientable lineal quasi-line action");
  const auto& b = std::get<LineBinding>(action.binding);
  if (!b.direction)
    throw ContractError("busemann_qm: no designated loxodromic direction configured");
  const Group& grp = *action.group;
  QmValue step = (*b.phi)(*b.direction);
  if (step.exact ? step.rational == 0 : std::abs(step.approx) < 1e-12)
    throw ContractError("busemann_qm: designated direction has zero translation length");

  auto estimate = [&](long m) -> QmValue {
    GroupElement hm = power(grp, *b.direction, m);
    Point far = act(action, hm, action.basepoint);
    Point moved = act(action, g, far);
    const auto& x = std::get<LinePoint>(moved);
    const auto& y = std::get<LinePoint>(far);
    if (x.exact && y.exact) return QmValue::of(signed_coord(x) - signed_coord(y));
    return QmValue::of(x.approx - y.approx);
  };

  QmValue now = estimate(depth);
  QmValue half = estimate(std::max<long>(1, depth / 2));
  BusemannValue r;
  r.value = now.exact ? now.rational.get_d() : now.approx;
  r.exact = now.exact;
  if (now.exact) r.rational = now.rational;
  r.stabilization_delta =
      std::abs((now.exact ? now.rational.get_d() : now.approx) -
               (half.exact ? half.rational.get_d() : half.approx));
  r.stabilized = r.stabilization_delta < 1e-6;
  return r;
}

Quasimorphism qm_busemann(const std::shared_ptr<const SpaceAction>& action,
                          const std::string& name) {
  Quasimorphism q;
  q.name = name;
  q.tag = "busemann-approx";
  q.domain = action->group;
  q.exact = false;
  const auto& b = std::get<LineBinding>(action->binding);
  q.defect_bound = 3.0 * b.phi->defect_bound;
  q.eval = [action](const GroupElement& e) {
    long depth = 4;
    BusemannValue v = busemann_qm(*action, e, depth);
    while (!v.stabilized && depth < (1L << 10)) {
      depth *= 2;
      v = busemann_qm(*action, e, depth);
    }
    return QmValue::of(v.value);
  };
  return q;
}

// --- transfer -----------------------------------------------------------------------

Quasimorphism transfer(const Quasimorphism& phi_on_h, const FiniteIndexSubgroup& sub,
                       const Ball& defect_sample, const std::string& name) {
  const GroupHandle& G = sub.G;
  require_same_group(phi_on_h.domain, G, "transfer");
  const size_t n = sub.transversal.size();
  if (n == 0) throw StructuralError("transfer: empty transversal");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      GroupElement d = mul(*G, inv(*G, sub.transversal[j]), sub.transversal[i]);
      if (sub.contains(d))
        throw StructuralError("transfer: representatives share a coset");
    }

  auto contains = sub.contains;
  auto reps = sub.transversal;
  const bool exact = phi_on_h.exact;
  Quasimorphism q;
  q.name = name.empty() ? "transfer(" + phi_on_h.name + ")" : name;
  q.tag = "transfer";
  q.domain = G;
  q.exact = exact;
  Quasimorphism phi = phi_on_h;
  GroupHandle Gh = G;
  q.eval = [phi, reps, contains, Gh, exact](const GroupElement& g) {
    const Group& grp = *Gh;
    const long n = static_cast<long>(reps.size());
    Rat acc_exact = 0;
    double acc = 0.0;
    for (const auto& ti : reps) {
      GroupElement tig = mul(grp, ti, g);
      bool found = false;
      for (const auto& tj : reps) {
        GroupElement h = mul(grp, inv(grp, tj), tig);
        if (contains(h)) {
          // term phi(t_i g t_j^-1) with t_i g in t_j H
          GroupElement arg = mul(grp, tig, inv(grp, tj));
          if (!contains(arg))
            throw StructuralError("transfer: H is not normal for this configuration");
          QmValue v = phi(arg);
          if (exact)
            acc_exact += v.rational;
          else
            acc += v.approx;
          found = true;
          break;
        }
      }
      if (!found) throw StructuralError("transfer: representatives are not a transversal");
    }
    if (exact) return QmValue::of(acc_exact / n);
    return QmValue::of(acc / static_cast<double>(n));
  };
  q.defect_bound = 0.0;
  q.defect_bound = defect_estimate(q, defect_sample).value;
  return q;
}

// --- rank extraction -----------------------------------------------------------------

namespace {

// Reduce v against the reduced basis rows; returns true if a nonzero residual
// remains (and appends it).
bool rational_extend(std::vector<RVec>& basis, std::vector<int>& pivots, RVec v) {
  for (size_t b = 0; b < basis.size(); ++b) {
    const int p = pivots[b];
    if (v[p] == 0) continue;
    const Rat f = v[p];
    for (size_t j = 0; j < v.size(); ++j) v[j] -= f * basis[b][j];
  }
  int piv = -1;
  for (size_t j = 0; j < v.size(); ++j)
    if (v[j] != 0) {
      piv = static_cast<int>(j);
      break;
    }
  if (piv < 0) return false;
  const Rat lead = v[piv];
  for (auto& x : v) x /= lead;
  basis.push_back(std::move(v));
  pivots.push_back(piv);
  return true;
}

bool double_extend(std::vector<std::vector<double>>& basis, std::vector<double> v) {
  double orig = 0.0;
  for (double x : v) orig += x * x;
  if (orig == 0.0) return false;
  for (const auto& b : basis) {
    double dot = 0.0, nb = 0.0;
    for (size_t j = 0; j < v.size(); ++j) {
      dot += v[j] * b[j];
      nb += b[j] * b[j];
    }
    if (nb == 0.0) continue;
    const double f = dot / nb;
    for (size_t j = 0; j < v.size(); ++j) v[j] -= f * b[j];
  }
  double res = 0.0;
  for (double x : v) res += x * x;
  if (std::sqrt(res) <= 1e-9 * std::sqrt(orig)) return false;
  basis.push_back(std::move(v));
  return true;
}

}  // namespace

RankExtractionReport extract_rank(const std::vector<Quasimorphism>& qms, const Ball& ball) {
  if (qms.empty()) throw StructuralError("extract_rank: no quasimorphisms");
  for (const auto& q : qms) require_same_group(q.domain, ball.group, "extract_rank");
  const size_t m = qms.size(), cols = ball.size();
  const bool exact = std::all_of(qms.begin(), qms.end(), [](const auto& q) { return q.exact; });

  RankExtractionReport rep;
  rep.exact = exact;

  if (exact) {
    RMat rows(m, RVec(cols));
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < cols; ++j) rows[i][j] = qms[i](ball.elements[j]).rational;
    // Earliest-index-first maximal independent prefix of quasimorphisms.
    std::vector<RVec> basis;
    std::vector<int> pivots;
    for (size_t i = 0; i < m; ++i)
      if (rational_extend(basis, pivots, rows[i])) rep.selected.push_back(static_cast<int>(i));
    const size_t r = rep.selected.size();
    rep.rank = static_cast<int>(r);
    // Witness elements: first columns (in enumeration order) with independent
    // restrictions to the selected rows.
    std::vector<RVec> cb;
    std::vector<int> cp;
    std::vector<size_t> witness_cols;
    for (size_t j = 0; j < cols && witness_cols.size() < r; ++j) {
      RVec col(r);
      for (size_t i = 0; i < r; ++i) col[i] = rows[rep.selected[i]][j];
      if (rational_extend(cb, cp, col)) witness_cols.push_back(j);
    }
    rep.theta.assign(r, RVec(r, 0));
    for (size_t wj = 0; wj < witness_cols.size(); ++wj) {
      rep.witnesses.push_back(ball.elements[witness_cols[wj]]);
      rep.witness_radii.push_back(ball.lengths[witness_cols[wj]]);
      for (size_t i = 0; i < r; ++i) rep.theta[i][wj] = rows[rep.selected[i]][witness_cols[wj]];
    }
    rep.threshold_radius = rep.witness_radii.empty() ? 0 : rep.witness_radii.back();
    return rep;
  }

  std::vector<std::vector<double>> rows(m, std::vector<double>(cols));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < cols; ++j) rows[i][j] = qms[i](ball.elements[j]).approx;
  Eigen::MatrixXd full(m, cols);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < cols; ++j) full(i, j) = rows[i][j];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(full);
  const auto& sv = svd.singularValues();
  int svd_rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-9 * sv(0)) ++svd_rank;
  std::vector<std::vector<double>> basis;
  for (size_t i = 0; i < m; ++i)
    if (double_extend(basis, rows[i])) rep.selected.push_back(static_cast<int>(i));
  const size_t r = rep.selected.size();
  rep.rank = svd_rank;
  std::vector<std::vector<double>> cb;
  std::vector<size_t> witness_cols;
  for (size_t j = 0; j < cols && witness_cols.size() < r; ++j) {
    std::vector<double> col(r);
    for (size_t i = 0; i < r; ++i) col[i] = rows[rep.selected[i]][j];
    if (double_extend(cb, col)) witness_cols.push_back(j);
  }
  rep.theta_approx.assign(r, std::vector<double>(r, 0.0));
  for (size_t wj = 0; wj < witness_cols.size(); ++wj) {
    rep.witnesses.push_back(ball.elements[witness_cols[wj]]);
    rep.witness_radii.push_back(ball.lengths[witness_cols[wj]]);
    for (size_t i = 0; i < r; ++i) rep.theta_approx[i][wj] = rows[rep.selected[i]][witness_cols[wj]];
  }
  rep.threshold_radius = rep.witness_radii.empty() ? 0 : rep.witness_radii.back();
  return rep;
}

// --- commutator bound -------------------------------------------------------------------

CommutatorBound commutator_displacement_bound(const SpaceAction& action, const Ball& ball) {
  if (!action.orientable_lineal)
    throw ContractError("commutator_displacement_bound: action is not orientable lineal");
  require_same_group(action.group, ball.group, "commutator_displacement_bound");
  const Group& g = *ball.group;
  CommutatorBound best;
  for (size_t i = 0; i < ball.size(); ++i)
    for (size_t j = 0; j < ball.size(); ++j) {
      const GroupElement& x = ball.elements[i];
      const GroupElement& y = ball.elements[j];
      GroupElement comm =
          mul(g, mul(g, x, y), mul(g, inv(g, x), inv(g, y)));
      Distance d = dist(action, action.basepoint, act(action, comm, action.basepoint));
      if (d.exact && best.exact) {
        Rat len = d.value.rational_part();  // quasi-line distances are rational
        if (len > best.rational) {
          best.rational = len;
          best.value = len.get_d();
          best.witness = {element_key(g, x), element_key(g, y)};
        }
      } else {
        best.exact = false;
        const double len = d.length();
        if (len > best.value) {
          best.value = len;
          best.witness = {element_key(g, x), element_key(g, y)};
        }
      }
    }
  return best;
}

}  // namespace prodhyp
