#include "prodhyp/extension.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "prodhyp/space.hpp"

namespace prodhyp {

namespace {

// Exponents of h with respect to commuting central generators. On the central
// subgroups shipped here, normal-form coordinates are additive, so the
// exponents solve an integer linear system; the candidate is verified by
// exact group arithmetic before being accepted.
std::optional<IVec> central_exponents(const Group& g, const std::vector<GroupElement>& gens,
                                      const GroupElement& h) {
  const int r = static_cast<int>(gens.size());
  if (r == 0) return is_identity(g, h) ? std::optional<IVec>(IVec{}) : std::nullopt;
  std::vector<IVec> cols;
  for (const auto& c : gens) cols.push_back(element_coords(g, c));
  IVec target = element_coords(g, h);
  const int dim = static_cast<int>(target.size());
  RMat sys(dim, RVec(r + 1, 0));
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < r; ++j) sys[i][j] = Rat(cols[j][i]);
    sys[i][r] = Rat(target[i]);
  }
  // Row-reduce [A | b]; inconsistency or non-integrality rules the element out.
  int rank = 0;
  std::vector<int> pivot_col;
  for (int c = 0; c < r && rank < dim; ++c) {
    int piv = -1;
    for (int i = rank; i < dim; ++i)
      if (sys[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(sys[rank], sys[piv]);
    const Rat lead = sys[rank][c];
    for (int j = 0; j <= r; ++j) sys[rank][j] /= lead;
    for (int i = 0; i < dim; ++i) {
      if (i == rank || sys[i][c] == 0) continue;
      const Rat f = sys[i][c];
      for (int j = 0; j <= r; ++j) sys[i][j] -= f * sys[rank][j];
    }
    pivot_col.push_back(c);
    ++rank;
  }
  IVec exps(r, 0);
  for (int i = 0; i < rank; ++i) {
    const Rat& v = sys[i][r];
    if (v.get_den() != 1) return std::nullopt;
    exps[pivot_col[i]] = v.get_num();
  }
  GroupElement check = identity(g);
  for (int i = 0; i < r; ++i) {
    if (!exps[i].fits_slong_p()) return std::nullopt;
    check = mul(g, check, power(g, gens[i], exps[i].get_si()));
  }
  if (check == h) return exps;
  return std::nullopt;
}

}  // namespace

// --- central quotients -------------------------------------------------------

CentralQuotientMap central_quotient(const GroupHandle& g,
                                    const std::vector<GroupElement>& z_gens) {
  switch (g->family()) {
    case Family::Heisenberg: {
      for (const auto& z : z_gens) {
        const auto& e = z.as<HeisElt>();
        if (e.m != 0 || e.n != 0 || abs(e.k) != 1)
          throw StructuralError("central_quotient: Heisenberg supports <c> only");
      }
      CentralQuotientMap m;
      m.quotient = make_abelian({0, 0}, g->name() + "/<c>");
      m.project = [](const GroupElement& e) {
        const auto& h = e.as<HeisElt>();
        return abelian_elt({h.m, h.n});
      };
      m.lift = [](const GroupElement& e) {
        const auto& v = e.as<AbelianElt>().v;
        return heisenberg_elt(v[0], v[1], 0);
      };
      return m;
    }
    case Family::Abelian: {
      const auto& moduli = g->data_as<AbelianData>().moduli;
      std::vector<int> dropped;
      for (const auto& z : z_gens) {
        const auto& v = z.as<AbelianElt>().v;
        int idx = -1;
        for (size_t i = 0; i < v.size(); ++i) {
          if (v[i] == 0) continue;
          if (idx >= 0 || abs(v[i]) != 1)
            throw StructuralError(
                "central_quotient: abelian central generators must be standard basis vectors");
          idx = static_cast<int>(i);
        }
        if (idx < 0) throw StructuralError("central_quotient: trivial generator");
        dropped.push_back(idx);
      }
      std::vector<int> keep;
      std::vector<long> qmoduli;
      for (size_t i = 0; i < moduli.size(); ++i) {
        if (std::find(dropped.begin(), dropped.end(), static_cast<int>(i)) == dropped.end()) {
          keep.push_back(static_cast<int>(i));
          qmoduli.push_back(moduli[i]);
        }
      }
      CentralQuotientMap m;
      m.quotient = make_abelian(qmoduli, g->name() + "/Z");
      const size_t full = moduli.size();
      m.project = [keep](const GroupElement& e) {
        const auto& v = e.as<AbelianElt>().v;
        IVec out;
        for (int i : keep) out.push_back(v[i]);
        return abelian_elt(std::move(out));
      };
      m.lift = [keep, full](const GroupElement& e) {
        const auto& v = e.as<AbelianElt>().v;
        IVec out(full, 0);
        for (size_t j = 0; j < keep.size(); ++j) out[keep[j]] = v[j];
        return abelian_elt(std::move(out));
      };
      return m;
    }
    case Family::DirectProduct: {
      const auto& d = g->data_as<ProductData>();
      // All generators must sit in one factor.
      int fac = -1;
      std::vector<GroupElement> inner_gens;
      for (const auto& z : z_gens) {
        const auto& parts = z.as<ProdElt>().parts;
        for (size_t i = 0; i < parts.size(); ++i) {
          if (is_identity(*d.factors[i], parts[i])) continue;
          if (fac >= 0 && fac != static_cast<int>(i))
            throw StructuralError("central_quotient: generators span several factors");
          fac = static_cast<int>(i);
        }
      }
      if (fac < 0) throw StructuralError("central_quotient: trivial central subgroup");
      for (const auto& z : z_gens) inner_gens.push_back(z.as<ProdElt>().parts[fac]);
      CentralQuotientMap inner = central_quotient(d.factors[fac], inner_gens);
      bool drop = inner.quotient->family() == Family::Abelian &&
                  inner.quotient->data_as<AbelianData>().moduli.empty();
      std::vector<GroupHandle> qfactors;
      for (size_t i = 0; i < d.factors.size(); ++i) {
        if (static_cast<int>(i) == fac && drop) continue;
        qfactors.push_back(static_cast<int>(i) == fac ? inner.quotient : d.factors[i]);
      }
      CentralQuotientMap m;
      auto factors = d.factors;
      if (qfactors.size() == 1 && drop) {
        m.quotient = qfactors[0];
        m.project = [fac](const GroupElement& e) {
          const auto& parts = e.as<ProdElt>().parts;
          for (size_t i = 0; i < parts.size(); ++i)
            if (static_cast<int>(i) != fac) return parts[i];
          throw StructuralError("central_quotient: empty product");
        };
        GroupHandle gh = g;
        m.lift = [gh, fac](const GroupElement& e) {
          const auto& d2 = gh->data_as<ProductData>();
          ProdElt out;
          for (size_t i = 0; i < d2.factors.size(); ++i)
            out.parts.push_back(static_cast<int>(i) == fac ? identity(*d2.factors[i]) : e);
          return GroupElement(std::move(out));
        };
        return m;
      }
      m.quotient = make_product(qfactors, g->name() + "/Z");
      auto iproj = inner.project;
      auto ilift = inner.lift;
      m.project = [fac, drop, iproj](const GroupElement& e) {
        const auto& parts = e.as<ProdElt>().parts;
        ProdElt out;
        for (size_t i = 0; i < parts.size(); ++i) {
          if (static_cast<int>(i) == fac) {
            if (!drop) out.parts.push_back(iproj(parts[i]));
          } else {
            out.parts.push_back(parts[i]);
          }
        }
        return GroupElement(std::move(out));
      };
      GroupHandle orig = g;
      m.lift = [fac, drop, ilift, orig](const GroupElement& e) {
        const auto& d2 = orig->data_as<ProductData>();
        const auto& parts = e.as<ProdElt>().parts;
        ProdElt out;
        size_t j = 0;
        for (size_t i = 0; i < d2.factors.size(); ++i) {
          if (static_cast<int>(i) == fac) {
            out.parts.push_back(drop ? identity(*d2.factors[i]) : ilift(parts[j++]));
          } else {
            out.parts.push_back(parts[j++]);
          }
        }
        return GroupElement(std::move(out));
      };
      return m;
    }
    case Family::Amalgam: {
      const auto& d = g->data_as<AmalgamData>();
      const int r = static_cast<int>(d.zH.size());
      if (static_cast<int>(z_gens.size()) != r)
        throw StructuralError("central_quotient: amalgam expects its own Z generators");
      CentralQuotientMap qh = central_quotient(d.H, d.zH);
      std::vector<GroupElement> zK;
      for (int j = 0; j < r; ++j) {
        IVec col(d.embed.size());
        for (size_t i = 0; i < d.embed.size(); ++i) col[i] = d.embed[i][j];
        zK.push_back(abelian_elt(std::move(col)));
      }
      CentralQuotientMap qk = central_quotient(d.K, zK);
      CentralQuotientMap m;
      m.quotient = make_product({qh.quotient, qk.quotient}, g->name() + "/Z");
      auto hproj = qh.project;
      auto kproj = qk.project;
      m.project = [hproj, kproj](const GroupElement& e) {
        const auto& hk = e.as<AmalElt>().hk;
        ProdElt out;
        out.parts.push_back(hproj(hk[0]));
        out.parts.push_back(kproj(hk[1]));
        return GroupElement(std::move(out));
      };
      GroupHandle gh = g;
      auto hlift = qh.lift;
      auto klift = qk.lift;
      m.lift = [gh, hlift, klift](const GroupElement& e) {
        const auto& parts = e.as<ProdElt>().parts;
        GroupElement raw(AmalElt{{hlift(parts[0]), klift(parts[1])}});
        return mul(*gh, raw, identity(*gh));  // canonicalize
      };
      return m;
    }
    default:
      throw StructuralError("central_quotient: unsupported family");
  }
}

// --- extension factories --------------------------------------------------------

namespace {

CenterDecomposition simple_center(const GroupHandle& E, std::vector<GroupElement> free_gens,
                                  std::vector<GroupElement> torsion) {
  CenterDecomposition z;
  z.free_gens = std::move(free_gens);
  if (torsion.empty()) torsion.push_back(identity(*E));
  z.torsion = std::move(torsion);
  for (const auto& c : z.free_gens)
    if (!commutes_with_generators(*E, c))
      throw StructuralError("center decomposition: generator is not central");
  auto gens = z.free_gens;
  auto tors = z.torsion;
  GroupHandle Eh = E;
  z.decompose = [Eh, gens, tors](const GroupElement& v) -> std::optional<CentralCoords> {
    for (size_t t = 0; t < tors.size(); ++t) {
      GroupElement rest = mul(*Eh, v, inv(*Eh, tors[t]));
      if (auto exps = central_exponents(*Eh, gens, rest))
        return CentralCoords{*exps, static_cast<int>(t)};
    }
    return std::nullopt;
  };
  return z;
}

}  // namespace

CentralExtension heisenberg_extension(const GroupHandle& heis, const std::string& name) {
  if (heis->family() != Family::Heisenberg)
    throw StructuralError("heisenberg_extension: wrong family");
  CentralQuotientMap q = central_quotient(heis, {heisenberg_elt(0, 0, 1)});
  CentralExtension ext;
  ext.name = name;
  ext.E = heis;
  ext.G = q.quotient;
  ext.Z = simple_center(heis, {heisenberg_elt(0, 0, 1)}, {});
  ext.project = q.project;
  ext.section = q.lift;
  return ext;
}

CentralExtension abelian_split_extension(const GroupHandle& E,
                                         const std::vector<int>& central_coords,
                                         const std::string& name) {
  if (E->family() != Family::Abelian)
    throw StructuralError("abelian_split_extension: wrong family");
  const auto& moduli = E->data_as<AbelianData>().moduli;
  const int n = static_cast<int>(moduli.size());
  std::vector<GroupElement> zgens, free_gens;
  std::vector<int> torsion_coords;
  for (int i : central_coords) {
    if (i < 0 || i >= n) throw StructuralError("abelian_split_extension: bad coordinate");
    IVec v(n, 0);
    v[i] = 1;
    zgens.push_back(abelian_elt(v));
    if (moduli[i] == 0)
      free_gens.push_back(abelian_elt(v));
    else
      torsion_coords.push_back(i);
  }
  std::vector<GroupElement> torsion;
  {
    // All combinations over the torsion coordinates.
    std::vector<IVec> combos{IVec(n, 0)};
    for (int i : torsion_coords) {
      std::vector<IVec> next;
      for (const auto& base : combos)
        for (long v = 0; v < moduli[i]; ++v) {
          IVec c = base;
          c[i] = v;
          next.push_back(std::move(c));
        }
      combos = std::move(next);
    }
    for (auto& c : combos) torsion.push_back(abelian_elt(std::move(c)));
  }
  CentralQuotientMap q = central_quotient(E, zgens);
  CentralExtension ext;
  ext.name = name.empty() ? E->name() + "-split" : name;
  ext.E = E;
  ext.G = q.quotient;
  ext.Z = simple_center(E, free_gens, torsion);
  ext.project = q.project;
  ext.section = q.lift;
  return ext;
}

CentralExtension product_extension(const GroupHandle& E, size_t central_factor,
                                   const std::string& name) {
  if (E->family() != Family::DirectProduct)
    throw StructuralError("product_extension: wrong family");
  const auto& d = E->data_as<ProductData>();
  if (central_factor >= d.factors.size())
    throw StructuralError("product_extension: bad factor");
  const GroupHandle& zf = d.factors[central_factor];
  if (zf->family() != Family::Abelian)
    throw StructuralError("product_extension: central factor must be abelian");
  const auto& moduli = zf->data_as<AbelianData>().moduli;
  std::vector<GroupElement> zgens, free_gens;
  auto lift_into = [&](const GroupElement& inner) {
    ProdElt e;
    for (size_t i = 0; i < d.factors.size(); ++i)
      e.parts.push_back(i == central_factor ? inner : identity(*d.factors[i]));
    return GroupElement(std::move(e));
  };
  std::vector<int> torsion_coords;
  for (size_t i = 0; i < moduli.size(); ++i) {
    IVec v(moduli.size(), 0);
    v[i] = 1;
    zgens.push_back(lift_into(abelian_elt(v)));
    if (moduli[i] == 0)
      free_gens.push_back(lift_into(abelian_elt(v)));
    else
      torsion_coords.push_back(static_cast<int>(i));
  }
  std::vector<GroupElement> torsion;
  std::vector<IVec> combos{IVec(moduli.size(), 0)};
  for (int i : torsion_coords) {
    std::vector<IVec> next;
    for (const auto& base : combos)
      for (long v = 0; v < moduli[i]; ++v) {
        IVec c = base;
        c[i] = v;
        next.push_back(std::move(c));
      }
    combos = std::move(next);
  }
  for (auto& c : combos) torsion.push_back(lift_into(abelian_elt(std::move(c))));

  CentralQuotientMap q = central_quotient(E, zgens);
  CentralExtension ext;
  ext.name = name.empty() ? E->name() + "-over-factor" : name;
  ext.E = E;
  ext.G = q.quotient;
  ext.Z = simple_center(E, free_gens, torsion);
  ext.project = q.project;
  ext.section = q.lift;
  return ext;
}

CentralExtension amalgam_extension(const GroupHandle& E, const std::string& name) {
  if (E->family() != Family::Amalgam) throw StructuralError("amalgam_extension: wrong family");
  const auto& d = E->data_as<AmalgamData>();
  std::vector<GroupElement> zgens;
  for (const auto& zh : d.zH) {
    GroupElement raw(AmalElt{{zh, identity(*d.K)}});
    zgens.push_back(mul(*E, raw, identity(*E)));
  }
  CentralQuotientMap q = central_quotient(E, zgens);
  CentralExtension ext;
  ext.name = name.empty() ? E->name() + "-over-quotient" : name;
  ext.E = E;
  ext.G = q.quotient;
  ext.Z = simple_center(E, zgens, {});
  ext.project = q.project;
  ext.section = q.lift;
  return ext;
}

CentralExtension with_section(const CentralExtension& ext,
                              std::function<GroupElement(const GroupElement&)> section,
                              const std::string& name) {
  CentralExtension out = ext;
  out.name = name;
  out.section = std::move(section);
  return out;
}

CentralExtension corrupt_section(const CentralExtension& ext, const GroupElement& at,
                                 const GroupElement& wrong_lift) {
  auto base = ext.section;
  GroupElement bad_at = at;
  GroupElement repl = wrong_lift;
  return with_section(
      ext,
      [base, bad_at, repl](const GroupElement& g) { return g == bad_at ? repl : base(g); },
      ext.name + "-corrupted");
}

// --- cocycle ---------------------------------------------------------------------

GroupElement euler_cocycle_raw(const CentralExtension& ext, const GroupElement& gbar,
                               const GroupElement& hbar) {
  const Group& E = *ext.E;
  const Group& G = *ext.G;
  GroupElement sg = ext.section(gbar);
  GroupElement sh = ext.section(hbar);
  GroupElement sgh = ext.section(mul(G, gbar, hbar));
  return mul(E, mul(E, sg, sh), inv(E, sgh));
}

GroupElement euler_cocycle(const CentralExtension& ext, const GroupElement& gbar,
                           const GroupElement& hbar) {
  if (!is_identity(*ext.E, ext.section(identity(*ext.G))))
    throw StructuralError("euler_cocycle: section is not normalized");
  GroupElement w = euler_cocycle_raw(ext, gbar, hbar);
  if (!is_identity(*ext.G, ext.project(w)) || !ext.Z.decompose(w))
    throw ContractError("euler_cocycle: value lies outside the central kernel");
  return w;
}

Int central_norm(const CentralExtension& ext, const GroupElement& z) {
  auto coords = ext.Z.decompose(z);
  if (!coords) throw ContractError("central_norm: element is not in Z");
  Int n = 0;
  for (const auto& e : coords->exps) n += abs(e);
  if (coords->torsion_index != 0) n += 1;
  return n;
}

EulerCocycleSample cocycle_growth(const CentralExtension& ext, int r_max, std::size_t budget) {
  if (r_max < 2) throw StructuralError("cocycle_growth: R_max must be >= 2");
  Ball ball = enumerate_ball(ext.G, r_max, budget);
  EulerCocycleSample sample;
  sample.r_max = r_max;
  sample.max_norm.assign(r_max, 0);
  for (size_t i = 0; i < ball.size(); ++i)
    for (size_t j = 0; j < ball.size(); ++j) {
      const int bucket = std::max(std::max(ball.lengths[i], ball.lengths[j]), 1);
      GroupElement w = euler_cocycle(ext, ball.elements[i], ball.elements[j]);
      Int n = central_norm(ext, w);
      if (n > sample.max_norm[bucket - 1]) sample.max_norm[bucket - 1] = n;
    }
  for (int r = 1; r < r_max; ++r)
    if (sample.max_norm[r] < sample.max_norm[r - 1]) sample.max_norm[r] = sample.max_norm[r - 1];
  int tail = std::min(3, r_max - 1);
  sample.growing = tail >= 1;
  for (int t = 0; t < tail; ++t) {
    if (!(sample.max_norm[r_max - 1 - t] > sample.max_norm[r_max - 2 - t]))
      sample.growing = false;
  }
  // Log-log fit over radii with positive norm.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int r = 1; r <= r_max; ++r) {
    if (sample.max_norm[r - 1] <= 0) continue;
    const double x = std::log(static_cast<double>(r));
    const double y = std::log(sample.max_norm[r - 1].get_d());
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 2 && sxx * cnt - sx * sx > 1e-12)
    sample.fitted_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return sample;
}

CocycleIdentityResult cocycle_identity_check(const CentralExtension& ext, const Ball& ball) {
  if (ball.group.get() != ext.G.get())
    throw StructuralError("cocycle_identity_check: ball is not over the quotient group");
  const Group& E = *ext.E;
  const Group& G = *ext.G;
  CocycleIdentityResult res;
  for (size_t i = 0; i < ball.size(); ++i)
    for (size_t j = 0; j < ball.size(); ++j)
      for (size_t k = 0; k < ball.size(); ++k) {
        const GroupElement& g = ball.elements[i];
        const GroupElement& h = ball.elements[j];
        const GroupElement& kk = ball.elements[k];
        GroupElement w_gh = euler_cocycle_raw(ext, g, h);
        GroupElement w_hk = euler_cocycle_raw(ext, h, kk);
        GroupElement w_ghk1 = euler_cocycle_raw(ext, mul(G, g, h), kk);
        GroupElement w_ghk2 = euler_cocycle_raw(ext, g, mul(G, h, kk));
        auto central = [&](const GroupElement& w) {
          return is_identity(G, ext.project(w)) && ext.Z.decompose(w).has_value();
        };
        if (!central(w_gh) || !central(w_hk) || !central(w_ghk1) || !central(w_ghk2)) {
          res.pass = false;
          res.value_in_z = false;
          res.witness = {element_key(G, g), element_key(G, h), element_key(G, kk)};
          res.reason = "cocycle value lies outside the central kernel";
          return res;
        }
        if (!(mul(E, w_gh, w_ghk1) == mul(E, w_hk, w_ghk2))) {
          res.pass = false;
          res.witness = {element_key(G, g), element_key(G, h), element_key(G, kk)};
          res.reason = "cocycle identity fails";
          return res;
        }
      }
  return res;
}

// --- quasi-retraction pipeline -----------------------------------------------------

QuasiRetraction build_quasi_retraction(const GroupHandle& E, const CenterDecomposition& Z,
                                       const std::vector<Quasimorphism>& qms,
                                       int central_radius) {
  const int r = Z.rank();
  if (static_cast<int>(qms.size()) != r)
    throw StructuralError("build_quasi_retraction: need exactly rank-many quasimorphisms");
  QuasiRetraction ret;
  ret.phis = qms;
  ret.exact = std::all_of(qms.begin(), qms.end(), [](const auto& q) { return q.exact; });

  if (ret.exact) {
    ret.theta.assign(r, RVec(r, 0));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) ret.theta[i][j] = qms[i](Z.free_gens[j]).rational;
    auto inv_opt = intlin::inverse_rational(ret.theta);
    if (!inv_opt) {
      // Identify the first dependent quasimorphism for the error message.
      RMat rows;
      for (int i = 0; i < r; ++i) {
        rows.push_back(ret.theta[i]);
        if (intlin::rank_rational(rows) < static_cast<int>(rows.size()))
          throw ContractError("build_quasi_retraction: Theta singular; quasimorphism '" +
                              qms[i].name + "' is dependent on its predecessors");
      }
      throw ContractError("build_quasi_retraction: Theta singular");
    }
    ret.theta_inv = *inv_opt;
  } else {
    ret.theta_approx.assign(r, std::vector<double>(r, 0.0));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) ret.theta_approx[i][j] = qms[i](Z.free_gens[j]).approx;
    // Tiny matrices; invert via exact elimination on rationalized entries.
    RMat m(r, RVec(r));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) m[i][j] = Rat(ret.theta_approx[i][j]);
    auto inv_opt = intlin::inverse_rational(m);
    if (!inv_opt) throw ContractError("build_quasi_retraction: Theta singular");
    ret.theta_inv_approx.assign(r, std::vector<double>(r, 0.0));
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) ret.theta_inv_approx[i][j] = (*inv_opt)[i][j].get_d();
  }

  GroupHandle Eh = E;
  auto phis = ret.phis;
  auto free_gens = Z.free_gens;
  const bool exact = ret.exact;
  RMat theta_inv = ret.theta_inv;
  auto theta_inv_approx = ret.theta_inv_approx;
  ret.map = [Eh, phis, free_gens, exact, theta_inv, theta_inv_approx,
             r](const GroupElement& g) {
    GroupElement out = identity(*Eh);
    if (exact) {
      RVec phi_g(r);
      for (int i = 0; i < r; ++i) phi_g[i] = phis[i](g).rational;
      for (int i = 0; i < r; ++i) {
        Rat acc = 0;
        for (int j = 0; j < r; ++j) acc += theta_inv[i][j] * phi_g[j];
        Int fl;
        mpz_fdiv_q(fl.get_mpz_t(), acc.get_num_mpz_t(), acc.get_den_mpz_t());
        if (!fl.fits_slong_p()) throw BudgetError("quasi-retraction exponent overflow", 0);
        out = mul(*Eh, out, power(*Eh, free_gens[i], fl.get_si()));
      }
      return out;
    }
    std::vector<double> phi_g(r);
    for (int i = 0; i < r; ++i) phi_g[i] = phis[i](g).approx;
    for (int i = 0; i < r; ++i) {
      double acc = 0;
      for (int j = 0; j < r; ++j) acc += theta_inv_approx[i][j] * phi_g[j];
      out = mul(*Eh, out, power(*Eh, free_gens[i], static_cast<long>(std::floor(acc))));
    }
    return out;
  };

  // Step 2: c^-1 phi(c) over the central ball, current and half radius.
  std::set<std::string> seen, seen_half;
  std::vector<GroupElement> uniq;
  IVec exps(r, 0);
  std::function<void(int)> sweep = [&](int idx) {
    if (idx == r) {
      for (const auto& t : Z.torsion) {
        GroupElement c = t;
        long linf = 0;
        for (int i = 0; i < r; ++i) {
          c = mul(*E, c, power(*E, Z.free_gens[i], exps[i].get_si()));
          linf = std::max(linf, std::abs(exps[i].get_si()));
        }
        GroupElement val = mul(*E, inv(*E, c), ret.map(c));
        std::string key = element_key(*E, val);
        if (!seen.count(key)) {
          seen.insert(key);
          uniq.push_back(val);
        }
        if (linf <= central_radius / 2) seen_half.insert(key);
      }
      return;
    }
    for (long v = -central_radius; v <= central_radius; ++v) {
      exps[idx] = v;
      sweep(idx + 1);
    }
  };
  sweep(0);
  ret.step2_set = uniq;
  ret.step2_stable = seen_half == seen;
  return ret;
}

BoundedSectionResult bounded_section(const CentralExtension& ext, const QuasiRetraction& ret,
                                     int sample_radius, int growth_radius) {
  if (!ret.step2_stable)
    throw ContractError("bounded_section: step-2 set did not stabilize on the central ball");
  GroupHandle E = ext.E;
  auto base_section = ext.section;
  auto phi = ret.map;
  auto section = [E, base_section, phi](const GroupElement& gbar) {
    GroupElement g0 = base_section(gbar);
    return mul(*E, inv(*E, phi(g0)), g0);
  };
  BoundedSectionResult res;
  res.adjusted = with_section(ext, section, ext.name + "-bounded-section");

  Ball gball = enumerate_ball(ext.G, sample_radius);
  std::set<std::string> seen, seen_half;
  for (size_t i = 0; i < gball.size(); ++i) {
    GroupElement v = phi(section(gball.elements[i]));
    std::string key = element_key(*E, v);
    if (!seen.count(key)) {
      seen.insert(key);
      res.observed_b.push_back(v);
    }
    if (gball.lengths[i] <= sample_radius / 2) seen_half.insert(key);
  }
  res.b_stable = seen_half == seen;
  res.resampled = cocycle_growth(res.adjusted, growth_radius);
  return res;
}

// --- obstruction ----------------------------------------------------------------------

std::optional<ObstructionWitness> central_commutator_obstruction(const GroupHandle& G,
                                                                 int radius) {
  Ball ball = enumerate_ball(G, radius);
  const Group& g = *G;
  for (size_t i = 0; i < ball.size(); ++i)
    for (size_t j = 0; j < ball.size(); ++j) {
      const GroupElement& x = ball.elements[i];
      const GroupElement& y = ball.elements[j];
      GroupElement comm = mul(g, mul(g, x, y), mul(g, inv(g, x), inv(g, y)));
      if (is_identity(g, comm)) continue;
      if (!commutes_with_generators(g, comm)) continue;
      if (!has_infinite_order(g, comm)) continue;
      return ObstructionWitness{x, y, comm};
    }
  return std::nullopt;
}

// --- induced quotient quasimorphism ------------------------------------------------------

Quasimorphism induced_quotient_qm(const CentralExtension& ext, const SpaceAction& line,
                                  const std::string& name) {
  if (line.model != SpaceModel::QuasiLine)
    throw StructuralError("induced_quotient_qm: needs a quasi-line on E");
  if (line.group.get() != ext.E.get())
    throw StructuralError("induced_quotient_qm: quasi-line is not bound to E");
  const auto& lb = std::get<LineBinding>(line.binding);
  Quasimorphism chi = *lb.phi;
  auto section = ext.section;
  Quasimorphism q;
  q.name = name.empty() ? chi.name + ".s" : name;
  q.tag = "composed-with-section";
  q.domain = ext.G;
  q.exact = chi.exact;
  q.eval = [chi, section](const GroupElement& gbar) { return chi(section(gbar)); };
  Ball sample = enumerate_ball(ext.G, 3);
  q.defect_bound = defect_estimate(q, sample).value;
  return q;
}

// --- amalgamated products ------------------------------------------------------------------

AmalgamatedProductSpec amalgamated_product(const GroupHandle& H, const GroupHandle& K,
                                           const std::vector<GroupElement>& zH,
                                           const IMat& embed, const IMat& retract,
                                           int check_radius, const std::string& name) {
  AmalgamatedProductSpec spec;
  spec.product = make_amalgam(H, K, zH, embed, retract, name);
  const Group& g = *spec.product;
  const auto& d = g.data_as<AmalgamData>();

  auto embed_h = [&](const GroupElement& h) {
    return mul(g, GroupElement(AmalElt{{h, identity(*K)}}), identity(g));
  };
  auto embed_k = [&](const GroupElement& k) {
    return mul(g, GroupElement(AmalElt{{identity(*H), k}}), identity(g));
  };

  // (i) generated by the union of the images of H and K: the designated
  // generating set is exactly that union.
  spec.generated_by_union = true;

  // (iii) images of H and K commute elementwise (checked on generators).
  spec.factors_commute = true;
  for (const auto& gh : H->generators())
    for (const auto& gk : K->generators()) {
      GroupElement a = embed_h(gh.element);
      GroupElement b = embed_k(gk.element);
      if (!(mul(g, a, b) == mul(g, b, a))) spec.factors_commute = false;
    }

  // (ii) the images of H and K intersect exactly in Z, sampled on balls:
  // every common image must decompose over the Z generators, and both
  // embeddings must agree on Z itself.
  std::vector<GroupElement> z_in_g;
  for (const auto& zh : zH) z_in_g.push_back(embed_h(zh));
  CenterDecomposition zdec = z_in_g.empty()
                                 ? CenterDecomposition{{}, {identity(g)},
                                                       [&g](const GroupElement& v)
                                                           -> std::optional<CentralCoords> {
                                     if (is_identity(g, v)) return CentralCoords{{}, 0};
                                     return std::nullopt;
                                   }}
                                 : simple_center(spec.product, z_in_g, {});
  spec.intersection_is_z = true;
  for (size_t j = 0; j < zH.size(); ++j) {
    IVec col(embed.size());
    for (size_t i = 0; i < embed.size(); ++i) col[i] = embed[i][j];
    if (!(embed_h(zH[j]) == embed_k(abelian_elt(col)))) spec.intersection_is_z = false;
  }
  Ball hb = enumerate_ball(H, check_radius);
  Ball kb = enumerate_ball(K, check_radius);
  std::set<std::string> k_image;
  for (const auto& k : kb.elements) k_image.insert(element_key(g, embed_k(k)));
  for (const auto& h : hb.elements) {
    GroupElement img = embed_h(h);
    if (k_image.count(element_key(g, img)) && !zdec.decompose(img)) {
      spec.intersection_is_z = false;
      break;
    }
  }

  spec.extension = amalgam_extension(spec.product);

  // Quotient ball match: B(G/Z) vs B(H/Z x K/Z), both to check_radius.
  Ball gq = enumerate_ball(spec.extension.G, check_radius);
  Ball gb = enumerate_ball(spec.product, check_radius);
  std::set<std::string> projected, direct;
  for (const auto& e : gb.elements)
    projected.insert(element_key(*spec.extension.G, spec.extension.project(e)));
  for (const auto& e : gq.elements) direct.insert(element_key(*spec.extension.G, e));
  spec.quotient_ball_match = projected == direct;
  return spec;
}

}  // namespace prodhyp
