#include "prodhyp/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "prodhyp/highprec.hpp"
#include "prodhyp/verify.hpp"

namespace prodhyp {

using nlohmann::json;

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StructuralError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json json_double(double v) {
  return json{{"approx", highprec::format_double(v)}, {"prec", "50-digit-eval"}};
}

json json_rat(const Rat& r) { return json{{"exact", rat_str(r)}}; }

namespace {

std::vector<double> thresholds_of(const Experiment& e) {
  std::vector<double> out;
  for (const auto& t : e.params.value("thresholds", json::array()))
    out.push_back(t.get<double>());
  return out;
}

json distance_json(const Distance& d) {
  json j;
  j["length"] = highprec::format_double(d.length());
  if (d.exact) {
    j["exact"] = d.value.str();
    j["domain"] = d.kind == Distance::Kind::Cosh ? "cosh" : "linear";
  }
  return j;
}

std::string run_balls(const Workspace& ws, const Experiment& e, const std::string& out_dir) {
  GroupHandle g = ws.group(e.params.at("group").get<std::string>());
  const int radius = e.params.at("radius").get<int>();
  Ball ball = enumerate_ball(g, radius);
  std::ostringstream csv;
  csv << "element,word_length\n";
  for (size_t i = 0; i < ball.size(); ++i)
    csv << '"' << element_key(*g, ball.elements[i]) << "\"," << ball.lengths[i] << "\n";
  write_file_atomic(out_dir + "/" + e.name + ".csv", csv.str());
  json j;
  j["experiment"] = e.name;
  j["group"] = g->name();
  json sizes = json::array();
  for (int r = 0; r <= radius; ++r)
    sizes.push_back(static_cast<long>(ball.sphere_begin[r + 1]));
  j["ball_sizes"] = sizes;
  write_file_atomic(out_dir + "/" + e.name + ".json", dump_json(j));
  return e.name + ": |B(" + std::to_string(radius) + ")| = " +
         std::to_string(ball.size());
}

std::string run_properness(const Workspace& ws, const Experiment& e,
                           const std::string& out_dir) {
  GroupHandle g = ws.group(e.params.at("group").get<std::string>());
  std::vector<std::shared_ptr<SpaceAction>> holders;
  std::vector<const SpaceAction*> actions;
  for (const auto& a : e.params.at("actions")) {
    holders.push_back(ws.action(a.get<std::string>()));
    actions.push_back(holders.back().get());
  }
  const int radius = e.params.at("radius").get<int>();
  const auto thresholds = thresholds_of(e);
  DisplacementProfile prof = displacement_profile(g, actions, radius, thresholds);
  PropernessReport rep = properness_report(prof);

  std::ostringstream csv;
  csv << "radius,min_displacement,max_displacement";
  for (double c : thresholds) csv << ",count@" << highprec::format_double(c);
  csv << "\n";
  for (int r = 0; r <= prof.r_max; ++r) {
    csv << r << ',' << highprec::format_double(prof.min_per_radius[r]) << ','
        << highprec::format_double(prof.max_per_radius[r]);
    for (size_t t = 0; t < thresholds.size(); ++t) csv << ',' << prof.counts[t][r];
    csv << "\n";
  }
  write_file_atomic(out_dir + "/" + e.name + ".csv", csv.str());

  json j;
  j["experiment"] = e.name;
  j["group"] = g->name();
  j["actions"] = prof.action_names;
  j["all_terms_exact"] = prof.all_exact;
  j["partial"] = prof.partial;
  j["verdict"] = rep.proper_evidence ? "proper-evidence" : "not-proper-at-these-thresholds";
  json th = json::array();
  for (const auto& t : rep.per_threshold) {
    th.push_back(json{{"threshold", highprec::format_double(t.threshold)},
                      {"final_count", t.final_count},
                      {"stabilized", t.stabilized},
                      {"stabilization_radius", t.stabilization_radius}});
  }
  j["thresholds"] = th;
  write_file_atomic(out_dir + "/" + e.name + ".json", dump_json(j));
  return e.name + ": " + (rep.proper_evidence ? "proper-evidence" : "no-stabilization");
}

std::string run_cobound(const Workspace& ws, const Experiment& e, const std::string& out_dir) {
  auto action = ws.action(e.params.at("action").get<std::string>());
  const int radius = e.params.at("radius").get<int>();
  Ball ball = enumerate_ball(action->group, radius);
  CoboundednessReport rep;
  if (action->model == SpaceModel::QuasiLine) {
    rep = coboundedness_window(*action, ball, e.params.at("window").get<double>());
  } else if (action->model == SpaceModel::UpperHalfPlane) {
    Rat x0(0), x1(1), y0(1), y1(2);
    if (action->group->family() == Family::BaumslagSolitar)
      y1 = Rat(action->group->data_as<BSData>().n);
    if (e.params.contains("rectangle")) {
      const auto& r = e.params.at("rectangle");
      x0 = Rat(r.at(0).get<long>());
      x1 = Rat(r.at(1).get<long>());
      y0 = Rat(r.at(2).get<long>());
      y1 = Rat(r.at(3).get<long>());
    }
    rep = coboundedness_rectangle(*action, ball, x0, x1, y0, y1, e.params.value("grid", 8));
  } else {
    throw ContractError("cobound: quasi-line or uhp action expected");
  }
  json j;
  j["experiment"] = e.name;
  j["action"] = action->name;
  j["window"] = rep.window_desc;
  j["orbit_size"] = static_cast<long>(rep.orbit_size);
  j["covering_radius"] = json_double(rep.covering_radius);
  if (rep.exact) j["covering_radius_exact"] = rat_str(rep.exact_value);
  write_file_atomic(out_dir + "/" + e.name + ".json", dump_json(j));
  return e.name + ": covering radius " + highprec::format_double(rep.covering_radius);
}

std::string run_euler(const Workspace& ws, const Experiment& e, const std::string& out_dir) {
  auto ext = ws.extension(e.params.at("extension").get<std::string>());
  const int radius = e.params.at("radius").get<int>();
  EulerCocycleSample s = cocycle_growth(*ext, radius);
  std::ostringstream csv;
  csv << "radius,max_norm\n";
  for (int r = 1; r <= s.r_max; ++r) csv << r << ',' << s.max_norm[r - 1].get_str() << "\n";
  write_file_atomic(out_dir + "/" + e.name + ".csv", csv.str());
  json j;
  j["experiment"] = e.name;
  j["extension"] = ext->name;
  j["verdict"] = s.growing ? "growing" : "bounded-evidence";
  j["fitted_exponent"] = json_double(s.fitted_exponent);
  write_file_atomic(out_dir + "/" + e.name + ".json", dump_json(j));
  return e.name + ": " + (s.growing ? "growing" : "bounded-evidence");
}

std::string run_retraction(const Workspace& ws, const Experiment& e,
                           const std::string& out_dir) {
  auto ext = ws.extension(e.params.at("extension").get<std::string>());
  std::vector<Quasimorphism> qms;
  for (const auto& q : e.params.at("quasimorphisms"))
    qms.push_back(*ws.quasimorphism(q.get<std::string>()));
  const int radius = e.params.value("radius", 6);
  QuasiRetraction ret = build_quasi_retraction(ext->E, ext->Z, qms, radius);
  BoundedSectionResult bs = bounded_section(*ext, ret, radius, e.params.value("growth_radius", 4));
  json j;
  j["experiment"] = e.name;
  j["extension"] = ext->name;
  j["exact"] = ret.exact;
  if (ret.exact) {
    json theta = json::array();
    for (const auto& row : ret.theta) {
      json r = json::array();
      for (const auto& v : row) r.push_back(rat_str(v));
      theta.push_back(r);
    }
    j["theta"] = theta;
  }
  j["step2_set_size"] = static_cast<long>(ret.step2_set.size());
  j["step2_stable"] = ret.step2_stable;
  j["bounded_image_size"] = static_cast<long>(bs.observed_b.size());
  j["bounded_image_stable"] = bs.b_stable;
  j["resampled_verdict"] = bs.resampled.growing ? "growing" : "bounded-evidence";
  write_file_atomic(out_dir + "/" + e.name + ".json", dump_json(j));
  return e.name + ": step2 |A|=" + std::to_string(ret.step2_set.size()) + ", resample " +
         (bs.resampled.growing ? "growing" : "bounded-evidence");
}

std::string run_crysto(const Workspace&, const Experiment& e, const std::string& out_dir) {
  std::vector<IMat> gens;
  for (const auto& m : e.params.at("matrices")) {
    IMat mat;
    for (const auto& row : m) {
      IVec r;
      for (const auto& v : row) r.push_back(Int(v.get<long>()));
      mat.push_back(std::move(r));
    }
    gens.push_back(std::move(mat));
  }
  const int rank = e.params.at("rank").get<int>();
  CrystallographicDecision dec = crysto_decide(gens, rank);
  json j;
  j["experiment"] = e.name;
  j["verdict"] = dec.yes ? "yes" : "no";
  j["closure_size"] = dec.closure_size;
  j["interpretation"] = dec.note;
  if (dec.yes) {
    json b = json::array();
    for (const auto& row : dec.witness_basis) {
      json r = json::array();
      for (const auto& v : row) r.push_back(v.get_si());
      b.push_back(r);
    }
    j["witness_basis"] = b;
  } else {
    switch (dec.obstruction) {
      case CrystallographicDecision::Obstruction::OrderGreaterThanTwo: {
        j["obstruction"] = "element-of-order-greater-than-2";
        j["order"] = dec.offending_order;
        json m = json::array();
        for (const auto& row : dec.offending) {
          json r = json::array();
          for (const auto& v : row) r.push_back(v.get_si());
          m.push_back(r);
        }
        j["element"] = m;
        break;
      }
      case CrystallographicDecision::Obstruction::NonCommuting:
        j["obstruction"] = "non-commuting-pair";
        break;
      case CrystallographicDecision::Obstruction::EigenlatticeDefect:
        j["obstruction"] = "eigenlattice-defect";
        j["lattice_index"] = dec.lattice_index.get_str();
        break;
      default:
        break;
    }
  }
  write_file_atomic(out_dir + "/" + e.name + ".json", dump_json(j));
  return e.name + ": " + (dec.yes ? "yes" : "no");
}

std::string run_qm(const Workspace& ws, const Experiment& e, const std::string& out_dir) {
  const int radius = e.params.value("radius", 3);
  json j;
  j["experiment"] = e.name;
  json entries = json::array();
  for (const auto& qn : e.params.at("quasimorphisms")) {
    auto q = ws.quasimorphism(qn.get<std::string>());
    Ball ball = enumerate_ball(q->domain, radius);
    DefectEstimate de = defect_estimate(*q, ball);
    json entry;
    entry["name"] = q->name;
    entry["tag"] = q->tag;
    entry["declared_defect_bound"] = json_double(q->defect_bound);
    entry["sampled_defect"] = de.exact ? json_rat(de.rational) : json_double(de.value);
    json homs = json::array();
    for (const auto& gen : q->domain->generators()) {
      HomogenizationResult h = homogenize(*q, gen.element, 64);
      homs.push_back(json{{"generator", gen.label},
                          {"value", h.exact ? json_rat(h.rational) : json_double(h.value)},
                          {"error_bound", json_double(h.error_bound)}});
    }
    entry["homogenized_generators"] = homs;
    entries.push_back(entry);
  }
  j["quasimorphisms"] = entries;
  write_file_atomic(out_dir + "/" + e.name + ".json", dump_json(j));
  return e.name + ": " + std::to_string(entries.size()) + " quasimorphisms profiled";
}

std::string run_quotient(const Workspace& ws, const Experiment& e, const std::string& out_dir) {
  auto action = ws.action(e.params.at("action").get<std::string>());
  if (action->model != SpaceModel::CentralQuotient)
    throw ContractError("quotient: a quotient action is required");
  const auto& qb = std::get<QuotientBinding>(action->binding);
  const int radius = e.params.at("radius").get<int>();
  Ball ball = enumerate_ball(action->group, radius);
  const SpaceAction& base = *qb.base;

  std::ostringstream csv;
  csv << "p,q,base_distance,quotient_distance,shift,certified\n";
  long uncertified = 0, contraction_violations = 0;
  for (size_t i = 0; i < ball.size(); ++i) {
    Point p = act(base, ball.elements[i], base.basepoint);
    for (size_t k = 0; k < ball.size(); ++k) {
      Point q = act(base, ball.elements[k], base.basepoint);
      Distance d_base = dist(base, p, q);
      QuotientDistResult qd = quotient_dist(*action, p, q);
      if (!qd.certified) ++uncertified;
      if (Distance::compare(qd.value, d_base) > 0) ++contraction_violations;
      csv << '"' << point_str(base, p) << "\",\"" << point_str(base, q) << "\","
          << highprec::format_double(d_base.length()) << ','
          << highprec::format_double(qd.value.length()) << ',' << qd.k_at_min << ','
          << (qd.certified ? 1 : 0) << "\n";
    }
  }
  write_file_atomic(out_dir + "/" + e.name + ".csv", csv.str());
  json j;
  j["experiment"] = e.name;
  j["action"] = action->name;
  j["pairs"] = static_cast<long>(ball.size() * ball.size());
  j["uncertified"] = uncertified;
  j["contraction_violations"] = contraction_violations;
  write_file_atomic(out_dir + "/" + e.name + ".json", dump_json(j));
  return e.name + ": " + std::to_string(ball.size() * ball.size()) + " pairs, " +
         std::to_string(uncertified) + " uncertified";
}

std::string run_dominance(const Workspace& ws, const Experiment& e, const std::string& out_dir) {
  GroupHandle g = ws.group(e.params.at("group").get<std::string>());
  auto elems = [&](const char* key) {
    std::vector<GroupElement> out;
    for (const auto& l : e.params.at(key)) {
      auto ge = generator_by_label(*g, l.get<std::string>());
      if (!ge) throw ConfigError("dominance: unknown generator label");
      out.push_back(*ge);
    }
    return out;
  };
  DominanceReport rep =
      dominance_compare(g, elems("s"), elems("t"), e.params.at("radius").get<int>());
  json j;
  j["experiment"] = e.name;
  j["group"] = g->name();
  j["sup_T_in_S"] = rep.sup_t_in_s;
  j["sup_S_in_T"] = rep.sup_s_in_t;
  j["relation"] =
      rep.relation == DominanceReport::Relation::Equivalent ? "equivalent" : "unknown-at-radius";
  j["verified_generating"] = rep.verified_generating;
  write_file_atomic(out_dir + "/" + e.name + ".json", dump_json(j));
  return e.name + ": constants (" + std::to_string(rep.sup_t_in_s) + ", " +
         std::to_string(rep.sup_s_in_t) + ")";
}

std::string run_obstruction(const Workspace& ws, const Experiment& e,
                            const std::string& out_dir) {
  GroupHandle g = ws.group(e.params.at("group").get<std::string>());
  const int radius = e.params.at("radius").get<int>();
  auto witness = central_commutator_obstruction(g, radius);
  json j;
  j["experiment"] = e.name;
  j["group"] = g->name();
  if (witness) {
    j["witness"] = json{{"g", element_key(*g, witness->g)},
                        {"h", element_key(*g, witness->h)},
                        {"commutator", element_key(*g, witness->commutator)}};
    j["verdict"] = "central-infinite-order-commutator";
  } else {
    j["verdict"] = "none-at-radius-" + std::to_string(radius);
  }
  write_file_atomic(out_dir + "/" + e.name + ".json", dump_json(j));
  return e.name + ": " + (witness ? "witness found" : "none");
}

}  // namespace

std::string run_experiment(const Workspace& ws, const Experiment& e,
                           const std::string& out_dir) {
  if (e.command == "balls") return run_balls(ws, e, out_dir);
  if (e.command == "properness") return run_properness(ws, e, out_dir);
  if (e.command == "cobound") return run_cobound(ws, e, out_dir);
  if (e.command == "euler") return run_euler(ws, e, out_dir);
  if (e.command == "retraction") return run_retraction(ws, e, out_dir);
  if (e.command == "crysto") return run_crysto(ws, e, out_dir);
  if (e.command == "qm") return run_qm(ws, e, out_dir);
  if (e.command == "quotient") return run_quotient(ws, e, out_dir);
  if (e.command == "dominance") return run_dominance(ws, e, out_dir);
  if (e.command == "obstruction") return run_obstruction(ws, e, out_dir);
  throw ConfigError("unknown command: " + e.command);
}

}  // namespace prodhyp
