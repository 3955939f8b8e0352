#include "prodhyp/config.hpp"

#include <fstream>
#include <set>

namespace prodhyp {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional = {}) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& k : required)
    if (!obj.contains(k)) throw ConfigError(where + ": missing field '" + k + "'");
  for (const auto& [k, v] : obj.items()) {
    if (!required.count(k) && !optional.count(k))
      throw ConfigError(where + ": unknown field '" + k + "'");
  }
}

IMat imat_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a matrix");
  IMat m;
  for (const auto& row : j) {
    IVec r;
    for (const auto& v : row) r.push_back(Int(v.get<long>()));
    m.push_back(std::move(r));
  }
  return m;
}

IVec ivec_from_json(const json& j) {
  IVec v;
  for (const auto& x : j) v.push_back(Int(x.get<long>()));
  return v;
}

}  // namespace

GroupElement element_from_json(const Group& g, const json& coords) {
  if (!coords.is_array()) throw ConfigError("element: expected a coordinate array");
  json flat = json::array();
  std::function<void(const json&)> walk = [&](const json& node) {
    for (const auto& x : node) {
      if (x.is_array())
        walk(x);
      else
        flat.push_back(x);
    }
  };
  walk(coords);
  return element_from_coords(g, ivec_from_json(flat));
}

GroupHandle Workspace::group(const std::string& name) const {
  auto it = groups.find(name);
  if (it == groups.end()) throw ConfigError("unknown group '" + name + "'");
  return it->second;
}
std::shared_ptr<Quasimorphism> Workspace::quasimorphism(const std::string& name) const {
  auto it = quasimorphisms.find(name);
  if (it == quasimorphisms.end()) throw ConfigError("unknown quasimorphism '" + name + "'");
  return it->second;
}
std::shared_ptr<SpaceAction> Workspace::action(const std::string& name) const {
  auto it = actions.find(name);
  if (it == actions.end()) throw ConfigError("unknown action '" + name + "'");
  return it->second;
}
std::shared_ptr<CentralExtension> Workspace::extension(const std::string& name) const {
  auto it = extensions.find(name);
  if (it == extensions.end()) throw ConfigError("unknown extension '" + name + "'");
  return it->second;
}

Workspace load_workspace(const json& config, const ConfigLimits& limits) {
  require_keys(config, "config", {"version"},
               {"groups", "quasimorphisms", "actions", "extensions", "experiments"});
  Workspace ws;
  ws.version = config.at("version").get<int>();
  if (ws.version != 1) throw ConfigError("unsupported config version");

  for (const auto& j : config.value("groups", json::array())) {
    require_keys(j, "group", {"name", "family"},
                 {"moduli", "n", "rank", "point_generators", "phi", "factors", "h", "k", "z_h",
                  "embed", "retract", "generators"});
    const std::string name = j.at("name").get<std::string>();
    const std::string family = j.at("family").get<std::string>();
    GroupHandle g;
    if (family == "abelian" || family == "free-abelian") {
      g = make_abelian(j.at("moduli").get<std::vector<long>>(), name);
    } else if (family == "heisenberg") {
      std::vector<std::string> labels = {"a", "b"};
      if (j.contains("generators")) labels = j.at("generators").get<std::vector<std::string>>();
      g = make_heisenberg(labels, name);
    } else if (family == "bs") {
      g = make_bs(j.at("n").get<long>(), name);
    } else if (family == "crystallographic") {
      std::vector<IMat> gens;
      for (const auto& m : j.at("point_generators")) gens.push_back(imat_from_json(m, name));
      g = make_crystallographic(j.at("rank").get<int>(), gens, name);
    } else if (family == "anosov-torus" || family == "anosov") {
      g = make_anosov(imat_from_json(j.at("phi"), name), name);
    } else if (family == "direct-product" || family == "product") {
      std::vector<GroupHandle> factors;
      for (const auto& f : j.at("factors")) factors.push_back(ws.group(f.get<std::string>()));
      g = make_product(factors, name);
    } else if (family == "amalgamated-product" || family == "amalgam") {
      GroupHandle H = ws.group(j.at("h").get<std::string>());
      GroupHandle K = ws.group(j.at("k").get<std::string>());
      std::vector<GroupElement> zh;
      for (const auto& z : j.at("z_h")) zh.push_back(element_from_json(*H, z));
      g = make_amalgam(H, K, zh, imat_from_json(j.at("embed"), name),
                       imat_from_json(j.at("retract"), name), name);
    } else {
      throw ConfigError("group '" + name + "': unknown family '" + family + "'");
    }
    if (!ws.groups.emplace(name, g).second)
      throw ConfigError("duplicate group name '" + name + "'");
  }

  for (const auto& j : config.value("quasimorphisms", json::array())) {
    require_keys(j, "quasimorphism", {"name", "kind"},
                 {"group", "index", "terms", "d", "a", "mod", "factor", "inner", "extension",
                  "line"});
    const std::string name = j.at("name").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    std::shared_ptr<Quasimorphism> q;
    if (kind == "coordinate" || kind == "coordinate-homomorphism") {
      q = std::make_shared<Quasimorphism>(
          qm_coordinate(ws.group(j.at("group").get<std::string>()), j.at("index").get<int>(),
                        name));
    } else if (kind == "combo") {
      std::vector<std::pair<Rat, Quasimorphism>> terms;
      for (const auto& t : j.at("terms")) {
        require_keys(t, "combo term", {"coeff", "of"});
        Rat c(t.at("coeff").get<std::string>());
        c.canonicalize();
        terms.emplace_back(c, *ws.quasimorphism(t.at("of").get<std::string>()));
      }
      q = std::make_shared<Quasimorphism>(qm_combo(terms, name));
    } else if (kind == "floor-sqrt") {
      q = std::make_shared<Quasimorphism>(qm_floor_sqrt(
          ws.group(j.at("group").get<std::string>()), j.at("d").get<long>(), name));
    } else if (kind == "mod-linear") {
      q = std::make_shared<Quasimorphism>(
          qm_mod_linear(ws.group(j.at("group").get<std::string>()), j.at("a").get<long>(),
                        j.at("mod").get<long>(), name));
    } else if (kind == "component") {
      q = std::make_shared<Quasimorphism>(qm_product_component(
          ws.group(j.at("group").get<std::string>()), j.at("factor").get<std::size_t>(),
          *ws.quasimorphism(j.at("inner").get<std::string>()), name));
    } else if (kind == "composed-with-section") {
      auto ext = ws.extension(j.at("extension").get<std::string>());
      auto line = ws.action(j.at("line").get<std::string>());
      q = std::make_shared<Quasimorphism>(induced_quotient_qm(*ext, *line, name));
    } else {
      throw ConfigError("quasimorphism '" + name + "': unknown kind '" + kind + "'");
    }
    if (!ws.quasimorphisms.emplace(name, q).second)
      throw ConfigError("duplicate quasimorphism name '" + name + "'");
  }

  // Extensions may reference quasi-lines and vice versa; build extensions
  // after plain quasimorphisms, actions in a final pass.
  for (const auto& j : config.value("extensions", json::array())) {
    require_keys(j, "extension", {"name", "kind"},
                 {"group", "central", "factor", "section", "corrupt_at", "corrupt_to"});
    const std::string name = j.at("name").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    std::shared_ptr<CentralExtension> ext;
    if (kind == "heisenberg") {
      ext = std::make_shared<CentralExtension>(
          heisenberg_extension(ws.group(j.at("group").get<std::string>()), name));
    } else if (kind == "abelian-split") {
      ext = std::make_shared<CentralExtension>(
          abelian_split_extension(ws.group(j.at("group").get<std::string>()),
                                  j.at("central").get<std::vector<int>>(), name));
    } else if (kind == "product") {
      ext = std::make_shared<CentralExtension>(product_extension(
          ws.group(j.at("group").get<std::string>()), j.at("factor").get<std::size_t>(), name));
    } else if (kind == "amalgam") {
      ext = std::make_shared<CentralExtension>(
          amalgam_extension(ws.group(j.at("group").get<std::string>()), name));
    } else {
      throw ConfigError("extension '" + name + "': unknown kind '" + kind + "'");
    }
    if (j.contains("corrupt_at")) {
      GroupElement at = element_from_json(*ext->G, j.at("corrupt_at"));
      GroupElement to = element_from_json(*ext->E, j.at("corrupt_to"));
      *ext = corrupt_section(*ext, at, to);
    }
    if (!ws.extensions.emplace(name, ext).second)
      throw ConfigError("duplicate extension name '" + name + "'");
  }

  for (const auto& j : config.value("actions", json::array())) {
    require_keys(j, "action", {"name", "space"},
                 {"group", "quasimorphism", "direction", "expanding", "base", "center", "k_max",
                  "budget"});
    const std::string name = j.at("name").get<std::string>();
    const std::string space = j.at("space").get<std::string>();
    std::shared_ptr<SpaceAction> a;
    if (space == "uhp") {
      GroupHandle g = ws.group(j.at("group").get<std::string>());
      if (g->family() == Family::AnosovTorus)
        a = std::make_shared<SpaceAction>(
            make_anosov_uhp_action(g, j.value("expanding", true), name));
      else
        a = std::make_shared<SpaceAction>(make_bs_uhp_action(g, name));
    } else if (space == "bass-serre" || space == "tree") {
      a = std::make_shared<SpaceAction>(
          make_bs_tree_action(ws.group(j.at("group").get<std::string>()), name));
    } else if (space == "quasi-line") {
      auto phi = ws.quasimorphism(j.at("quasimorphism").get<std::string>());
      std::optional<GroupElement> dir;
      if (j.contains("direction")) {
        auto d = generator_by_label(*phi->domain, j.at("direction").get<std::string>());
        if (!d) throw ConfigError("action '" + name + "': unknown direction label");
        dir = *d;
      }
      a = std::make_shared<SpaceAction>(make_quasiline_action(phi, dir, name));
    } else if (space == "cayley-ball" || space == "cayley") {
      a = std::make_shared<SpaceAction>(make_cayley_action(
          ws.group(j.at("group").get<std::string>()), name,
          j.value("budget", kDefaultSearchBudget)));
    } else if (space == "quotient") {
      auto base = ws.action(j.at("base").get<std::string>());
      GroupElement c = element_from_json(*base->group, j.at("center"));
      a = std::make_shared<SpaceAction>(
          make_quotient_action(base, c, j.value("k_max", 64), name));
    } else {
      throw ConfigError("action '" + name + "': unknown space '" + space + "'");
    }
    if (!ws.actions.emplace(name, a).second)
      throw ConfigError("duplicate action name '" + name + "'");
  }

  for (const auto& j : config.value("experiments", json::array())) {
    require_keys(j, "experiment", {"name", "command"},
                 {"group", "actions", "action", "extension", "quasimorphisms", "radius",
                  "thresholds", "window", "rank", "matrices", "s", "t", "elements", "central",
                  "growth_radius", "rectangle", "grid"});
    Experiment e;
    e.name = j.at("name").get<std::string>();
    e.command = j.at("command").get<std::string>();
    static const std::set<std::string> kCommands = {
        "balls",     "properness", "cobound",   "euler",       "retraction",
        "crysto",    "qm",         "quotient",  "dominance",   "obstruction"};
    if (!kCommands.count(e.command))
      throw ConfigError("experiment '" + e.name + "': unknown command '" + e.command + "'");
    if (j.contains("radius")) {
      const int r = j.at("radius").get<int>();
      if (r < 0 || r > limits.max_radius)
        throw ConfigError("experiment '" + e.name + "': radius outside budget");
    }
    e.params = j;
    ws.experiments.push_back(std::move(e));
  }
  return ws;
}

Workspace load_workspace_file(const std::string& path, const ConfigLimits& limits) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return load_workspace(j, limits);
}

}  // namespace prodhyp
