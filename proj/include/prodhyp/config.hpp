#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "prodhyp/extension.hpp"
#include "prodhyp/group.hpp"
#include "prodhyp/qm.hpp"
#include "prodhyp/space.hpp"

namespace prodhyp {

// One experiment = one library operation with pinned inputs and output names.
struct Experiment {
  std::string name;
  std::string command;  // balls | properness | cobound | euler | retraction |
                        // crysto | qm | quotient | dominance | obstruction
  nlohmann::json params;
};

struct Workspace {
  int version = 0;
  std::map<std::string, GroupHandle> groups;
  std::map<std::string, std::shared_ptr<Quasimorphism>> quasimorphisms;
  std::map<std::string, std::shared_ptr<SpaceAction>> actions;
  std::map<std::string, std::shared_ptr<CentralExtension>> extensions;
  std::vector<Experiment> experiments;

  GroupHandle group(const std::string& name) const;
  std::shared_ptr<Quasimorphism> quasimorphism(const std::string& name) const;
  std::shared_ptr<SpaceAction> action(const std::string& name) const;
  std::shared_ptr<CentralExtension> extension(const std::string& name) const;
};

// Hard budgets applied at parse time; experiments beyond them are rejected.
struct ConfigLimits {
  int max_radius = 12;
  std::size_t max_ball_elements = kDefaultBallBudget;
};

Workspace load_workspace(const nlohmann::json& config, const ConfigLimits& limits = {});
Workspace load_workspace_file(const std::string& path, const ConfigLimits& limits = {});

GroupElement element_from_json(const Group& g, const nlohmann::json& coords);

}  // namespace prodhyp
