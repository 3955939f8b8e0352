#include <CLI11.hpp>

#include <future>
#include <iostream>
#include <sstream>
#include <vector>

#include "prodhyp/report.hpp"

using namespace prodhyp;

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  int radius = -1;
  std::string thresholds;
  int jobs = 1;
  long seed = 0;  // seeds randomized property tests only; never affects results
};

std::vector<double> parse_thresholds(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

int run_command(const std::string& command, const Options& opt) {
  Workspace ws = load_workspace_file(opt.config);
  std::vector<Experiment> selected;
  for (auto e : ws.experiments) {
    if (e.command != command) continue;
    if (opt.radius >= 0) e.params["radius"] = opt.radius;
    if (!opt.thresholds.empty()) e.params["thresholds"] = parse_thresholds(opt.thresholds);
    selected.push_back(std::move(e));
  }
  if (selected.empty()) {
    std::cerr << "prodhyp: config-error: no '" << command << "' experiments in config\n";
    return 2;
  }
  std::vector<std::string> lines(selected.size());
  if (opt.jobs <= 1) {
    for (size_t i = 0; i < selected.size(); ++i)
      lines[i] = run_experiment(ws, selected[i], opt.out);
  } else {
    std::vector<std::future<std::string>> futs;
    for (const auto& e : selected)
      futs.push_back(std::async(std::launch::async,
                                [&ws, &e, &opt] { return run_experiment(ws, e, opt.out); }));
    for (size_t i = 0; i < futs.size(); ++i) lines[i] = futs[i].get();
  }
  std::ostringstream summary;
  for (const auto& l : lines) summary << l << "\n";
  write_file_atomic(opt.out + "/" + command + "-summary.txt", summary.str());
  std::cout << summary.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"computational toolkit for group actions on products of hyperbolic spaces"};
  app.require_subcommand(1);

  Options opt;
  const std::vector<std::string> commands = {"balls",      "properness", "cobound",
                                             "euler",      "retraction", "crysto",
                                             "qm",         "quotient",   "dominance",
                                             "obstruction"};
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c, "run all '" + c + "' experiments from the config");
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required();
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--radius", opt.radius, "override experiment radius");
    sub->add_option("--thresholds", opt.thresholds, "override thresholds (comma separated)");
    sub->add_option("--jobs", opt.jobs, "run independent experiments in parallel");
    sub->add_option("--seed", opt.seed, "seed for randomized property tests (results unaffected)");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run_command(command, opt);
  } catch (const ConfigError& e) {
    std::cerr << "prodhyp: config-error: " << e.what() << "\n";
    return 2;
  } catch (const StructuralError& e) {
    std::cerr << "prodhyp: structural-error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "prodhyp: contract-error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "prodhyp: budget-error: " << e.what() << "\n";
    return 3;
  }
}
