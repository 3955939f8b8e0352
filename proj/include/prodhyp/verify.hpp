#pragma once

#include <string>
#include <vector>

#include "prodhyp/ball.hpp"
#include "prodhyp/space.hpp"

namespace prodhyp {

// Total l^1 displacement of every ball element across the factor actions,
// with per-radius extremes and sublevel counts. Terms are computed exactly;
// totals are emitted once through 50-digit arccosh.
struct DisplacementProfile {
  GroupHandle group;
  std::vector<std::string> action_names;
  int r_max = 0;
  Ball ball;
  std::vector<double> totals;       // per element, emission values
  std::vector<bool> exact_terms;    // per element: every term stayed exact
  bool all_exact = true;
  std::vector<double> min_per_radius;  // over the sphere S(r), r = 0..r_max
  std::vector<double> max_per_radius;
  std::vector<double> thresholds;
  std::vector<std::vector<long>> counts;  // counts[t][r] = #{g in B(r) : D(g) <= C_t}
  bool partial = false;  // ball budget exhausted before r_max
};

DisplacementProfile displacement_profile(const GroupHandle& g,
                                         const std::vector<const SpaceAction*>& actions,
                                         int r_max, const std::vector<double>& thresholds,
                                         std::size_t budget = kDefaultBallBudget);

struct ThresholdReport {
  double threshold = 0.0;
  std::vector<long> counts;
  bool stabilized = false;
  int stabilization_radius = -1;  // first radius from which the count is constant
  long final_count = 0;
};
struct PropernessReport {
  std::vector<ThresholdReport> per_threshold;
  bool proper_evidence = false;  // evidence only; finite data cannot prove properness
  std::vector<double> min_growth;
  bool partial = false;
};
PropernessReport properness_report(const DisplacementProfile& profile);

struct CoboundednessReport {
  double covering_radius = 0.0;
  bool exact = false;
  Rat exact_value;
  std::string window_desc;
  std::size_t orbit_size = 0;
};
// Quasi-line window [-W, W].
CoboundednessReport coboundedness_window(const SpaceAction& action, const Ball& ball, double w);
// Upper half-plane rectangle [x0,x1] x [y0,y1], sampled on a (grid+1)^2 mesh.
CoboundednessReport coboundedness_rectangle(const SpaceAction& action, const Ball& ball,
                                            const Rat& x0, const Rat& x1, const Rat& y0,
                                            const Rat& y1, int grid = 8);

// Exact decider for the diagonalizability of a finite point group over Z:
// yes iff the group is abelian of exponent <= 2 and the joint eigenlattices
// span Z^r with a determinant +-1 basis. The reading of the criterion is
// basis-free (conjugacy in GL_r(Z)), recorded in `note`.
struct CrystallographicDecision {
  bool yes = false;
  IMat witness_basis;  // columns: concatenated eigenlattice bases (when yes)
  enum class Obstruction { None, OrderGreaterThanTwo, NonCommuting, EigenlatticeDefect };
  Obstruction obstruction = Obstruction::None;
  IMat offending;            // element of order > 2, when that is the obstruction
  long offending_order = 0;
  Int lattice_index = 0;     // |det| of the concatenated bases (0 = rank deficit)
  int closure_size = 0;
  std::string note;
};
CrystallographicDecision crysto_decide(const std::vector<IMat>& point_gens, int r,
                                       std::size_t closure_bound = 1024);

struct DominanceReport {
  int sup_t_in_s = -1;  // sup_{t in T} |t|_S
  int sup_s_in_t = -1;
  enum class Relation { Equivalent, Unknown } relation = Relation::Unknown;
  bool verified_generating = false;
};
DominanceReport dominance_compare(const GroupHandle& g, const std::vector<GroupElement>& s,
                                  const std::vector<GroupElement>& t, int radius,
                                  std::size_t budget = kDefaultSearchBudget);

}  // namespace prodhyp
