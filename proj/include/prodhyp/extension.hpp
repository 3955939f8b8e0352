#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prodhyp/ball.hpp"
#include "prodhyp/qm.hpp"

namespace prodhyp {

struct SpaceAction;

// Exponents with respect to the free central generators plus an index into
// the torsion list.
struct CentralCoords {
  IVec exps;
  int torsion_index = 0;
};

struct CenterDecomposition {
  std::vector<GroupElement> free_gens;  // c_1 .. c_r, central in E
  std::vector<GroupElement> torsion;    // full torsion list, [0] = identity
  std::function<std::optional<CentralCoords>(const GroupElement&)> decompose;
  int rank() const { return static_cast<int>(free_gens.size()); }
};

// 1 -> Z -> E -> G -> 1 with a normalized set-theoretic section.
struct CentralExtension {
  std::string name;
  GroupHandle E, G;
  CenterDecomposition Z;
  std::function<GroupElement(const GroupElement&)> project;  // pi
  std::function<GroupElement(const GroupElement&)> section;  // s, s(1) = 1
};

// Quotient of a group by a central subgroup given on generators, with the
// canonical projection and the normal-form lift.
struct CentralQuotientMap {
  GroupHandle quotient;
  std::function<GroupElement(const GroupElement&)> project;
  std::function<GroupElement(const GroupElement&)> lift;
};
CentralQuotientMap central_quotient(const GroupHandle& g,
                                    const std::vector<GroupElement>& z_gens);

CentralExtension heisenberg_extension(const GroupHandle& heis,
                                      const std::string& name = "heisenberg-over-Z2");
// E finitely generated abelian; Z spanned by the listed coordinates.
CentralExtension abelian_split_extension(const GroupHandle& E,
                                         const std::vector<int>& central_coords,
                                         const std::string& name = "");
// E = A x B with B abelian central; Z = factor `central_factor`.
CentralExtension product_extension(const GroupHandle& E, size_t central_factor,
                                   const std::string& name = "");
// E an amalgamated direct product; Z the amalgamated subgroup.
CentralExtension amalgam_extension(const GroupHandle& E, const std::string& name = "");

CentralExtension with_section(const CentralExtension& ext,
                              std::function<GroupElement(const GroupElement&)> section,
                              const std::string& name);
// Mutation fixture: redirects the lift of one element (the result typically
// stops being a section, which the identity checker must detect).
CentralExtension corrupt_section(const CentralExtension& ext, const GroupElement& at,
                                 const GroupElement& wrong_lift);

// omega_s(g,h) = s(g) s(h) s(gh)^-1, as an element of E.
GroupElement euler_cocycle_raw(const CentralExtension& ext, const GroupElement& gbar,
                               const GroupElement& hbar);
// Checked variant: section normalized, value inside Z.
GroupElement euler_cocycle(const CentralExtension& ext, const GroupElement& gbar,
                           const GroupElement& hbar);

// Word norm on Z with respect to {c_i^+-1} and torsion weight 1.
Int central_norm(const CentralExtension& ext, const GroupElement& z);

struct EulerCocycleSample {
  std::vector<Int> max_norm;  // max_norm[R-1] = max over B(R)^2, R = 1..r_max
  int r_max = 0;
  double fitted_exponent = 0.0;  // slope of log(norm) vs log(R) on the tail
  bool growing = false;          // last three radii strictly increase
};
EulerCocycleSample cocycle_growth(const CentralExtension& ext, int r_max,
                                  std::size_t budget = kDefaultBallBudget);

struct CocycleIdentityResult {
  bool pass = true;
  bool value_in_z = true;
  std::array<std::string, 3> witness;
  std::string reason;
};
// omega(g,h) omega(gh,k) == omega(h,k) omega(g,hk) over all triples of the ball.
CocycleIdentityResult cocycle_identity_check(const CentralExtension& ext, const Ball& ball);

// The composite rho . floor . Theta^-1 . Phi of the quasi-retraction pipeline.
struct QuasiRetraction {
  std::vector<Quasimorphism> phis;
  bool exact = true;
  RMat theta, theta_inv;
  std::vector<std::vector<double>> theta_approx, theta_inv_approx;
  std::function<GroupElement(const GroupElement&)> map;  // E -> Z (inside E)
  std::vector<GroupElement> step2_set;                   // observed c^-1 phi(c)
  bool step2_stable = false;
};
QuasiRetraction build_quasi_retraction(const GroupHandle& E, const CenterDecomposition& Z,
                                       const std::vector<Quasimorphism>& qms,
                                       int central_radius = 6);

struct BoundedSectionResult {
  CentralExtension adjusted;             // same extension, section g -> phi(g0)^-1 g0
  std::vector<GroupElement> observed_b;  // phi(s'(g)) over the sample ball
  bool b_stable = false;
  EulerCocycleSample resampled;
};
BoundedSectionResult bounded_section(const CentralExtension& ext, const QuasiRetraction& ret,
                                     int sample_radius = 4, int growth_radius = 4);

struct ObstructionWitness {
  GroupElement g, h, commutator;
};
// Searches B(R)^2 for a commutator that is central of infinite order.
std::optional<ObstructionWitness> central_commutator_obstruction(const GroupHandle& G,
                                                                 int radius);

// chi' = chi . s for the quasimorphism chi underlying a quasi-line on E.
Quasimorphism induced_quotient_qm(const CentralExtension& ext, const SpaceAction& line,
                                  const std::string& name = "");

struct AmalgamatedProductSpec {
  GroupHandle product;
  bool generated_by_union = false;
  bool intersection_is_z = false;
  bool factors_commute = false;
  bool quotient_ball_match = false;
  CentralExtension extension;  // 1 -> Z -> G -> H/Z x K/Z -> 1
};
AmalgamatedProductSpec amalgamated_product(const GroupHandle& H, const GroupHandle& K,
                                           const std::vector<GroupElement>& zH,
                                           const IMat& embed, const IMat& retract,
                                           int check_radius = 3,
                                           const std::string& name = "amalgam");

}  // namespace prodhyp
