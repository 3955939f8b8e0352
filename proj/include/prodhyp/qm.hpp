#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prodhyp/ball.hpp"
#include "prodhyp/group.hpp"
#include "prodhyp/intlin.hpp"

namespace prodhyp {

struct SpaceAction;  // space.hpp

struct QmValue {
  bool exact = true;
  Rat rational;   // valid when exact
  double approx = 0.0;
  static QmValue of(Rat r) { return {true, r, r.get_d()}; }
  static QmValue of(double v) { return {false, Rat(0), v}; }
};

// Map G -> R with declared defect bound. Exact evaluators return rational
// values; approximate ones (Busemann estimates) carry doubles only.
struct Quasimorphism {
  std::string name;
  std::string tag;
  GroupHandle domain;
  double defect_bound = 0.0;  // declared bound on |phi(gh)-phi(g)-phi(h)|
  bool exact = true;
  std::function<QmValue(const GroupElement&)> eval;

  QmValue operator()(const GroupElement& e) const { return eval(e); }
};

// --- evaluator factories ---------------------------------------------------

// Coordinate evaluators, per family. For Heisenberg only the a- and
// b-exponents are quasimorphisms; the central exponent has unbounded defect
// and is rejected.
Quasimorphism qm_coordinate(const GroupHandle& g, int index, const std::string& name = "");
// Rational linear combination of finitely many exact quasimorphisms.
Quasimorphism qm_combo(const std::vector<std::pair<Rat, Quasimorphism>>& terms,
                       const std::string& name = "combo");
// phi(m) = floor(m * sqrt(d)) on a rank-1 free abelian group; defect <= 1.
Quasimorphism qm_floor_sqrt(const GroupHandle& g, long d, const std::string& name = "");
// phi(m) = a*m + (m mod q); defect <= q.
Quasimorphism qm_mod_linear(const GroupHandle& g, long a, long q, const std::string& name = "");
// Lift a quasimorphism on one factor of a direct product.
Quasimorphism qm_product_component(const GroupHandle& product, size_t factor,
                                   const Quasimorphism& inner, const std::string& name = "");
Quasimorphism qm_custom(const GroupHandle& g, std::string name,
                        std::function<QmValue(const GroupElement&)> fn, double defect_bound,
                        bool exact);

// --- defect / homogenization ------------------------------------------------

struct DefectEstimate {
  double value = 0.0;
  bool exact = true;
  Rat rational;
  std::pair<std::string, std::string> witness;  // keys of the attaining pair
};
DefectEstimate defect_estimate(const Quasimorphism& phi, const Ball& ball);

struct HomogenizationResult {
  double value = 0.0;
  bool exact = false;
  Rat rational;
  double error_bound = 0.0;  // declared_defect / N
  long exponent = 0;
};
HomogenizationResult homogenize(const Quasimorphism& phi, const GroupElement& g, long N);

// --- Busemann quasimorphism on an orientable lineal action ------------------

struct BusemannValue {
  double value = 0.0;
  bool exact = false;
  Rat rational;
  double stabilization_delta = 0.0;  // |value(depth) - value(depth/2)|
  bool stabilized = false;
};
BusemannValue busemann_qm(const SpaceAction& action, const GroupElement& g, long depth);
// Wraps busemann_qm with depth doubling (stops below 1e-6 delta or at 2^10).
Quasimorphism qm_busemann(const std::shared_ptr<const SpaceAction>& action,
                          const std::string& name = "busemann");

// --- finite-index transfer ---------------------------------------------------

struct FiniteIndexSubgroup {
  GroupHandle G;
  std::function<bool(const GroupElement&)> contains;  // membership of H inside G
  std::vector<GroupElement> transversal;              // coset representatives
};

// Averaged transfer of a quasimorphism defined on H to all of G; restricts to
// phi on H intersected with the center. The defect bound of the result is
// re-estimated on the supplied ball.
Quasimorphism transfer(const Quasimorphism& phi_on_h, const FiniteIndexSubgroup& sub,
                       const Ball& defect_sample, const std::string& name = "");

// --- rank extraction ----------------------------------------------------------

struct RankExtractionReport {
  std::vector<int> selected;              // indices of the chosen quasimorphisms
  std::vector<GroupElement> witnesses;    // elements with independent columns
  std::vector<int> witness_radii;
  RMat theta;                              // r x r, columns Phi(g_i); exact path
  std::vector<std::vector<double>> theta_approx;
  bool exact = true;
  int rank = 0;
  int threshold_radius = 0;  // word length of the last witness
};
RankExtractionReport extract_rank(const std::vector<Quasimorphism>& qms, const Ball& ball);

// --- commutator displacement --------------------------------------------------

struct CommutatorBound {
  double value = 0.0;
  bool exact = true;
  Rat rational;
  std::pair<std::string, std::string> witness;
};
// sup over ball^2 of dist(o, [g,h] o); requires an orientable lineal action.
CommutatorBound commutator_displacement_bound(const SpaceAction& action, const Ball& ball);

}  // namespace prodhyp
