#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prodhyp/group.hpp"
#include "prodhyp/qm.hpp"
#include "prodhyp/scalar.hpp"

namespace prodhyp {

enum class SpaceModel { UpperHalfPlane, BassSerreTree, QuasiLine, CayleyBall, CentralQuotient };

// --- points -----------------------------------------------------------------

struct UHPoint {
  ExactScalar x, y;  // y > 0
  bool operator==(const UHPoint& o) const { return x == o.x && y == o.y; }
};

// Vertex of the Bass-Serre tree of BS(1,n): the coset a^r t^level <a>,
// identified with (level, r mod n^level Z). cls is the canonical class
// representative in [0, n^level).
struct TreeVertex {
  long level = 0;
  Rat cls = 0;
  bool operator==(const TreeVertex& o) const { return level == o.level && cls == o.cls; }
};

struct LinePoint {
  bool exact = true;
  Rat value;
  double approx = 0.0;
  bool operator==(const LinePoint& o) const {
    return exact == o.exact && (exact ? value == o.value : approx == o.approx);
  }
};

struct CayleyPoint {
  GroupElement g;
  bool operator==(const CayleyPoint& o) const { return g == o.g; }
};

using Point = std::variant<UHPoint, TreeVertex, LinePoint, CayleyPoint>;

// Reduced coset code (p, q, m) for t^-p a^m t^q <a>; p, q >= 0.
struct TreeCosetCode {
  long p = 0, q = 0;
  Int m;
};
TreeCosetCode tree_coset_code(long n, const TreeVertex& v);

// --- distances ---------------------------------------------------------------

// Distances are carried exactly as long as possible: hyperbolic-plane values
// in the cosh domain, tree and line values directly. The transcendental step
// (acosh) happens once, at emission, at 50-digit precision.
struct Distance {
  enum class Kind { Linear, Cosh };
  Kind kind = Kind::Linear;
  bool exact = true;
  ExactScalar value;   // valid when exact
  double approx = 0.0;  // valid when !exact (already a length)
  double length() const;
  // Exact three-way comparison when both sides allow it, else high-precision.
  static int compare(const Distance& a, const Distance& b);
};

// --- actions -----------------------------------------------------------------

struct UhpBinding {
  enum class Kind { BSAffine, Anosov } kind = Kind::BSAffine;
  bool expanding = true;         // Anosov: which eigendirection
  ExactScalar covector1;         // Anosov: w = (1, covector1)
  ExactScalar rate;              // Anosov: multiplier lambda^{+-1}
};
struct TreeBinding {};
struct LineBinding {
  std::shared_ptr<const Quasimorphism> phi;
  std::optional<GroupElement> direction;  // designated loxodromic direction
};
struct CayleyBinding {
  std::size_t search_budget = kDefaultSearchBudget;
  bool l1_shortcut = false;  // free abelian group with standard generators
};
struct QuotientBinding {
  std::shared_ptr<const SpaceAction> base;
  GroupElement center;
  int k_max = 64;
};

struct SpaceAction {
  std::string name;
  GroupHandle group;
  SpaceModel model = SpaceModel::QuasiLine;
  std::variant<UhpBinding, TreeBinding, LineBinding, CayleyBinding, QuotientBinding> binding;
  Point basepoint;
  double qa_lambda = 1.0;   // quasi-action constants
  double qa_epsilon = 0.0;
  std::optional<double> delta;  // hyperbolicity metadata, when known
  bool orientable_lineal = false;
};

SpaceAction make_bs_uhp_action(const GroupHandle& g, const std::string& name = "uhp");
SpaceAction make_bs_tree_action(const GroupHandle& g, const std::string& name = "tree");
SpaceAction make_anosov_uhp_action(const GroupHandle& g, bool expanding,
                                   const std::string& name = "");
SpaceAction make_quasiline_action(std::shared_ptr<const Quasimorphism> phi,
                                  std::optional<GroupElement> direction = std::nullopt,
                                  const std::string& name = "");
SpaceAction make_cayley_action(const GroupHandle& g, const std::string& name = "cayley",
                               std::size_t budget = kDefaultSearchBudget);
SpaceAction make_quotient_action(std::shared_ptr<const SpaceAction> base, GroupElement center,
                                 int k_max = 64, const std::string& name = "");

Point act(const SpaceAction& a, const GroupElement& g, const Point& p);
Distance dist(const SpaceAction& a, const Point& p, const Point& q);

std::string point_str(const SpaceAction& a, const Point& p);

// --- quotient metric ----------------------------------------------------------

struct QuotientDistResult {
  Distance value;
  long k_at_min = 0;
  int window = 0;            // final half-width of the shift search
  bool interior = false;     // minimum attained strictly inside the window
  bool certified = false;    // interior, with boundary lower bounds exceeding it
};
QuotientDistResult quotient_dist(const SpaceAction& quotient, const Point& p, const Point& q);

// --- isometry classification ---------------------------------------------------

struct ClassificationReport {
  enum class Verdict { LoxodromicEvidence, EllipticEvidence, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  double tau_hat = 0.0;  // d(o, g^m o) / m at m = m_max
  std::vector<double> displacements;
};
ClassificationReport classify_isometry(const SpaceAction& a, const GroupElement& g, int m_max);

}  // namespace prodhyp
