#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prodhyp/intlin.hpp"
#include "prodhyp/scalar.hpp"

namespace prodhyp {

class Group;
using GroupHandle = std::shared_ptr<const Group>;

// ---------------------------------------------------------------------------
// Elements, one normal form per family.
// ---------------------------------------------------------------------------

// Finitely generated abelian group, coordinate i taken mod moduli[i]
// (modulus 0 means a free Z factor).
struct AbelianElt {
  IVec v;
  bool operator==(const AbelianElt&) const = default;
};

// Heisenberg group <a,b,c | [a,c]=[b,c]=1, [a,b]=c> in the normal form
// a^m b^n c^k with (m,n,k)(m',n',k') = (m+m', n+n', k+k'-n*m').
struct HeisElt {
  Int m, n, k;
  bool operator==(const HeisElt&) const = default;
};

// BS(1,n) = Z[1/n] x| Z in the affine model: element a^r t^k with
// r = u / n^e, canonically reduced (e == 0 or n does not divide u).
struct BSElt {
  Int u;
  long e = 0;
  Int k;
  bool operator==(const BSElt&) const = default;
};

// Crystallographic semidirect product Z^r x| F: translation vector plus an
// index into the precomputed point-group closure.
struct CrystElt {
  IVec v;
  int f = 0;
  bool operator==(const CrystElt&) const = default;
};

// Anosov mapping torus Z^2 x| Z for a fixed phi in SL_2(Z) with |trace| > 2.
struct AnosovElt {
  Int v0, v1, k;
  bool operator==(const AnosovElt&) const = default;
};

class GroupElement;

struct ProdElt {
  std::vector<GroupElement> parts;
  bool operator==(const ProdElt&) const;
};

// Amalgamated direct product (H x K) / <(z, z^-1)>, canonicalized so the
// K component has trivial Z part (see AmalgamData::retract).
struct AmalElt {
  std::vector<GroupElement> hk;  // exactly {h, k}
  bool operator==(const AmalElt&) const;
};

class GroupElement {
 public:
  using Value =
      std::variant<AbelianElt, HeisElt, BSElt, CrystElt, AnosovElt, ProdElt, AmalElt>;
  GroupElement() : value_(AbelianElt{}) {}
  explicit GroupElement(Value v) : value_(std::move(v)) {}
  const Value& value() const { return value_; }
  Value& value() { return value_; }
  bool operator==(const GroupElement& o) const { return value_ == o.value_; }

  template <typename T>
  const T& as() const {
    return std::get<T>(value_);
  }

 private:
  Value value_;
};

// ---------------------------------------------------------------------------
// Group definitions.
// ---------------------------------------------------------------------------

enum class Family {
  Abelian,
  Heisenberg,
  BaumslagSolitar,
  Crystallographic,
  AnosovTorus,
  DirectProduct,
  Amalgam,
};

struct AbelianData {
  std::vector<long> moduli;  // 0 = Z
};
struct HeisData {};
struct BSData {
  long n = 2;
};
struct CrystData {
  int rank = 0;
  std::vector<IMat> elements;          // full closure, identity at index 0
  std::vector<std::vector<int>> mul;   // index composition table
  std::vector<int> inv;                // index inverse table
  std::vector<int> generator_indices;  // the configured point-group generators
};
struct AnosovData {
  IMat phi;         // 2x2, det 1, |trace| > 2
  long disc = 0;    // square-free part of trace^2 - 4
  ExactScalar lambda;  // expanding eigenvalue, in Q(sqrt(disc))
};
struct ProductData {
  std::vector<GroupHandle> factors;
};
// Z has rank r; it embeds into H via the central elements zH[0..r-1] and into
// the abelian group K via the columns of embed (rank_K x r). retract is an
// r x rank_K integer matrix with retract * embed = I_r; it supplies the
// canonical normal form for cosets of <(z, z^-1)>.
struct AmalgamData {
  GroupHandle H, K;
  std::vector<GroupElement> zH;
  IMat embed;
  IMat retract;
};

struct Generator {
  std::string label;
  GroupElement element;
};

class Group {
 public:
  using Data = std::variant<AbelianData, HeisData, BSData, CrystData, AnosovData,
                            ProductData, AmalgamData>;

  Group(std::string name, Family family, Data data, std::vector<Generator> gens)
      : name_(std::move(name)),
        family_(family),
        data_(std::move(data)),
        generators_(std::move(gens)) {}

  const std::string& name() const { return name_; }
  Family family() const { return family_; }
  const Data& data() const { return data_; }
  const std::vector<Generator>& generators() const { return generators_; }

  template <typename T>
  const T& data_as() const {
    return std::get<T>(data_);
  }

 private:
  std::string name_;
  Family family_;
  Data data_;
  std::vector<Generator> generators_;
};

// Constructors. Generating sets may be overridden by label lists where a
// family admits several natural choices.
GroupHandle make_abelian(const std::vector<long>& moduli, const std::string& name = "abelian");
GroupHandle make_heisenberg(const std::vector<std::string>& gen_labels = {"a", "b"},
                            const std::string& name = "heisenberg");
GroupHandle make_bs(long n, const std::string& name = "");
GroupHandle make_crystallographic(int rank, const std::vector<IMat>& point_gens,
                                  const std::string& name = "crystallographic");
GroupHandle make_anosov(const IMat& phi, const std::string& name = "anosov-torus");
GroupHandle make_product(const std::vector<GroupHandle>& factors,
                         const std::string& name = "product");
GroupHandle make_amalgam(const GroupHandle& H, const GroupHandle& K,
                         const std::vector<GroupElement>& zH, const IMat& embed,
                         const IMat& retract, const std::string& name = "amalgam");

// Core operations (exact normal-form arithmetic).
GroupElement identity(const Group& g);
GroupElement mul(const Group& g, const GroupElement& a, const GroupElement& b);
GroupElement inv(const Group& g, const GroupElement& a);
GroupElement power(const Group& g, const GroupElement& a, long n);
bool is_identity(const Group& g, const GroupElement& a);
// Throws StructuralError when the element does not belong to this group.
void check_element(const Group& g, const GroupElement& a);

// Canonical serialization of the normal form; unique per element.
std::string element_key(const Group& g, const GroupElement& a);
// Normal-form coordinates flattened to one integer vector (the key's data).
IVec element_coords(const Group& g, const GroupElement& a);
// Inverse of element_coords; the result is canonicalized.
GroupElement element_from_coords(const Group& g, const IVec& coords);
std::size_t coords_size(const Group& g);
// Deterministic order used for sphere sorting: componentwise by
// (|x|, sign), positives first.
bool element_less(const Group& g, const GroupElement& a, const GroupElement& b);

std::optional<GroupElement> generator_by_label(const Group& g, const std::string& label);
// The symmetric generating set (generators and their inverses, deduplicated).
std::vector<GroupElement> symmetric_generators(const Group& g);

bool commutes_with_generators(const Group& g, const GroupElement& a);
bool has_infinite_order(const Group& g, const GroupElement& a);

// Exact Z[1/n] value r = u/n^e of the affine part of a BS element.
Rat bs_affine_part(const Group& g, const BSElt& e);

GroupElement heisenberg_elt(const Int& m, const Int& n, const Int& k);
GroupElement abelian_elt(IVec v);
GroupElement bs_elt(const Group& g, const Rat& r, const Int& k);
GroupElement anosov_elt(const Int& v0, const Int& v1, const Int& k);

// phi^k applied to an integer pair, for the Anosov family.
std::pair<Int, Int> anosov_twist(const Group& g, long k, const Int& v0, const Int& v1);

// Solves c^k = w for a central element c of infinite order (central powers
// have coordinates linear in k in every shipped family); the candidate
// exponent is verified by exact arithmetic before being returned.
std::optional<long> solve_central_power(const Group& g, const GroupElement& c,
                                        const GroupElement& w);

}  // namespace prodhyp
