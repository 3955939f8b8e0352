#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "prodhyp/ball.hpp"
#include "prodhyp/group.hpp"

using namespace prodhyp;

namespace {

// Random words evaluated two ways: library arithmetic vs rewriting oracle.
std::string random_word(std::mt19937_64& rng, int len) {
  static const char letters[] = "abcABC";
  std::uniform_int_distribution<int> pick(0, 5);
  std::string w;
  for (int i = 0; i < len; ++i) w += letters[pick(rng)];
  return w;
}

GroupElement eval_word(const Group& g, const std::string& word) {
  GroupElement acc = identity(g);
  for (char ch : word) {
    std::string label(1, static_cast<char>(std::tolower(ch)));
    GroupElement gen = *generator_by_label(g, label);
    if (std::isupper(ch)) gen = inv(g, gen);
    acc = mul(g, acc, gen);
  }
  return acc;
}

void check_axioms(const GroupHandle& g, int ball_radius, int trials, unsigned seed) {
  Ball ball = enumerate_ball(g, ball_radius);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, ball.size() - 1);
  const GroupElement e = identity(*g);
  for (int t = 0; t < trials; ++t) {
    const GroupElement& x = ball.elements[pick(rng)];
    const GroupElement& y = ball.elements[pick(rng)];
    const GroupElement& z = ball.elements[pick(rng)];
    CHECK(mul(*g, mul(*g, x, y), z) == mul(*g, x, mul(*g, y, z)));
    CHECK(mul(*g, x, e) == x);
    CHECK(mul(*g, x, inv(*g, x)) == e);
  }
}

}  // namespace

TEST_CASE("heisenberg products match the string-rewriting oracle") {
  auto h = make_heisenberg({"a", "b", "c"});
  // a * b = ab, already in normal form.
  CHECK(mul(*h, heisenberg_elt(1, 0, 0), heisenberg_elt(0, 1, 0)) == heisenberg_elt(1, 1, 0));
  // b * a = a b c^-1.
  {
    HeisElt o = oracle::heisenberg_rewrite("ba");
    CHECK(o.m == 1);
    CHECK(o.n == 1);
    CHECK(o.k == -1);
    CHECK(mul(*h, heisenberg_elt(0, 1, 0), heisenberg_elt(1, 0, 0)) ==
          heisenberg_elt(o.m, o.n, o.k));
  }
  // inv(ab) from the oracle: ab * (ab)^-1 = 1.
  {
    GroupElement ab = heisenberg_elt(1, 1, 0);
    GroupElement ab_inv = inv(*h, ab);
    CHECK(ab_inv == heisenberg_elt(-1, -1, -1));
    CHECK(is_identity(*h, mul(*h, ab, ab_inv)));
    HeisElt o = oracle::heisenberg_rewrite("BA");
    CHECK(ab_inv == heisenberg_elt(o.m, o.n, o.k));
  }
  CHECK(inv(*h, identity(*h)) == identity(*h));
  // c = [a, b].
  {
    GroupElement a = heisenberg_elt(1, 0, 0), b = heisenberg_elt(0, 1, 0);
    GroupElement comm = mul(*h, mul(*h, a, b), mul(*h, inv(*h, a), inv(*h, b)));
    CHECK(comm == heisenberg_elt(0, 0, 1));
  }
  std::mt19937_64 rng(7);
  for (int t = 0; t < 400; ++t) {
    std::string w = random_word(rng, 1 + static_cast<int>(rng() % 7));
    HeisElt o = oracle::heisenberg_rewrite(w);
    CHECK(eval_word(*h, w) == heisenberg_elt(o.m, o.n, o.k));
  }
}

TEST_CASE("BS(1,n) affine model satisfies the defining relation") {
  for (long n : {2L, 3L, 5L}) {
    auto g = make_bs(n);
    GroupElement a = *generator_by_label(*g, "a");
    GroupElement t = *generator_by_label(*g, "t");
    // t a t^-1 = a^n.
    GroupElement lhs = mul(*g, mul(*g, t, a), inv(*g, t));
    CHECK(lhs == power(*g, a, n));
  }
  auto g2 = make_bs(2);
  // (0,1)(1,0)(0,-1) = (2,0).
  GroupElement conj = mul(*g2, mul(*g2, GroupElement(BSElt{0, 0, 1}), GroupElement(BSElt{1, 0, 0})),
                          GroupElement(BSElt{0, 0, -1}));
  CHECK(conj == GroupElement(BSElt{2, 0, 0}));
  // inv(a t) = (-1/2, -1), solved exactly.
  GroupElement at = GroupElement(BSElt{1, 0, 1});
  GroupElement expect = bs_elt(*g2, Rat(-1, 2), -1);
  CHECK(inv(*g2, at) == expect);
  CHECK(is_identity(*g2, mul(*g2, at, expect)));
  CHECK(bs_affine_part(*g2, expect.as<BSElt>()) == Rat(-1, 2));
}

TEST_CASE("group axioms hold on random triples in every family") {
  check_axioms(make_heisenberg(), 4, 1000, 11);
  check_axioms(make_bs(2), 4, 1000, 12);
  check_axioms(make_bs(3), 4, 500, 13);
  check_axioms(make_abelian({0, 0, 0}), 4, 500, 14);
  check_axioms(make_crystallographic(2, {{{1, 0}, {0, -1}}}), 4, 500, 15);
  check_axioms(make_anosov({{2, 1}, {1, 1}}), 4, 1000, 16);
  auto prod = make_product({make_bs(2), make_abelian({0})});
  check_axioms(prod, 3, 300, 17);
}

TEST_CASE("anosov semidirect law and torsion-freeness") {
  auto g = make_anosov({{2, 1}, {1, 1}});
  GroupElement s = anosov_elt(0, 0, 1);
  GroupElement x = anosov_elt(1, 0, 0);
  // s x s^-1 = phi(x) = (2,1).
  CHECK(mul(*g, mul(*g, s, x), inv(*g, s)) == anosov_elt(2, 1, 0));
  CHECK(has_infinite_order(*g, x));
  CHECK_FALSE(has_infinite_order(*g, identity(*g)));
  auto [w0, w1] = anosov_twist(*g, -1, 1, 0);
  CHECK(w0 == 1);
  CHECK(w1 == -1);  // phi^-1 = [[1,-1],[-1,2]]
}

TEST_CASE("crystallographic closure, orders, and centrality") {
  auto g = make_crystallographic(2, {{{1, 0}, {0, -1}}});
  const auto& d = g->data_as<CrystData>();
  CHECK(d.elements.size() == 2);
  GroupElement s = *generator_by_label(*g, "s1");
  CHECK(is_identity(*g, mul(*g, s, s)));
  CHECK_FALSE(has_infinite_order(*g, s));
  GroupElement e1 = *generator_by_label(*g, "e1");
  GroupElement e2 = *generator_by_label(*g, "e2");
  CHECK(has_infinite_order(*g, e1));
  CHECK(commutes_with_generators(*g, e1));        // fixed axis is central
  CHECK_FALSE(commutes_with_generators(*g, e2));  // flipped axis is not
  // Glide-type element (v, s) with flipped translation has finite order ruled out.
  GroupElement glide = mul(*g, e2, s);
  CHECK_FALSE(has_infinite_order(*g, glide));  // (e2, s)^2 = (e2 - e2, 1) = 1
  GroupElement slide = mul(*g, e1, s);
  CHECK(has_infinite_order(*g, slide));  // (e1, s)^2 = (2 e1, 1)
}

TEST_CASE("amalgam normal form: Z is shared and factors commute") {
  // Heisenberg x_<c> Z: the central c of H is glued to the generator of K = Z.
  auto H = make_heisenberg();
  auto K = make_abelian({0}, "zline");
  auto g = make_amalgam(H, K, {heisenberg_elt(0, 0, 1)}, {{1}}, {{1}}, "heis-amal");
  GroupElement img_c = mul(*g, GroupElement(AmalElt{{heisenberg_elt(0, 0, 1), identity(*K)}}),
                           identity(*g));
  GroupElement img_k = mul(*g, GroupElement(AmalElt{{identity(*H), abelian_elt({1})}}),
                           identity(*g));
  CHECK(img_c == img_k);  // both normalize to the same coset representative
  check_axioms(g, 3, 400, 21);
  GroupElement ha = mul(*g, GroupElement(AmalElt{{heisenberg_elt(1, 0, 0), identity(*K)}}),
                        identity(*g));
  CHECK(mul(*g, ha, img_k) == mul(*g, img_k, ha));
}

TEST_CASE("element keys, coords round trip, deterministic order") {
  auto g = make_heisenberg();
  GroupElement e = heisenberg_elt(3, -2, 5);
  CHECK(element_key(*g, e) == "3,-2,5");
  CHECK(element_from_coords(*g, element_coords(*g, e)) == e);
  CHECK(element_less(*g, identity(*g), e));
  CHECK(element_less(*g, heisenberg_elt(1, 0, 0), heisenberg_elt(-1, 0, 0)));  // positives first
  auto bs = make_bs(2);
  GroupElement x = bs_elt(*bs, Rat(3, 4), 2);
  CHECK(element_from_coords(*bs, element_coords(*bs, x)) == x);
  CHECK_THROWS_AS(check_element(*g, x), StructuralError);  // mismatched instances
  CHECK_THROWS_AS((void)mul(*g, e, x), StructuralError);
}
