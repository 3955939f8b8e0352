#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "prodhyp/ball.hpp"

using namespace prodhyp;

namespace {

void check_ball_against_word_oracle(const GroupHandle& g, int radius) {
  Ball ball = enumerate_ball(g, radius);
  auto oracle = oracle::word_ball(g, radius);
  REQUIRE(ball.size() == oracle.size());
  for (size_t i = 0; i < ball.size(); ++i) {
    auto it = oracle.find(element_key(*g, ball.elements[i]));
    REQUIRE(it != oracle.end());
    CHECK(it->second == ball.lengths[i]);
  }
  // Nesting: sphere offsets increase and spheres partition the ball.
  for (int r = 0; r <= radius; ++r) CHECK(ball.sphere_begin[r] <= ball.sphere_begin[r + 1]);
  CHECK(ball.sphere_begin[radius + 1] == ball.size());
}

}  // namespace

TEST_CASE("Z^2 ball of radius 1 has 5 elements") {
  auto g = make_abelian({0, 0});
  Ball b = enumerate_ball(g, 1);
  CHECK(b.size() == 5);
  CHECK(b.sphere_size(0) == 1);
  CHECK(b.sphere_size(1) == 4);
}

TEST_CASE("ball sizes match the naive word-enumeration oracle up to radius 5") {
  check_ball_against_word_oracle(make_heisenberg({"a", "b", "c"}), 2);
  check_ball_against_word_oracle(make_heisenberg(), 5);
  check_ball_against_word_oracle(make_bs(2), 3);
  check_ball_against_word_oracle(make_bs(2), 5);
  check_ball_against_word_oracle(make_bs(3), 4);
  check_ball_against_word_oracle(make_abelian({0, 0}), 5);
  check_ball_against_word_oracle(make_crystallographic(2, {{{1, 0}, {0, -1}}}), 5);
  check_ball_against_word_oracle(make_anosov({{2, 1}, {1, 1}}), 4);
}

TEST_CASE("deterministic enumeration order") {
  auto g = make_heisenberg();
  Ball b1 = enumerate_ball(g, 3);
  Ball b2 = enumerate_ball(g, 3);
  REQUIRE(b1.size() == b2.size());
  for (size_t i = 0; i < b1.size(); ++i) CHECK(b1.elements[i] == b2.elements[i]);
  // Monotone nesting: B(2) is a prefix of B(3).
  Ball small = enumerate_ball(g, 2);
  for (size_t i = 0; i < small.size(); ++i) CHECK(small.elements[i] == b1.elements[i]);
}

TEST_CASE("ball budget produces a resource error with partial radius") {
  auto g = make_heisenberg();
  try {
    (void)enumerate_ball(g, 6, 50);
    FAIL("expected BudgetError");
  } catch (const BudgetError& e) {
    CHECK(e.reached_radius >= 1);
    CHECK(e.reached_radius < 6);
  }
}

TEST_CASE("word lengths agree with the BFS oracle") {
  auto h = make_heisenberg();  // generators {a, b} only
  WordLengthResult c_len = word_length(h, heisenberg_elt(0, 0, 1));
  CHECK(c_len.exact);
  CHECK(c_len.length == 4);  // c = [a,b]
  CHECK(oracle::word_length_bfs(h, heisenberg_elt(0, 0, 1), 4) == 4);

  auto z2 = make_abelian({0, 0});
  WordLengthResult l = word_length(z2, abelian_elt({3, 4}));
  CHECK(l.exact);
  CHECK(l.length == 7);

  auto bs = make_bs(2);
  GroupElement a4 = GroupElement(BSElt{4, 0, 0});
  WordLengthResult bl = word_length(bs, a4);
  CHECK(bl.exact);
  CHECK(bl.length == oracle::word_length_bfs(bs, a4, 6));
}

TEST_CASE("word length honors budget with a lower bound") {
  auto h = make_heisenberg();
  WordLengthResult r = word_length(h, heisenberg_elt(40, -35, 900), 2000);
  if (!r.exact) CHECK(r.lower_bound >= 1);
}

TEST_CASE("explicit generating sets") {
  auto g = make_heisenberg();
  GroupElement a = heisenberg_elt(1, 0, 0), b = heisenberg_elt(0, 1, 0),
               c = heisenberg_elt(0, 0, 1);
  Ball with_c = enumerate_ball_with(g, {a, b, c}, 2);
  Ball without_c = enumerate_ball_with(g, {a, b}, 2);
  CHECK(with_c.size() > without_c.size());
  WordLengthResult wc = word_length_with(g, {a, b, c}, c);
  CHECK(wc.exact);
  CHECK(wc.length == 1);
}
