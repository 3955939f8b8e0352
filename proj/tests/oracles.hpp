#pragma once

// Independent reference implementations used only by the test suites. Each
// oracle recomputes a quantity along a different route than the library:
// string rewriting instead of normal-form arithmetic, naive word enumeration
// instead of BFS, fraction-free elimination instead of row reduction, numeric
// geodesic integration instead of the cosh formula.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "prodhyp/ball.hpp"
#include "prodhyp/group.hpp"
#include "prodhyp/intlin.hpp"
#include "prodhyp/space.hpp"

namespace prodhyp::oracle {

// Heisenberg normal form computed by string rewriting on the presentation
// <a,b,c | [a,c]=[b,c]=1, [a,b]=c>. Input letters: a,b,c and A,B,C for
// inverses. Returns (m, n, k) with the word equal to a^m b^n c^k.
HeisElt heisenberg_rewrite(const std::string& word);

// All distinct elements reachable by words of length <= radius, with exact
// word lengths, by naive product-of-words enumeration.
std::map<std::string, int> word_ball(const GroupHandle& g, int radius);

// Exact word length of target via the naive enumeration above; -1 if not
// found within max_radius.
int word_length_bfs(const GroupHandle& g, const GroupElement& target, int max_radius);

// Tree distance by breadth-first search over explicit vertex adjacency
// (parent = coarser class, children = finer classes).
int tree_distance_bfs(long n, const TreeVertex& a, const TreeVertex& b, int max_depth = 64);

// Rank over Q by Bareiss fraction-free elimination.
int rank_bareiss(const RMat& m);

// Hyperbolic distance by Simpson integration along the geodesic.
double uhp_distance_integrated(double x1, double y1, double x2, double y2);

// Decides diagonalizability of the closure over conjugating matrices with
// entries in [-3, 3] (2x2 only).
bool crysto_bruteforce_2x2(const std::vector<IMat>& point_gens);

// Max |n * m2| over pairs of l^1 balls of radius R in Z^2 (the exact value of
// the Heisenberg cocycle sweep, derived independently of the cocycle code).
Int heisenberg_cocycle_max(int radius);

}  // namespace prodhyp::oracle
