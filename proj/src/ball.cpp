#include "prodhyp/ball.hpp"

#include <algorithm>

#include "prodhyp/error.hpp"

namespace prodhyp {

namespace {
// Empty input selects the group's designated generating set.
std::vector<GroupElement> symmetrize(const Group& g, const std::vector<GroupElement>& raw) {
  if (raw.empty()) return symmetric_generators(g);
  std::vector<GroupElement> out;
  for (const auto& e : raw) {
    if (is_identity(g, e)) continue;
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    GroupElement i = inv(g, e);
    if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(std::move(i));
  }
  if (out.empty()) throw StructuralError("empty generating set");
  return out;
}
}  // namespace

Ball enumerate_ball(const GroupHandle& g, int radius, std::size_t budget) {
  return enumerate_ball_with(g, {}, radius, budget);
}

Ball enumerate_ball_with(const GroupHandle& g, const std::vector<GroupElement>& raw_gens,
                         int radius, std::size_t budget) {
  if (radius < 0) throw StructuralError("enumerate_ball: radius must be >= 0");
  Ball ball;
  ball.group = g;
  ball.radius = radius;
  const auto gens = symmetrize(*g, raw_gens);

  std::vector<GroupElement> sphere{identity(*g)};
  ball.index.emplace(element_key(*g, sphere[0]), 0);
  ball.elements.push_back(sphere[0]);
  ball.lengths.push_back(0);
  ball.sphere_begin = {0, 1};

  for (int r = 1; r <= radius; ++r) {
    std::vector<GroupElement> next;
    for (const auto& e : sphere) {
      for (const auto& s : gens) {
        GroupElement n = mul(*g, e, s);
        std::string key = element_key(*g, n);
        if (ball.index.count(key)) continue;
        ball.index.emplace(std::move(key), 0);  // position fixed after sorting
        next.push_back(std::move(n));
      }
    }
    std::sort(next.begin(), next.end(),
              [&](const GroupElement& a, const GroupElement& b) { return element_less(*g, a, b); });
    for (auto& e : next) {
      if (ball.elements.size() >= budget)
        throw BudgetError("enumerate_ball: element budget exceeded", r - 1);
      ball.index[element_key(*g, e)] = ball.elements.size();
      ball.elements.push_back(std::move(e));
      ball.lengths.push_back(r);
    }
    ball.sphere_begin.push_back(ball.elements.size());
    sphere.clear();
    for (std::size_t i = ball.sphere_begin[r]; i < ball.sphere_begin[r + 1]; ++i)
      sphere.push_back(ball.elements[i]);
    if (sphere.empty()) {  // finite group exhausted early
      while (static_cast<int>(ball.sphere_begin.size()) < radius + 2)
        ball.sphere_begin.push_back(ball.elements.size());
      break;
    }
  }
  return ball;
}

WordLengthResult word_length(const GroupHandle& g, const GroupElement& target,
                             std::size_t budget) {
  return word_length_with(g, {}, target, budget);
}

WordLengthResult word_length_with(const GroupHandle& g, const std::vector<GroupElement>& raw_gens,
                                  const GroupElement& target, std::size_t budget) {
  const GroupElement id = identity(*g);
  if (target == id) return {true, 0, 0};
  const auto gens = symmetrize(*g, raw_gens);

  // Bidirectional BFS: forward from 1, backward from target (which is a
  // forward search for target^-1 * x, realized by right-multiplying).
  std::unordered_map<std::string, int> fwd{{element_key(*g, id), 0}};
  std::unordered_map<std::string, int> bwd{{element_key(*g, target), 0}};
  std::vector<GroupElement> fwd_frontier{id};
  std::vector<GroupElement> bwd_frontier{target};
  int fwd_depth = 0, bwd_depth = 0;
  std::size_t visited = 2;

  auto expand = [&](std::unordered_map<std::string, int>& mine,
                    std::unordered_map<std::string, int>& theirs,
                    std::vector<GroupElement>& frontier, int& depth,
                    std::optional<int>& meet) {
    std::vector<GroupElement> next;
    ++depth;
    for (const auto& e : frontier) {
      for (const auto& s : gens) {
        GroupElement n = mul(*g, e, s);
        std::string key = element_key(*g, n);
        if (mine.count(key)) continue;
        auto it = theirs.find(key);
        if (it != theirs.end()) {
          const int total = depth + it->second;
          if (!meet || total < *meet) meet = total;
        }
        mine.emplace(std::move(key), depth);
        next.push_back(std::move(n));
        ++visited;
      }
    }
    frontier = std::move(next);
  };

  std::optional<int> meet;
  while (true) {
    if (meet) return {true, *meet, *meet};
    if (fwd_frontier.empty() || bwd_frontier.empty())
      throw StructuralError("word_length: target not reachable from generating set");
    if (visited > budget) return {false, -1, fwd_depth + bwd_depth + 1};
    if (fwd_frontier.size() <= bwd_frontier.size())
      expand(fwd, bwd, fwd_frontier, fwd_depth, meet);
    else
      expand(bwd, fwd, bwd_frontier, bwd_depth, meet);
  }
}

}  // namespace prodhyp
