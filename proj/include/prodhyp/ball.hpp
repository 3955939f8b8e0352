#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "prodhyp/group.hpp"

namespace prodhyp {

// Exact word-metric ball for the group's designated (symmetrized) generating
// set. Elements are stored sphere by sphere, each sphere sorted in the
// deterministic element order, so enumeration order is reproducible.
struct Ball {
  GroupHandle group;
  int radius = 0;
  std::vector<GroupElement> elements;
  std::vector<int> lengths;                 // word length per element
  std::vector<std::size_t> sphere_begin;    // size radius + 2; sphere r = [begin[r], begin[r+1])
  std::unordered_map<std::string, std::size_t> index;  // element key -> position

  std::size_t size() const { return elements.size(); }
  std::size_t sphere_size(int r) const { return sphere_begin[r + 1] - sphere_begin[r]; }
  bool contains(const std::string& key) const { return index.count(key) != 0; }
};

inline constexpr std::size_t kDefaultBallBudget = 2'000'000;

Ball enumerate_ball(const GroupHandle& g, int radius, std::size_t budget = kDefaultBallBudget);
// Same, over an explicit generating set (inverses are added automatically).
Ball enumerate_ball_with(const GroupHandle& g, const std::vector<GroupElement>& gens,
                         int radius, std::size_t budget = kDefaultBallBudget);

struct WordLengthResult {
  bool exact = false;
  int length = -1;       // valid when exact
  int lower_bound = 0;   // valid always
};

inline constexpr std::size_t kDefaultSearchBudget = 1'000'000;

// Geodesic word length by bidirectional BFS with normal-form hashing.
WordLengthResult word_length(const GroupHandle& g, const GroupElement& target,
                             std::size_t budget = kDefaultSearchBudget);
WordLengthResult word_length_with(const GroupHandle& g, const std::vector<GroupElement>& gens,
                                  const GroupElement& target,
                                  std::size_t budget = kDefaultSearchBudget);

}  // namespace prodhyp
