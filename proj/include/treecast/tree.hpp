#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "treecast/channel.hpp"
#include "treecast/errors.hpp"

namespace treecast {

// Ordered assignment of alphabet states to the leaves of a tree.
struct Pattern {
  std::vector<int> states;

  // Digit-string form, e.g. "01302002" in leaf order.
  static Pattern from_string(const std::string& text, int alphabet_size);
  std::string to_string() const;

  bool operator==(const Pattern&) const = default;
};

struct TreeLimits {
  std::int64_t node_cap = 10'000'000;
  std::int64_t enumeration_cap = std::int64_t{1} << 24;
};

// Immutable rooted tree with a channel on each edge and a fixed depth-first
// left-to-right leaf order. All edge channels share one equilibrium
// distribution; that is validated at construction.
class TreeSpec {
 public:
  struct Node {
    int parent = -1;        // -1 at the root
    int edge_channel = -1;  // channel pool index for the edge parent -> this
    std::vector<int> children;
    std::string label;
  };

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int root() const { return 0; }
  const Node& node(int id) const { return nodes_.at(id); }
  bool is_leaf(int id) const { return nodes_.at(id).children.empty(); }

  // Leaves in depth-first discovery order; stable across calls.
  const std::vector<int>& leaves() const { return leaves_; }
  int leaf_count() const { return static_cast<int>(leaves_.size()); }
  // Index of a node within leaves(), or -1 for internal nodes.
  int leaf_position(int id) const { return leaf_position_.at(id); }
  // Children listed strictly before their parent.
  const std::vector<int>& post_order() const { return post_order_; }

  int levels() const { return levels_; }        // g: maximum root-to-leaf edge count
  int max_arity() const { return max_arity_; }  // d: maximum child count
  int alphabet_size() const { return alphabet_size_; }  // K+1
  const Vector& pi() const { return pi_; }      // shared equilibrium distribution
  const TreeLimits& limits() const { return limits_; }

  // Channel on the edge entering node id (id must not be the root).
  const Channel& edge_channel(int id) const;

  // (K+1)^leafcount; throws EnumerationTooLarge beyond the configured cap.
  std::int64_t pattern_count() const;
  // Pattern at a lexicographic index; the first leaf is the most significant digit.
  Pattern pattern_at(std::int64_t index) const;

 private:
  TreeSpec() = default;
  void finalize();

  std::vector<Node> nodes_;
  std::vector<Channel> pool_;
  std::vector<int> leaves_;
  std::vector<int> leaf_position_;
  std::vector<int> post_order_;
  int levels_ = 0;
  int max_arity_ = 0;
  int alphabet_size_ = 0;
  Vector pi_;
  TreeLimits limits_;

  friend TreeSpec build_complete_dary(int, int, const Channel&, const TreeLimits&);
  friend TreeSpec build_from_spec(const struct TreeDocument&, const TreeLimits&,
                                  const ChannelOptions&);
};

// Parsed form of a tree spec file: named channel matrices plus an edge list.
// Sibling order follows edge order in the document.
struct TreeDocument {
  std::map<std::string, Matrix> channels;
  std::string root;
  struct Edge {
    std::string parent;
    std::string child;
    std::string channel;
  };
  std::vector<Edge> edges;
};

// Complete d-ary tree with g levels and the same channel on every edge.
// g = 0 yields the degenerate single-node tree whose root is the only leaf.
TreeSpec build_complete_dary(int d, int g, const Channel& channel,
                             const TreeLimits& limits = {});

// Arbitrary tree from a document. Channels are validated (with the
// doubly-stochastic fallback of lenient_channel, so noiseless permutation
// channels are accepted) and all edge channels must share one equilibrium.
TreeSpec build_from_spec(const TreeDocument& document, const TreeLimits& limits = {},
                         const ChannelOptions& options = {});

// validate_channel, except that doubly stochastic matrices failing the
// primitivity test (noiseless permutation channels such as BSC(0)) fall back
// to a trusted channel with uniform equilibrium.
Channel lenient_channel(const Matrix& matrix, const ChannelOptions& options = {});

// Calls fn(index, pattern) for every lexicographic pattern index in
// [begin, end). The pattern object is reused between calls.
template <typename Fn>
void for_each_pattern(const TreeSpec& tree, std::int64_t begin, std::int64_t end, Fn&& fn) {
  const std::int64_t total = tree.pattern_count();
  if (begin < 0 || end > total || begin > end) {
    throw StateOutOfRange("pattern index range [" + std::to_string(begin) + ", " +
                          std::to_string(end) + ") outside [0, " + std::to_string(total) + ")");
  }
  if (begin == end) return;
  const int base = tree.alphabet_size();
  Pattern pattern = tree.pattern_at(begin);
  for (std::int64_t index = begin;;) {
    fn(static_cast<const std::int64_t&>(index), static_cast<const Pattern&>(pattern));
    if (++index == end) break;
    for (int pos = static_cast<int>(pattern.states.size()) - 1; pos >= 0; --pos) {
      if (++pattern.states[pos] < base) break;
      pattern.states[pos] = 0;
    }
  }
}

template <typename Fn>
void for_each_pattern(const TreeSpec& tree, Fn&& fn) {
  for_each_pattern(tree, 0, tree.pattern_count(), std::forward<Fn>(fn));
}

}  // namespace treecast
