#include "treecast/tree.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace treecast {

namespace {

constexpr double kSharedPiTol = 1e-9;

}  // namespace

Pattern Pattern::from_string(const std::string& text, int alphabet_size) {
  Pattern pattern;
  pattern.states.reserve(text.size());
  for (char ch : text) {
    if (ch < '0' || ch > '9') {
      throw MalformedSpec("pattern characters must be decimal digits, got '" +
                          std::string(1, ch) + "'");
    }
    const int state = ch - '0';
    if (state >= alphabet_size) {
      throw StateOutOfRange("pattern digit " + std::to_string(state) +
                            " outside alphabet of size " + std::to_string(alphabet_size));
    }
    pattern.states.push_back(state);
  }
  return pattern;
}

std::string Pattern::to_string() const {
  const bool digits =
      std::all_of(states.begin(), states.end(), [](int s) { return 0 <= s && s <= 9; });
  std::string out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (digits) {
      out += static_cast<char>('0' + states[i]);
    } else {
      if (i > 0) out += ',';
      out += std::to_string(states[i]);
    }
  }
  return out;
}

const Channel& TreeSpec::edge_channel(int id) const {
  const Node& nd = nodes_.at(id);
  if (nd.parent < 0) {
    throw StateOutOfRange("node " + std::to_string(id) + " is the root and has no incoming edge");
  }
  return pool_[nd.edge_channel];
}

std::int64_t TreeSpec::pattern_count() const {
  std::int64_t count = 1;
  for (int i = 0; i < leaf_count(); ++i) {
    if (count > limits_.enumeration_cap / alphabet_size_) {
      throw EnumerationTooLarge(std::to_string(alphabet_size_) + "^" +
                                std::to_string(leaf_count()) + " patterns exceed the cap of " +
                                std::to_string(limits_.enumeration_cap));
    }
    count *= alphabet_size_;
  }
  return count;
}

Pattern TreeSpec::pattern_at(std::int64_t index) const {
  const std::int64_t total = pattern_count();
  if (index < 0 || index >= total) {
    throw StateOutOfRange("pattern index " + std::to_string(index) + " outside [0, " +
                          std::to_string(total) + ")");
  }
  Pattern pattern;
  pattern.states.assign(leaf_count(), 0);
  for (int pos = leaf_count() - 1; pos >= 0; --pos) {
    pattern.states[pos] = static_cast<int>(index % alphabet_size_);
    index /= alphabet_size_;
  }
  return pattern;
}

// Iterative depth-first pass computing leaf order, post-order, depth and arity.
void TreeSpec::finalize() {
  const int n = node_count();
  leaf_position_.assign(n, -1);
  leaves_.clear();
  post_order_.clear();
  post_order_.reserve(n);
  levels_ = 0;
  max_arity_ = 0;

  std::vector<int> depth(n, 0);
  struct Frame {
    int id;
    int next_child;
  };
  std::vector<Frame> stack{{root(), 0}};
  while (!stack.empty()) {
    const Frame frame = stack.back();
    const Node& nd = nodes_[frame.id];
    if (frame.next_child == 0) {
      max_arity_ = std::max(max_arity_, static_cast<int>(nd.children.size()));
      if (nd.children.empty()) {
        leaf_position_[frame.id] = static_cast<int>(leaves_.size());
        leaves_.push_back(frame.id);
        levels_ = std::max(levels_, depth[frame.id]);
      }
    }
    if (frame.next_child < static_cast<int>(nd.children.size())) {
      ++stack.back().next_child;
      const int child = nd.children[frame.next_child];
      depth[child] = depth[frame.id] + 1;
      stack.push_back({child, 0});
    } else {
      post_order_.push_back(frame.id);
      stack.pop_back();
    }
  }
}

TreeSpec build_complete_dary(int d, int g, const Channel& channel, const TreeLimits& limits) {
  if (d < 1) throw DimensionMismatch("arity d must be >= 1, got " + std::to_string(d));
  if (g < 0) throw DimensionMismatch("level count g must be >= 0, got " + std::to_string(g));

  std::int64_t total = 0;
  std::int64_t level = 1;
  for (int k = 0; k <= g; ++k) {
    if (total > limits.node_cap - level) {
      throw SizeOverflow("complete " + std::to_string(d) + "-ary tree with " +
                         std::to_string(g) + " levels exceeds the node cap of " +
                         std::to_string(limits.node_cap));
    }
    total += level;
    if (k < g) {
      if (level > limits.node_cap / d) {
        throw SizeOverflow("complete " + std::to_string(d) + "-ary tree with " +
                           std::to_string(g) + " levels exceeds the node cap of " +
                           std::to_string(limits.node_cap));
      }
      level *= d;
    }
  }

  TreeSpec spec;
  spec.limits_ = limits;
  spec.pool_.push_back(channel);
  spec.alphabet_size_ = channel.size();
  spec.pi_ = channel.pi();
  spec.nodes_.reserve(static_cast<std::size_t>(total));
  spec.nodes_.push_back({});
  spec.nodes_[0].label = "0";

  struct Frame {
    int id;
    int depth;
    int next_child;
  };
  std::vector<Frame> stack{{0, 0, 0}};
  while (!stack.empty()) {
    const Frame frame = stack.back();
    if (frame.depth == g || frame.next_child == d) {
      stack.pop_back();
      continue;
    }
    ++stack.back().next_child;
    const int child = static_cast<int>(spec.nodes_.size());
    spec.nodes_.push_back({});
    spec.nodes_[child].parent = frame.id;
    spec.nodes_[child].edge_channel = 0;
    spec.nodes_[child].label = std::to_string(child);
    spec.nodes_[frame.id].children.push_back(child);
    stack.push_back({child, frame.depth + 1, 0});
  }

  spec.finalize();
  return spec;
}

Channel lenient_channel(const Matrix& matrix, const ChannelOptions& options) {
  try {
    return validate_channel(matrix, options);
  } catch (const NotPrimitive&) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (std::abs(matrix.col(j).sum() - 1.0) > 1e-12) throw;
    }
    const Vector uniform = Vector::Constant(matrix.rows(), 1.0 / static_cast<double>(matrix.rows()));
    return trusted_channel(matrix, uniform, options);
  }
}

TreeSpec build_from_spec(const TreeDocument& document, const TreeLimits& limits,
                         const ChannelOptions& options) {
  if (document.root.empty()) throw MalformedSpec("document has no root id");
  if (document.channels.empty()) throw MalformedSpec("document defines no channels");

  // Adjacency keyed by label; sibling order equals edge order in the document.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> adjacency;
  std::map<std::string, int> parent_count;
  std::set<std::string> ids{document.root};
  for (const auto& edge : document.edges) {
    if (edge.parent == edge.child) {
      throw MalformedSpec("self-loop at node '" + edge.parent + "'");
    }
    if (!document.channels.count(edge.channel)) {
      throw UnknownChannel("edge " + edge.parent + " -> " + edge.child +
                           " references undefined channel '" + edge.channel + "'");
    }
    if (++parent_count[edge.child] > 1) {
      throw MalformedSpec("node '" + edge.child + "' has more than one parent");
    }
    adjacency[edge.parent].emplace_back(edge.child, edge.channel);
    ids.insert(edge.parent);
    ids.insert(edge.child);
  }
  if (parent_count.count(document.root)) {
    throw MalformedSpec("root '" + document.root + "' appears as a child");
  }
  if (static_cast<std::int64_t>(ids.size()) > limits.node_cap) {
    throw SizeOverflow("document has " + std::to_string(ids.size()) +
                       " nodes, above the cap of " + std::to_string(limits.node_cap));
  }

  TreeSpec spec;
  spec.limits_ = limits;

  // Validate each channel used on an edge once, in name order.
  std::map<std::string, int> pool_index;
  for (const auto& edge : document.edges) pool_index.emplace(edge.channel, -1);
  std::vector<std::string> pool_names;
  for (auto& [name, index] : pool_index) {
    index = static_cast<int>(spec.pool_.size());
    spec.pool_.push_back(lenient_channel(document.channels.at(name), options));
    pool_names.push_back(name);
  }

  if (spec.pool_.empty()) {
    // Degenerate single-node tree: alphabet and equilibrium taken from the
    // first defined channel.
    const Channel reference = lenient_channel(document.channels.begin()->second, options);
    spec.alphabet_size_ = reference.size();
    spec.pi_ = reference.pi();
  } else {
    spec.alphabet_size_ = spec.pool_[0].size();
    spec.pi_ = spec.pool_[0].pi();
    for (std::size_t k = 1; k < spec.pool_.size(); ++k) {
      if (spec.pool_[k].size() != spec.alphabet_size_) {
        throw DimensionMismatch("channels '" + pool_names[0] + "' and '" + pool_names[k] +
                                "' have different alphabet sizes");
      }
      const double gap = (spec.pool_[k].pi() - spec.pi_).lpNorm<Eigen::Infinity>();
      if (gap > kSharedPiTol) {
        throw MixedEquilibria("channels '" + pool_names[0] + "' and '" + pool_names[k] +
                              "' have equilibria differing by " + std::to_string(gap));
      }
    }
  }

  // Depth-first construction from the root; node ids are preorder.
  spec.nodes_.reserve(ids.size());
  spec.nodes_.push_back({});
  spec.nodes_[0].label = document.root;

  struct Frame {
    std::string label;
    int id;
    std::size_t next_child;
  };
  std::vector<Frame> stack{{document.root, 0, 0}};
  while (!stack.empty()) {
    const Frame frame = stack.back();
    const auto it = adjacency.find(frame.label);
    const std::size_t degree = it == adjacency.end() ? 0 : it->second.size();
    if (frame.next_child == degree) {
      stack.pop_back();
      continue;
    }
    ++stack.back().next_child;
    const auto& [child_label, channel_name] = it->second[frame.next_child];
    const int child = static_cast<int>(spec.nodes_.size());
    spec.nodes_.push_back({});
    spec.nodes_[child].parent = frame.id;
    spec.nodes_[child].edge_channel = pool_index.at(channel_name);
    spec.nodes_[child].label = child_label;
    spec.nodes_[frame.id].children.push_back(child);
    stack.push_back({child_label, child, 0});
  }

  if (spec.nodes_.size() != ids.size()) {
    throw MalformedSpec("document mentions " + std::to_string(ids.size()) + " nodes but only " +
                        std::to_string(spec.nodes_.size()) + " are reachable from the root");
  }

  spec.finalize();
  return spec;
}

}  // namespace treecast
