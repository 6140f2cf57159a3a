#include "treecast/pruning.hpp"

#include <cmath>
#include <random>

namespace treecast {

namespace {

void check_prior(const Vector& mu, int size, bool require_normalized) {
  if (mu.size() != size) {
    throw BadPrior("prior length " + std::to_string(mu.size()) + " does not match alphabet size " +
                   std::to_string(size));
  }
  if ((mu.array() <= 0.0).any()) {
    throw BadPrior("prior entries must be strictly positive");
  }
  if (require_normalized && std::abs(mu.sum() - 1.0) > 1e-12) {
    throw BadPrior("prior sums to " + std::to_string(mu.sum()));
  }
}

double uniform01(std::mt19937_64& rng) {
  // 53 random bits; avoids implementation-defined std distributions so that
  // results are identical across standard libraries.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int categorical(const Vector& weights, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    cumulative += weights(i);
    if (u < cumulative) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

Vector leaf_likelihood(int state, int alphabet_size) {
  if (state < 0 || state >= alphabet_size) {
    throw StateOutOfRange("state " + std::to_string(state) + " outside alphabet of size " +
                          std::to_string(alphabet_size));
  }
  Vector e = Vector::Zero(alphabet_size);
  e(state) = 1.0;
  return e;
}

LikelihoodState prune(const TreeSpec& tree, const Pattern& pattern) {
  if (static_cast<int>(pattern.states.size()) != tree.leaf_count()) {
    throw DimensionMismatch("pattern has " + std::to_string(pattern.states.size()) +
                            " states for a tree with " + std::to_string(tree.leaf_count()) +
                            " leaves");
  }
  const int n = tree.alphabet_size();
  const Vector& pi = tree.pi();

  // Per node: likelihood vector normalized to pi-mean 1, and the accumulated
  // log-normalizer of its subtree.
  std::vector<Vector> normalized(tree.node_count());
  std::vector<double> log_z(tree.node_count(), 0.0);

  for (int id : tree.post_order()) {
    if (tree.is_leaf(id)) {
      const int state = pattern.states[tree.leaf_position(id)];
      normalized[id] = leaf_likelihood(state, n);
      const double z = pi(state);
      normalized[id] /= z;
      log_z[id] = std::log(z);
      continue;
    }
    Vector raw = Vector::Ones(n);
    double carried = 0.0;
    for (int child : tree.node(id).children) {
      raw.array() *= (tree.edge_channel(child).matrix() * normalized[child]).array();
      carried += log_z[child];
      normalized[child].resize(0);  // subtree result no longer needed
    }
    const double z = pi.dot(raw);
    if (z <= 0.0) {
      throw PatternImpossible("pattern " + pattern.to_string() +
                              " has zero likelihood at node '" + tree.node(id).label + "'");
    }
    normalized[id] = raw / z;
    log_z[id] = carried + std::log(z);
  }

  LikelihoodState state;
  state.rho_tilde = normalized[tree.root()];
  state.memory = state.rho_tilde - Vector::Ones(n);
  state.log_pr_pi = log_z[tree.root()];
  state.rho = state.rho_tilde * std::exp(state.log_pr_pi);
  return state;
}

double pattern_probability(const LikelihoodState& state, const Vector& mu) {
  check_prior(mu, static_cast<int>(state.rho_tilde.size()), /*require_normalized=*/true);
  return mu.dot(state.rho_tilde) * std::exp(state.log_pr_pi);
}

Posterior posterior(const LikelihoodState& state, const Vector& mu) {
  check_prior(mu, static_cast<int>(state.rho_tilde.size()), /*require_normalized=*/false);
  Posterior post;
  post.mu = mu;
  // The log normalizer cancels in the ratio, so rho_tilde substitutes for rho.
  const Vector weighted = state.rho_tilde.cwiseProduct(mu);
  post.r = weighted / weighted.sum();
  post.map_state = 0;
  for (int i = 1; i < post.r.size(); ++i) {
    if (post.r(i) > post.r(post.map_state)) post.map_state = i;
  }
  post.map_prob = post.r(post.map_state);
  return post;
}

SampleResult forward_sample(const TreeSpec& tree, const Vector& mu, std::uint64_t seed) {
  check_prior(mu, tree.alphabet_size(), /*require_normalized=*/true);
  std::mt19937_64 rng(seed);
  std::vector<int> state(tree.node_count(), -1);

  // Reverse post-order visits every parent before its children.
  const std::vector<int>& order = tree.post_order();
  SampleResult result;
  result.pattern.states.assign(tree.leaf_count(), -1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int id = *it;
    if (id == tree.root()) {
      state[id] = categorical(mu, rng);
      result.root_state = state[id];
    } else {
      const Matrix& p = tree.edge_channel(id).matrix();
      state[id] = categorical(p.row(state[tree.node(id).parent]).transpose(), rng);
    }
    if (tree.is_leaf(id)) result.pattern.states[tree.leaf_position(id)] = state[id];
  }
  return result;
}

}  // namespace treecast
