#pragma once

#include <cstdint>

#include "treecast/tree.hpp"

namespace treecast {

// Root-state likelihood summary for one observed pattern.
struct LikelihoodState {
  // Raw likelihood vector rho, reconstructed as rho_tilde * exp(log_pr_pi);
  // underflows for very deep trees, where the two stable fields below remain
  // exact.
  Vector rho;
  Vector rho_tilde;   // rho scaled so that pi . rho_tilde = 1
  Vector memory;      // rho_tilde - 1
  double log_pr_pi;   // log of the stationary pattern probability rho . pi
};

struct Posterior {
  Vector mu;         // prior used for the query
  Vector r;          // posterior distribution over root states
  int map_state;     // argmax of r, ties broken toward the lowest state index
  double map_prob;   // max entry of r
};

struct SampleResult {
  int root_state;
  Pattern pattern;
};

// Canonical basis vector e_state of length alphabet_size.
Vector leaf_likelihood(int state, int alphabet_size);

// Leaf-to-root likelihood recursion: at each internal node the entrywise
// product over children of (edge channel applied to the child vector), with
// per-node renormalization to pi-mean 1 and log-space accumulation of the
// normalizers. Throws PatternImpossible when the pattern has likelihood zero
// under every root state.
LikelihoodState prune(const TreeSpec& tree, const Pattern& pattern);

// mu . rho for a normalized positive prior.
double pattern_probability(const LikelihoodState& state, const Vector& mu);

// Posterior r = (rho o mu) / (rho . mu) for a strictly positive prior.
Posterior posterior(const LikelihoodState& state, const Vector& mu);

// Samples a root state from mu and propagates it edge by edge to the leaves.
// Deterministic for a fixed seed.
SampleResult forward_sample(const TreeSpec& tree, const Vector& mu, std::uint64_t seed);

}  // namespace treecast
