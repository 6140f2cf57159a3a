#pragma once

#include <vector>

#include "treecast/channel.hpp"
#include "treecast/pruning.hpp"

namespace treecast {

// pi-weighted inner product: sum_i pi_i x_i y_i.
double pi_inner(const Vector& x, const Vector& y, const Vector& pi);
double pi_norm(const Vector& x, const Vector& pi);
double euclidean_norm(const Vector& x);
double uniform_norm(const Vector& x);

// x minus 1 times its pi-mean; the result is pi-orthogonal to 1.
Vector centralize(const Vector& x, const Vector& pi);

struct ChildMemoryNorms {
  double pi_norm;
  double uniform_norm;
};

// Decomposition of a parent's stationary pattern probability into the product
// of its children's subpattern probabilities times the dependence factor.
struct DependenceReport {
  double d_factor;        // pi-mean of the entrywise product of P_c alpha_tilde_c
  double pr_independent;  // product over children of the subpattern Pr_pi
  double pr_pi;           // d_factor * pr_independent
  std::vector<ChildMemoryNorms> child_memory_norms;
  std::vector<Vector> child_memories;  // m_c = P_c alpha_tilde_c - 1
};

struct ChildEdge {
  const LikelihoodState* state;  // pruning result of the child's subtree
  const Channel* channel;        // channel on the edge parent -> child
};

// All edge channels must share the equilibrium pi within 1e-9. Throws
// PatternImpossible when the combined pattern has zero likelihood.
DependenceReport dependence_report(const std::vector<ChildEdge>& children, const Vector& pi);

struct ProductExpansion {
  Vector product;  // entrywise product of (1 + m_c)
  double pi_mean;  // its pi-mean; equals the dependence factor for memory inputs
};

// For d <= 12 inputs the pi-mean is evaluated through the full 2^d-subset
// expansion 1 + sum over nonempty C of pi . (entrywise product of m_c over C),
// an independent route used to cross-check the direct product. Larger d falls
// back to the direct form.
ProductExpansion expand_products(const std::vector<Vector>& memories, const Vector& pi);

}  // namespace treecast
