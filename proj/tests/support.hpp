#pragma once

// Shared helpers for the unit tests: random channel families and slow,
// independent reference implementations used to cross-check the library.

#include <treecast/channel.hpp>
#include <treecast/tree.hpp>

#include <random>
#include <string>
#include <vector>

namespace treecast::testing {

inline Matrix random_stochastic(int n, std::mt19937_64& rng, double floor = 0.05) {
  std::uniform_real_distribution<double> u(floor, 1.0);
  Matrix p(n, n);
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      p(i, j) = u(rng);
      sum += p(i, j);
    }
    p.row(i) /= sum;
  }
  return p;
}

// Reversible chains generated from a symmetric positive flow matrix F:
// rows of F normalized give P, row sums of F normalized give pi, and
// pi_i p_ij = F_ij / total is symmetric by construction.
inline Matrix random_reversible(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix f(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      f(i, j) = u(rng);
      f(j, i) = f(i, j);
    }
  Matrix p(n, n);
  for (int i = 0; i < n; ++i) p.row(i) = f.row(i) / f.row(i).sum();
  return p;
}

// Metropolis chains sharing one target distribution: p_ij for i != j equals
// w_ij * min(1, pi_j / pi_i) with symmetric positive weights w, the diagonal
// absorbing the remainder.  All entries stay positive for small enough w, so
// the chain is primitive with stationary law exactly pi.
inline Matrix random_metropolis(const Vector& pi, std::mt19937_64& rng) {
  const int n = static_cast<int>(pi.size());
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      w(i, j) = u(rng) / n;
      w(j, i) = w(i, j);
    }
  Matrix p = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      p(i, j) = w(i, j) * std::min(1.0, pi(j) / pi(i));
      off += p(i, j);
    }
    p(i, i) = 1.0 - off;
  }
  return p;
}

inline Vector random_distribution(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v / v.sum();
}

// Random nonnegative vector normalized so that <pi, v> = 1.
inline Vector random_normalized(const Vector& pi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v(pi.size());
  double dot = 0.0;
  do {
    for (int i = 0; i < v.size(); ++i) v(i) = u(rng);
    dot = pi.dot(v);
  } while (dot <= 1e-9);
  return v / dot;
}

// Joint-distribution oracle for pruning: for each root state, sums the
// product of edge transition probabilities over every assignment of states to
// the internal nodes. Exponential in the internal-node count; keep trees tiny.
inline Vector brute_force_likelihood(const TreeSpec& tree, const Pattern& pattern) {
  const int n = tree.alphabet_size();
  if (tree.is_leaf(tree.root())) {
    Vector rho = Vector::Zero(n);
    rho(pattern.states[0]) = 1.0;
    return rho;
  }
  std::vector<int> internal;
  for (int id = 0; id < tree.node_count(); ++id) {
    if (!tree.is_leaf(id) && id != tree.root()) internal.push_back(id);
  }
  std::vector<int> assign(tree.node_count(), -1);
  for (int leaf : tree.leaves()) assign[leaf] = pattern.states[tree.leaf_position(leaf)];

  Vector rho = Vector::Zero(n);
  for (int root_state = 0; root_state < n; ++root_state) {
    assign[tree.root()] = root_state;
    std::vector<int> digits(internal.size(), 0);
    double total = 0.0;
    bool done = false;
    while (!done) {
      for (std::size_t k = 0; k < internal.size(); ++k) assign[internal[k]] = digits[k];
      double prob = 1.0;
      for (int id = 0; id < tree.node_count(); ++id) {
        if (id == tree.root()) continue;
        prob *= tree.edge_channel(id).matrix()(assign[tree.node(id).parent], assign[id]);
      }
      total += prob;
      done = true;
      for (std::size_t pos = 0; pos < digits.size(); ++pos) {
        if (++digits[pos] < n) {
          done = false;
          break;
        }
        digits[pos] = 0;
      }
    }
    rho(root_state) = total;
  }
  return rho;
}

// Random tree over a shared-equilibrium reversible channel family. Depth and
// arity are bounded, and the number of internal non-root nodes is capped so
// the brute-force oracle stays cheap.
inline TreeSpec random_tree(std::mt19937_64& rng, int n_states, int max_depth = 3,
                            int max_children = 3, int max_internal_nonroot = 5) {
  Vector target = random_distribution(n_states, rng);
  TreeDocument doc;
  const int n_channels = 1 + static_cast<int>(rng() % 3);
  for (int k = 0; k < n_channels; ++k) {
    doc.channels["ch" + std::to_string(k)] = random_metropolis(target, rng);
  }
  doc.root = "n0";
  int next_id = 1;
  int internal_nonroot = 0;
  struct Item {
    std::string label;
    int depth;
  };
  std::vector<Item> queue{{"n0", 0}};
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const Item item = queue[q];
    int want = 0;
    if (item.depth == 0) {
      want = 1 + static_cast<int>(rng() % max_children);
    } else if (item.depth < max_depth && internal_nonroot < max_internal_nonroot) {
      want = static_cast<int>(rng() % (max_children + 1));
      if (want > 0) ++internal_nonroot;
    }
    for (int c = 0; c < want; ++c) {
      const std::string child = "n" + std::to_string(next_id++);
      doc.edges.push_back({item.label, child, "ch" + std::to_string(rng() % n_channels)});
      queue.push_back({child, item.depth + 1});
    }
  }
  return build_from_spec(doc);
}

// Slow stationary-distribution oracle: iterate x <- P^T x to convergence.
inline Vector power_iteration_pi(const Matrix& p, int iters = 200000, double tol = 1e-14) {
  const int n = static_cast<int>(p.rows());
  Vector x = Vector::Constant(n, 1.0 / n);
  for (int it = 0; it < iters; ++it) {
    Vector next = p.transpose() * x;
    next /= next.sum();
    if ((next - x).lpNorm<Eigen::Infinity>() < tol) return next;
    x = next;
  }
  return x;
}

}  // namespace treecast::testing
