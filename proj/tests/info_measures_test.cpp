#include <treecast/info_measures.hpp>

#include <cmath>

#include <doctest.h>

#include "support.hpp"

using namespace treecast;
using namespace treecast::testing;

namespace {

Matrix bsc(double p) {
  Matrix m(2, 2);
  m << 1.0 - p, p, p, 1.0 - p;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

Vector random_vector(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

// Verifies Pr_pi(parent pattern) = D * product of child Pr_pi on a complete
// d-ary tree, splitting each pattern into the children's contiguous leaf blocks.
void check_dependence_identity(const Channel& c, int d, int g) {
  TreeSpec parent = build_complete_dary(d, g, c);
  TreeSpec sub = build_complete_dary(d, g - 1, c);
  const int block = sub.leaf_count();
  for_each_pattern(parent, [&](std::int64_t, const Pattern& p) {
    const LikelihoodState root_state = prune(parent, p);
    std::vector<LikelihoodState> child_states;
    child_states.reserve(d);
    for (int ci = 0; ci < d; ++ci) {
      Pattern slice;
      slice.states.assign(p.states.begin() + ci * block, p.states.begin() + (ci + 1) * block);
      child_states.push_back(prune(sub, slice));
    }
    std::vector<ChildEdge> edges;
    for (const LikelihoodState& cs : child_states) edges.push_back({&cs, &c});
    const DependenceReport report = dependence_report(edges, parent.pi());
    CHECK(close_rel(report.pr_pi, std::exp(root_state.log_pr_pi), 1e-10));
    CHECK(report.d_factor > 0.0);

    // The parent's normalized vector is the child product rescaled by D.
    const ProductExpansion expansion = expand_products(report.child_memories, parent.pi());
    CHECK(close_rel(expansion.pi_mean, report.d_factor, 1e-12));
    CHECK((expansion.product / report.d_factor - root_state.rho_tilde).lpNorm<Eigen::Infinity>() <=
          1e-10);
  });
}

}  // namespace

TEST_SUITE("info_measures") {

TEST_CASE("pi inner products") {
  const Vector pi = vec2(0.5, 0.5);
  CHECK(pi_inner(Vector::Ones(2), Vector::Ones(2), pi) == 1.0);
  CHECK(pi_inner(vec2(2, 0), vec2(2, 0), pi) == 2.0);
  CHECK(pi_inner(vec2(1, -1), Vector::Ones(2), pi) == 0.0);
  CHECK_THROWS_AS(pi_inner(Vector::Ones(3), Vector::Ones(2), pi), DimensionMismatch);
  CHECK_THROWS_AS(pi_inner(Vector::Ones(2), Vector::Ones(2), Vector::Ones(3)), DimensionMismatch);

  std::mt19937_64 rng(7301);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const Vector p = random_distribution(n, rng);
    const Vector x = random_vector(n, rng);
    const Vector y = random_vector(n, rng);
    // symmetry and bilinearity spot checks
    CHECK(close_rel(pi_inner(x, y, p), pi_inner(y, x, p), 1e-12));
    CHECK(std::abs(pi_inner(x + y, y, p) - pi_inner(x, y, p) - pi_inner(y, y, p)) <= 1e-12);
  }
}

TEST_CASE("the three norms obey the comparison chain") {
  const Vector pi = vec2(0.5, 0.5);
  CHECK(pi_norm(Vector::Zero(2), pi) == 0.0);
  CHECK(euclidean_norm(Vector::Zero(2)) == 0.0);
  CHECK(uniform_norm(Vector::Zero(2)) == 0.0);

  const Vector x = vec2(2, 0);
  CHECK(std::abs(pi_norm(x, pi) - std::sqrt(2.0)) <= 1e-15);
  CHECK(euclidean_norm(x) == 2.0);
  CHECK(uniform_norm(x) == 2.0);
  // chain with equality: 2 <= 2 <= sqrt(2)/sqrt(0.5)
  CHECK(std::abs(pi_norm(x, pi) / std::sqrt(0.5) - 2.0) <= 1e-15);

  std::mt19937_64 rng(7302);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const Vector p = random_distribution(n, rng);
    const Vector v = random_vector(n, rng);
    const double inf = uniform_norm(v);
    const double two = euclidean_norm(v);
    const double weighted = pi_norm(v, p);
    CHECK(inf <= two + 1e-12);
    CHECK(two <= weighted / std::sqrt(p.minCoeff()) + 1e-12);
    // triangle inequality in the weighted norm
    const Vector w = random_vector(n, rng);
    CHECK(pi_norm(v + w, p) <= pi_norm(v, p) + pi_norm(w, p) + 1e-12);
  }
}

TEST_CASE("centralize removes the pi-mean") {
  const Vector pi = vec2(0.5, 0.5);
  CHECK(centralize(Vector::Ones(2), pi).lpNorm<Eigen::Infinity>() == 0.0);
  const Vector out = centralize(vec2(2, 0), pi);
  CHECK(out(0) == 1.0);
  CHECK(out(1) == -1.0);
  CHECK(std::abs(pi_inner(out, out, pi) - 1.0) <= 1e-15);

  std::mt19937_64 rng(7303);
  for (int rep = 0; rep < 500; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const Vector p = random_distribution(n, rng);
    const Vector x = random_vector(n, rng);
    const Vector centered = centralize(x, p);
    CHECK(std::abs(pi_inner(centered, Vector::Ones(n), p)) <= 1e-12);
    const double drop = pi_inner(x, Vector::Ones(n), p);
    CHECK(std::abs(pi_inner(centered, centered, p) - (pi_inner(x, x, p) - drop * drop)) <= 1e-10);
    CHECK(pi_norm(centered, p) <= pi_norm(x, p) + 1e-12);
  }
  CHECK_THROWS_AS(centralize(Vector::Ones(3), pi), DimensionMismatch);
}

TEST_CASE("dependence report of the two-leaf star") {
  Channel c = validate_channel(bsc(0.25));
  TreeSpec sub = build_complete_dary(2, 0, c);  // each child is a bare leaf
  const LikelihoodState left = prune(sub, Pattern::from_string("0", 2));
  const LikelihoodState right = prune(sub, Pattern::from_string("0", 2));
  const DependenceReport report = dependence_report({{&left, &c}, {&right, &c}}, c.pi());
  CHECK(std::abs(report.d_factor - 1.25) <= 1e-12);
  CHECK(std::abs(report.pr_independent - 0.25) <= 1e-12);
  CHECK(std::abs(report.pr_pi - 0.3125) <= 1e-12);
  REQUIRE(report.child_memories.size() == 2);
  for (const Vector& m : report.child_memories) {
    CHECK(std::abs(m(0) - 0.5) <= 1e-12);
    CHECK(std::abs(m(1) + 0.5) <= 1e-12);
  }
  for (const ChildMemoryNorms& norms : report.child_memory_norms) {
    CHECK(std::abs(norms.pi_norm - 0.5) <= 1e-12);
    CHECK(std::abs(norms.uniform_norm - 0.5) <= 1e-12);
  }
}

TEST_CASE("dependence report with heterogeneous edges matches direct pruning") {
  Channel strong = validate_channel(bsc(0.25));
  Channel weak = validate_channel(bsc(0.45));
  TreeSpec leaf_tree = build_complete_dary(2, 0, strong);
  const LikelihoodState left = prune(leaf_tree, Pattern::from_string("0", 2));
  const LikelihoodState right = prune(leaf_tree, Pattern::from_string("0", 2));
  const DependenceReport report =
      dependence_report({{&left, &strong}, {&right, &weak}}, strong.pi());
  CHECK(std::abs(report.d_factor - 1.05) <= 1e-12);
  CHECK(std::abs(report.pr_pi - 0.2625) <= 1e-12);

  TreeDocument doc;
  doc.channels["strong"] = bsc(0.25);
  doc.channels["weak"] = bsc(0.45);
  doc.root = "r";
  doc.edges = {{"r", "u", "strong"}, {"r", "v", "weak"}};
  const LikelihoodState direct = prune(build_from_spec(doc), Pattern::from_string("00", 2));
  CHECK(close_rel(std::exp(direct.log_pr_pi), report.pr_pi, 1e-12));
}

TEST_CASE("dependence factor degenerate cases") {
  Channel c = validate_channel(bsc(0.25));
  TreeSpec leaf_tree = build_complete_dary(2, 0, c);

  // A single child never changes the probability: D = 1 for every state.
  for (const char* text : {"0", "1"}) {
    const LikelihoodState only = prune(leaf_tree, Pattern::from_string(text, 2));
    const DependenceReport report = dependence_report({{&only, &c}}, c.pi());
    CHECK(std::abs(report.d_factor - 1.0) <= 1e-12);
  }

  // Uninformative children (memoryless channel): D = 1.
  Channel flat = validate_channel(bsc(0.5));
  const LikelihoodState a = prune(leaf_tree, Pattern::from_string("0", 2));
  const LikelihoodState b = prune(leaf_tree, Pattern::from_string("1", 2));
  const DependenceReport report = dependence_report({{&a, &flat}, {&b, &flat}}, flat.pi());
  CHECK(std::abs(report.d_factor - 1.0) <= 1e-12);

  CHECK_THROWS_AS(dependence_report({}, c.pi()), DimensionMismatch);

  // Mismatched equilibria are rejected.
  Channel skewed = validate_channel((Matrix(2, 2) << 0.9, 0.1, 0.3, 0.7).finished());
  CHECK_THROWS_AS(dependence_report({{&a, &skewed}}, c.pi()), MixedEquilibria);

  // Conflicting noiseless evidence: zero dependence factor.
  Vector uniform_pi = Vector::Constant(2, 0.5);
  Channel copy = trusted_channel(Matrix::Identity(2, 2), uniform_pi);
  CHECK_THROWS_AS(dependence_report({{&a, &copy}, {&b, &copy}}, uniform_pi), PatternImpossible);
}

TEST_CASE("dependence identity holds exhaustively on small complete trees") {
  std::mt19937_64 rng(7304);
  Channel binary = validate_channel(bsc(0.25));
  Channel ternary = validate_channel(random_metropolis(random_distribution(3, rng), rng));
  for (int d = 2; d <= 3; ++d) {
    for (int g = 1; g <= 2; ++g) {
      check_dependence_identity(binary, d, g);
      check_dependence_identity(ternary, d, g);
    }
  }
}

TEST_CASE("product expansion matches the direct product") {
  const Vector pi = vec2(0.5, 0.5);

  ProductExpansion flat = expand_products({Vector::Zero(2), Vector::Zero(2)}, pi);
  CHECK((flat.product - Vector::Ones(2)).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(flat.pi_mean == 1.0);

  const Vector m = vec2(0.5, -0.5);
  ProductExpansion star = expand_products({m, m}, pi);
  CHECK(std::abs(star.product(0) - 2.25) <= 1e-15);
  CHECK(std::abs(star.product(1) - 0.25) <= 1e-15);
  CHECK(std::abs(star.pi_mean - 1.25) <= 1e-15);

  std::mt19937_64 rng(7305);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Vector p = random_distribution(n, rng);
    const int d = 1 + static_cast<int>(rng() % 14);
    std::vector<Vector> memories;
    for (int k = 0; k < d; ++k) memories.push_back(centralize(random_vector(n, rng), p));
    const ProductExpansion expansion = expand_products(memories, p);
    // Subset-sum route (d <= 12) against the direct product route.
    CHECK(close_rel(expansion.pi_mean, p.dot(expansion.product), 1e-10));
    if (d == 2) {
      const double pairwise =
          1.0 + pi_inner(memories[0], memories[1], p);  // first-order terms vanish
      CHECK(close_rel(expansion.pi_mean, pairwise, 1e-10));
    }
  }

  CHECK_THROWS_AS(expand_products({}, pi), DimensionMismatch);
  CHECK_THROWS_AS(expand_products({Vector::Zero(3)}, pi), DimensionMismatch);
}

}  // TEST_SUITE
