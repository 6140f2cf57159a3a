#include "treecast/info_measures.hpp"

#include <bit>
#include <cmath>

namespace treecast {

namespace {

void check_lengths(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": lengths " + std::to_string(a) + " and " +
                            std::to_string(b) + " differ");
  }
}

}  // namespace

double pi_inner(const Vector& x, const Vector& y, const Vector& pi) {
  check_lengths(x.size(), y.size(), "pi_inner");
  check_lengths(x.size(), pi.size(), "pi_inner");
  return (pi.array() * x.array() * y.array()).sum();
}

double pi_norm(const Vector& x, const Vector& pi) {
  check_lengths(x.size(), pi.size(), "pi_norm");
  return std::sqrt((pi.array() * x.array() * x.array()).sum());
}

double euclidean_norm(const Vector& x) { return x.norm(); }

double uniform_norm(const Vector& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

Vector centralize(const Vector& x, const Vector& pi) {
  check_lengths(x.size(), pi.size(), "centralize");
  return x - Vector::Ones(x.size()) * pi.dot(x);
}

DependenceReport dependence_report(const std::vector<ChildEdge>& children, const Vector& pi) {
  if (children.empty()) {
    throw DimensionMismatch("dependence report needs at least one child");
  }
  const Eigen::Index n = pi.size();
  const Vector ones = Vector::Ones(n);

  DependenceReport report;
  Vector product = ones;
  double log_independent = 0.0;
  for (const ChildEdge& child : children) {
    check_lengths(child.channel->matrix().rows(), n, "dependence_report");
    check_lengths(child.state->rho_tilde.size(), n, "dependence_report");
    const double gap = (child.channel->pi() - pi).lpNorm<Eigen::Infinity>();
    if (gap > 1e-9) {
      throw MixedEquilibria("child channel equilibrium differs by " + std::to_string(gap));
    }
    const Vector transported = child.channel->matrix() * child.state->rho_tilde;
    const Vector memory = transported - ones;
    report.child_memory_norms.push_back({pi_norm(memory, pi), uniform_norm(memory)});
    report.child_memories.push_back(memory);
    product.array() *= transported.array();
    log_independent += child.state->log_pr_pi;
  }

  report.d_factor = pi.dot(product);
  if (report.d_factor <= 0.0) {
    throw PatternImpossible("dependence factor is zero: the combined pattern has zero likelihood");
  }
  report.pr_independent = std::exp(log_independent);
  report.pr_pi = report.d_factor * report.pr_independent;
  return report;
}

ProductExpansion expand_products(const std::vector<Vector>& memories, const Vector& pi) {
  if (memories.empty()) {
    throw DimensionMismatch("product expansion needs at least one vector");
  }
  const Eigen::Index n = pi.size();
  for (const Vector& m : memories) check_lengths(m.size(), n, "expand_products");

  const int d = static_cast<int>(memories.size());
  ProductExpansion out;
  out.product = Vector::Ones(n);
  for (const Vector& m : memories) out.product.array() *= (1.0 + m.array());

  if (d <= 12) {
    // Subset products share work: each mask extends the mask without its
    // lowest set bit by one factor.
    const std::uint32_t count = std::uint32_t{1} << d;
    std::vector<Vector> subset(count);
    subset[0] = Vector::Ones(n);
    double accumulated = 0.0;
    for (std::uint32_t mask = 1; mask < count; ++mask) {
      const std::uint32_t low = mask & (~mask + 1);
      subset[mask] = subset[mask ^ low].cwiseProduct(memories[std::countr_zero(mask)]);
      accumulated += pi.dot(subset[mask]);
    }
    out.pi_mean = 1.0 + accumulated;
  } else {
    out.pi_mean = pi.dot(out.product);
  }
  return out;
}

}  // namespace treecast
