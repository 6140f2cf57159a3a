#include "treecast/certifier.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "treecast/errors.hpp"

namespace treecast {
namespace {

constexpr double kTol = 1e-12;

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw SOutOfRange("epsilon must be positive, got " + std::to_string(epsilon));
  }
}

void require_pi(const Vector& pi) {
  if (pi.size() < 2) {
    throw DimensionMismatch("need at least two states, got " + std::to_string(pi.size()));
  }
  if (pi.minCoeff() <= 0.0) {
    throw SOutOfRange("stationary weights must be positive");
  }
}

void require_memories(const std::vector<Vector>& memories, const Vector& pi) {
  if (memories.empty()) {
    throw DimensionMismatch("need at least one child memory vector");
  }
  for (const Vector& m : memories) {
    if (m.size() != pi.size()) {
      throw DimensionMismatch("memory vector has length " + std::to_string(m.size()) +
                              ", stationary distribution has length " + std::to_string(pi.size()));
    }
  }
}

Assertion make_assertion(std::string name, double lhs, double rhs) {
  Assertion a;
  a.name = std::move(name);
  a.lhs = lhs;
  a.rhs = rhs;
  a.holds = lhs < rhs + kTol;
  a.boundary = std::abs(lhs - rhs) < kTol;
  return a;
}

// min pi / sqrt(1 - min pi): the scale that converts the uniform-norm budget
// into one on contraction-weighted pi norms.
double pi_floor_scale(const Vector& pi) {
  const double min_pi = pi.minCoeff();
  return min_pi / std::sqrt(1.0 - min_pi);
}

void set_threshold(BoundCertificate& cert, double lhs, double rhs, bool strict) {
  cert.threshold_lhs = lhs;
  cert.threshold_rhs = rhs;
  cert.strict_threshold = strict;
  cert.satisfied = strict ? lhs < rhs : lhs <= rhs + kTol;
  cert.boundary = std::abs(lhs - rhs) < kTol;
}

// Shared body of the patternwise unsolvability conditions. `scale` rescales
// both sides for presentation (1 except for the singular-value form);
// `decay_c` is the contraction constant the per-level factor is built from.
BoundCertificate patternwise_certificate(std::string condition_id, std::vector<double> constants,
                                         double decay_c, double scale, int d, const Vector& pi,
                                         double epsilon) {
  require_epsilon(epsilon);
  require_pi(pi);
  if (d < 1) {
    throw DimensionMismatch("arity must be at least 1, got " + std::to_string(d));
  }
  if (decay_c < 0.0) {
    throw SOutOfRange("contraction constant must be nonnegative, got " +
                      std::to_string(decay_c));
  }
  BoundCertificate cert;
  cert.condition_id = std::move(condition_id);
  cert.constants = std::move(constants);
  cert.arity = d;
  cert.min_pi = pi.minCoeff();
  cert.epsilon_used = epsilon;
  const double arm_poly = (1.0 - 4.0 * epsilon * epsilon / (1.0 + 2.0 * epsilon)) / (1.0 + epsilon);
  const double arm_budget = epsilon_budget(epsilon) * pi_floor_scale(pi);
  set_threshold(cert, scale * decay_c * d, scale * std::min(arm_poly, arm_budget),
                /*strict=*/true);
  if (cert.satisfied && epsilon < kPartBEpsilonLimit) {
    cert.decay_factor = part_b_factor(epsilon) * decay_c * d;
  }
  return cert;
}

}  // namespace

double epsilon_budget(double epsilon) {
  require_epsilon(epsilon);
  return 4.0 * epsilon / (1.0 + 2.0 * epsilon);
}

double part_b_factor(double epsilon) {
  require_epsilon(epsilon);
  if (epsilon >= kPartBEpsilonLimit) {
    throw SOutOfRange("epsilon must be below " + std::to_string(kPartBEpsilonLimit) +
                      " for the rescaled bound, got " + std::to_string(epsilon));
  }
  return (1.0 + epsilon) / (1.0 - 4.0 * epsilon * epsilon / (1.0 + 2.0 * epsilon));
}

PolyCheck poly_bound_check(int d, double s, double epsilon) {
  require_epsilon(epsilon);
  if (d < 2) {
    throw DimensionMismatch("polynomial bound needs arity >= 2, got " + std::to_string(d));
  }
  if (!(s > 0.0) || !(s < 2.0)) {
    throw SOutOfRange("S must lie in (0, 2), got " + std::to_string(s));
  }
  PolyCheck check;
  check.precondition_met = s <= epsilon_budget(epsilon) + kTol;
  check.lhs = std::pow(1.0 + s / d, d);
  check.rhs = 1.0 + (1.0 + epsilon) * s;
  check.inequality_ok = check.lhs < check.rhs;
  return check;
}

BoundCertificate mixing_check(const std::vector<Vector>& memories, const Vector& pi,
                              double epsilon) {
  require_epsilon(epsilon);
  require_pi(pi);
  require_memories(memories, pi);
  BoundCertificate cert;
  cert.condition_id = "dependence-mixing";
  cert.arity = static_cast<int>(memories.size());
  cert.min_pi = pi.minCoeff();
  cert.epsilon_used = epsilon;
  double uniform_sum = 0.0;
  for (const Vector& m : memories) {
    const double norm = uniform_norm(m);
    cert.constants.push_back(norm);
    uniform_sum += norm;
  }
  set_threshold(cert, uniform_sum, epsilon_budget(epsilon), /*strict=*/false);
  if (!cert.satisfied) return cert;
  const double d_factor = expand_products(memories, pi).pi_mean;
  const double deviation = std::abs(d_factor - 1.0);
  cert.assertions.push_back(
      make_assertion("dependence-deviation-linear", deviation, epsilon * uniform_sum));
  cert.assertions.push_back(make_assertion("dependence-deviation-budget", deviation,
                                           4.0 * epsilon * epsilon / (1.0 + 2.0 * epsilon)));
  return cert;
}

BoundCertificate hadamard_check(const std::vector<Vector>& memories, const Vector& pi,
                                double epsilon, const LikelihoodState& root, double d_factor) {
  require_epsilon(epsilon);
  require_pi(pi);
  require_memories(memories, pi);
  if (root.rho_tilde.size() != pi.size()) {
    throw DimensionMismatch("root state has length " + std::to_string(root.rho_tilde.size()) +
                            ", stationary distribution has length " + std::to_string(pi.size()));
  }
  BoundCertificate cert;
  cert.condition_id = "hadamard-memory-bound";
  cert.arity = static_cast<int>(memories.size());
  cert.min_pi = pi.minCoeff();
  cert.epsilon_used = epsilon;
  double uniform_sum = 0.0;
  double pi_sum = 0.0;
  for (const Vector& m : memories) {
    uniform_sum += uniform_norm(m);
    const double norm = pi_norm(m, pi);
    cert.constants.push_back(norm);
    pi_sum += norm;
  }
  set_threshold(cert, uniform_sum, epsilon_budget(epsilon), /*strict=*/false);
  if (!cert.satisfied) return cert;
  const double root_norm = pi_norm(root.rho_tilde - Vector::Ones(pi.size()), pi);
  cert.assertions.push_back(make_assertion("scaled-root-memory", d_factor * root_norm,
                                           (1.0 + epsilon) * pi_sum));
  if (epsilon < kPartBEpsilonLimit) {
    cert.assertions.push_back(
        make_assertion("root-memory", root_norm, part_b_factor(epsilon) * pi_sum));
  }
  return cert;
}

BoundCertificate root_children_check(const std::vector<double>& c_constants, const Vector& pi,
                                     double epsilon, const std::vector<double>& child_memory_norms,
                                     double root_memory_norm, double d_factor) {
  require_epsilon(epsilon);
  require_pi(pi);
  if (c_constants.empty()) {
    throw DimensionMismatch("need at least one child contraction constant");
  }
  if (c_constants.size() != child_memory_norms.size()) {
    throw DimensionMismatch("got " + std::to_string(c_constants.size()) +
                            " contraction constants for " +
                            std::to_string(child_memory_norms.size()) + " child memory norms");
  }
  for (double c : c_constants) {
    if (!(c > 0.0)) {
      throw SOutOfRange("per-child contraction constants must be positive, got " +
                        std::to_string(c));
    }
  }
  for (double norm : child_memory_norms) {
    if (norm < 0.0) {
      throw SOutOfRange("memory norms must be nonnegative, got " + std::to_string(norm));
    }
  }
  if (root_memory_norm < 0.0) {
    throw SOutOfRange("memory norms must be nonnegative, got " +
                      std::to_string(root_memory_norm));
  }
  BoundCertificate cert;
  cert.condition_id = "root-children-memory-bound";
  cert.constants = c_constants;
  cert.arity = static_cast<int>(c_constants.size());
  cert.min_pi = pi.minCoeff();
  cert.epsilon_used = epsilon;
  double c_sum = 0.0;
  double weighted_sum = 0.0;
  for (std::size_t i = 0; i < c_constants.size(); ++i) {
    c_sum += c_constants[i];
    weighted_sum += c_constants[i] * child_memory_norms[i];
  }
  set_threshold(cert, c_sum, pi_floor_scale(pi) * epsilon_budget(epsilon), /*strict=*/false);
  if (!cert.satisfied) return cert;
  cert.assertions.push_back(make_assertion("scaled-root-memory", d_factor * root_memory_norm,
                                           (1.0 + epsilon) * weighted_sum));
  if (epsilon < kPartBEpsilonLimit) {
    cert.assertions.push_back(make_assertion("root-memory", root_memory_norm,
                                             part_b_factor(epsilon) * weighted_sum));
  }
  return cert;
}

BoundCertificate unsolvability_condition(double c, int d, const Vector& pi, double epsilon) {
  return patternwise_certificate("unsolvable-patternwise", {c}, c, 1.0, d, pi, epsilon);
}

BoundCertificate unsolvability_reversible(const Channel& channel, int d, double epsilon) {
  if (!channel.reversible()) {
    throw ModeUnavailable("eigenvalue condition needs a reversible channel");
  }
  const double theta = *channel.profile().theta1_abs;
  return patternwise_certificate("unsolvable-patternwise-eigen", {theta}, theta, 1.0, d,
                                 channel.pi(), epsilon);
}

BoundCertificate unsolvability_singular(const Channel& channel, int d, double epsilon) {
  const SpectralProfile& profile = channel.profile();
  const Vector& pi = channel.pi();
  const double root_ratio =
      std::sqrt(pi.minCoeff()) / std::sqrt(pi.maxCoeff());  // rescales to sigma_1 itself
  // The working contraction constant is sigma_1 / root_ratio; the condition is
  // presented on sigma_1 with the threshold scaled down to match.
  return patternwise_certificate("unsolvable-patternwise-singular",
                                 {profile.sigma1, profile.c_general}, profile.c_general,
                                 root_ratio, d, pi, epsilon);
}

BoundCertificate unsolvability_expectation(double c, int d, const Vector& pi, double epsilon) {
  require_epsilon(epsilon);
  require_pi(pi);
  if (d < 1) {
    throw DimensionMismatch("arity must be at least 1, got " + std::to_string(d));
  }
  if (c < 0.0) {
    throw SOutOfRange("contraction constant must be nonnegative, got " + std::to_string(c));
  }
  BoundCertificate cert;
  cert.condition_id = "unsolvable-expectation";
  cert.constants = {c};
  cert.arity = d;
  cert.min_pi = pi.minCoeff();
  cert.epsilon_used = epsilon;
  const double arm_decay = 1.0 / (1.0 + epsilon);
  const double arm_budget = epsilon_budget(epsilon) * pi_floor_scale(pi);
  set_threshold(cert, c * d, std::min(arm_decay, arm_budget), /*strict=*/true);
  if (cert.satisfied) {
    cert.decay_factor = (1.0 + epsilon) * c * d;
  }
  return cert;
}

}  // namespace treecast
