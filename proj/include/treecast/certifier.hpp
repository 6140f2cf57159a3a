#pragma once

#include <optional>
#include <string>
#include <vector>

#include "treecast/channel.hpp"
#include "treecast/info_measures.hpp"

namespace treecast {

// Largest epsilon with 4 eps^2 < 1 + 2 eps, i.e. (1 + sqrt(5)) / 4. The
// rescaled per-level bound below is positive exactly below this value.
inline constexpr double kPartBEpsilonLimit = 0.80901699437494742410;

// 4 eps / (1 + 2 eps): the budget that the summed child memory uniform norms
// must not exceed before any of the product bounds apply.
double epsilon_budget(double epsilon);

// (1 + eps) / (1 - 4 eps^2 / (1 + 2 eps)); requires eps < kPartBEpsilonLimit.
double part_b_factor(double epsilon);

// The polynomial inequality behind the mixing bound: for d >= 2 and
// S in (0, 2), if S <= 4 eps / (1 + 2 eps) then (1 + S/d)^d < 1 + (1+eps) S.
struct PolyCheck {
  bool precondition_met;  // S <= 4 eps / (1 + 2 eps)
  double lhs;             // (1 + S/d)^d
  double rhs;             // 1 + (1 + eps) S
  bool inequality_ok;     // lhs < rhs, meaningful when the precondition holds
};
PolyCheck poly_bound_check(int d, double s, double epsilon);

// One checked inequality: holds allows 1e-12 slack, and |lhs - rhs| < 1e-12
// is additionally flagged as a boundary case.
struct Assertion {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool boundary = false;
};

// Outcome of one threshold condition. For the memory-bound checks the
// threshold is the precondition of the cited statement and `satisfied` means
// the precondition was met and the assertions were evaluated; an unsatisfied
// certificate carries no assertions and must be read as "precondition unmet",
// never as "bound failed". For the unsolvability conditions `satisfied` means
// the certified conclusion itself.
struct BoundCertificate {
  std::string condition_id;
  std::vector<double> constants;  // contraction constants or per-child norms
  int arity = 0;                  // d
  double min_pi = 0.0;
  double epsilon_used = 0.0;
  double threshold_lhs = 0.0;
  double threshold_rhs = 0.0;
  bool strict_threshold = false;  // the cited condition compares with < rather than <=
  bool satisfied = false;
  bool boundary = false;  // |threshold_lhs - threshold_rhs| < 1e-12
  std::optional<double> decay_factor;  // certified per-level factor, when applicable
  std::vector<Assertion> assertions;
};

// Dependence-factor mixing: when sum_c ||m_c||_inf is within the epsilon
// budget, |D - 1| < eps * sum_c ||m_c||_inf and |D - 1| <= 4 eps^2 / (1+2eps).
// D is recomputed from the memories through the subset expansion.
BoundCertificate mixing_check(const std::vector<Vector>& memories, const Vector& pi,
                              double epsilon);

// Product-form bound of the parent memory by the transported child memories:
// under the same budget, D ||rho_tilde - 1||_pi < (1+eps) sum_c ||m_c||_pi,
// and without the D factor when eps < kPartBEpsilonLimit.
BoundCertificate hadamard_check(const std::vector<Vector>& memories, const Vector& pi,
                                double epsilon, const LikelihoodState& root, double d_factor);

// Same bound expressed through the children's own memories and per-edge
// contraction constants; the budget becomes
// sum_c C_c <= (min pi / sqrt(1 - min pi)) * 4 eps / (1 + 2 eps).
BoundCertificate root_children_check(const std::vector<double>& c_constants, const Vector& pi,
                                     double epsilon, const std::vector<double>& child_memory_norms,
                                     double root_memory_norm, double d_factor);

// Patternwise unsolvability on a d-ary tree with one channel: satisfied when
// C d < min{(1 - 4 eps^2/(1+2eps))/(1+eps), (4 eps/(1+2eps)) min pi / sqrt(1 - min pi)},
// which at the default eps = 1/2 is the cited min{1/3, min pi / sqrt(1 - min pi)}.
// A satisfied certificate carries the per-level decay factor
// part_b_factor(eps) * C * d.
BoundCertificate unsolvability_condition(double c, int d, const Vector& pi, double epsilon = 0.5);

// Same condition with C = |theta_1| (reversible channels only).
BoundCertificate unsolvability_reversible(const Channel& channel, int d, double epsilon = 0.5);

// Same condition through the singular-value constant, stated on sigma_1:
// sigma_1 d < (min sqrt pi / max sqrt pi) * the threshold above.
BoundCertificate unsolvability_singular(const Channel& channel, int d, double epsilon = 0.5);

// Unsolvability in expectation: satisfied when
// C d < min{1/(1+eps), (4 eps/(1+2eps)) min pi / sqrt(1 - min pi)}, which at
// the default eps = 2 is the cited min{1/3, (8/5) min pi / sqrt(1 - min pi)}.
// A satisfied certificate carries the per-level factor (1+eps) * C * d.
BoundCertificate unsolvability_expectation(double c, int d, const Vector& pi,
                                           double epsilon = 2.0);

}  // namespace treecast
