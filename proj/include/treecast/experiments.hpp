#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "treecast/certifier.hpp"
#include "treecast/channel.hpp"
#include "treecast/tree.hpp"

namespace treecast {

// One row of an experiment report: exhaustive statistics for a tree (or one
// depth of a sweep), optionally joined with Monte Carlo reconstruction fields.
struct ExperimentRow {
  int g = 0;
  std::int64_t pattern_count = 0;
  std::int64_t impossible_count = 0;  // zero-probability patterns, excluded from norms
  double max_memory_norm = 0.0;          // max over patterns of ||rho_tilde - 1||_pi
  double expected_memory_norm_pi = 0.0;  // stationary-weighted expectation of the same
  double expected_memory_norm_mu = 0.0;  // expectation under the supplied prior
  std::vector<double> tv_sums;  // sum over patterns of |rho^i - rho^j|, pairs i<j in order
  std::optional<double> decay_ratio;  // this row's max over the previous row's
  std::optional<double> map_accuracy;
  std::optional<double> map_se;
};

// State pairs (i, j) with i < j in the order tv_sums uses.
std::vector<std::pair<int, int>> state_pairs(int alphabet_size);

// Exact sums over every pattern of the tree: max/expected memory norms under
// the stationary weights and under mu, plus pairwise likelihood distances.
// Work is split over `workers` contiguous index ranges and merged in range
// order with compensated accumulation.
ExperimentRow exhaustive_stats(const TreeSpec& tree, const Vector& mu, int workers = 1);

// Numerical check of the chains tying the two pattern measures and the two
// vanishing notions together; each slack is the worst (smallest) margin of
// one inequality family over all patterns, nonnegative when the family holds.
struct EquivalenceReport {
  std::int64_t patterns = 0;
  double pr_lower_slack = 0.0;   // Pr_pi - min(pi) Pr_mu
  double pr_upper_slack = 0.0;   // Pr_mu / min(mu) - Pr_pi
  double exp_lower_slack = 0.0;  // E_pi - min(pi) E_mu of the L1 memory norm
  double exp_upper_slack = 0.0;  // E_mu / min(mu) - E_pi
  double tv_upper_slack = 0.0;   // (|r_i - 1| + |r_j - 1|) - |r_i - r_j|
  double tv_lower_slack = 0.0;   // sum_{j != i} pi_j |r_i - r_j| - |r_i - 1|
  bool all_hold = false;         // every slack >= -1e-10
};
EquivalenceReport equivalence_check(const TreeSpec& tree, const Vector& mu);

// Exhaustive depth sweep over complete d-ary trees sharing one channel, with
// the per-level decay certificate for the requested contraction constant.
struct DecaySweep {
  std::vector<ExperimentRow> rows;
  std::optional<BoundCertificate> certificate;
  std::optional<double> certified_factor;  // certified per-level bound, when satisfied
};
DecaySweep decay_sweep(const Channel& channel, int d, int g_min, int g_max,
                       ContractionMode mode, const Vector& mu, int workers = 1);

// Forward-samples the broadcasting process, reconstructs the root by MAP from
// the sampled pattern, and scores against the true root state. Per-sample
// seeds are derived from the master seed by index, so serial and partitioned
// runs return bit-identical results.
struct MonteCarloResult {
  std::int64_t n_samples = 0;
  std::int64_t correct = 0;
  double accuracy = 0.0;
  double std_error = 0.0;  // binomial
};
MonteCarloResult monte_carlo_reconstruction(const TreeSpec& tree, const Vector& mu,
                                            std::int64_t n_samples, std::uint64_t seed,
                                            int workers = 1);

// Fixed-column CSV with a schema-version header line.
void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows, int alphabet_size);

}  // namespace treecast
