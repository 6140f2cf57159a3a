#include "treecast/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

#include "treecast/errors.hpp"
#include "treecast/info_measures.hpp"
#include "treecast/pruning.hpp"

namespace treecast {
namespace {

// Neumaier-compensated running sum; merging adds another partial's value.
class StableSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<std::pair<std::int64_t, std::int64_t>> partition_range(std::int64_t total,
                                                                   int workers) {
  const int n = std::max(1, workers);
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  const std::int64_t chunk = (total + n - 1) / std::max<std::int64_t>(1, n);
  for (std::int64_t begin = 0; begin < total; begin += chunk) {
    ranges.emplace_back(begin, std::min(total, begin + chunk));
  }
  if (ranges.empty()) ranges.emplace_back(0, 0);
  return ranges;
}

// Runs fn(worker_index, begin, end) over the partition, on threads when more
// than one range exists; rethrows the first worker error in range order.
template <typename Fn>
void run_partitioned(const std::vector<std::pair<std::int64_t, std::int64_t>>& ranges, Fn&& fn) {
  if (ranges.size() == 1) {
    fn(0, ranges[0].first, ranges[0].second);
    return;
  }
  std::vector<std::exception_ptr> errors(ranges.size());
  std::vector<std::thread> threads;
  threads.reserve(ranges.size());
  for (std::size_t w = 0; w < ranges.size(); ++w) {
    threads.emplace_back([&, w] {
      try {
        fn(w, ranges[w].first, ranges[w].second);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Index-derived per-sample seed: identical for any worker partitioning.
std::uint64_t derive_seed(std::uint64_t master, std::int64_t index) {
  return mix64(master + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index + 1));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::pair<int, int>> state_pairs(int alphabet_size) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < alphabet_size; ++i) {
    for (int j = i + 1; j < alphabet_size; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

ExperimentRow exhaustive_stats(const TreeSpec& tree, const Vector& mu, int workers) {
  const std::int64_t total = tree.pattern_count();
  const Vector& pi = tree.pi();
  const auto pairs = state_pairs(tree.alphabet_size());

  struct Partial {
    double max_norm = 0.0;
    std::int64_t impossible = 0;
    StableSum sum_pi;
    StableSum sum_mu;
    std::vector<StableSum> tv;
  };
  const auto ranges = partition_range(total, workers);
  std::vector<Partial> partials(ranges.size());
  for (Partial& p : partials) p.tv.resize(pairs.size());

  run_partitioned(ranges, [&](std::size_t w, std::int64_t begin, std::int64_t end) {
    Partial& part = partials[w];
    for_each_pattern(tree, begin, end, [&](std::int64_t, const Pattern& pattern) {
      LikelihoodState state;
      try {
        state = prune(tree, pattern);
      } catch (const PatternImpossible&) {
        ++part.impossible;
        return;
      }
      const double norm = pi_norm(state.memory, pi);
      part.max_norm = std::max(part.max_norm, norm);
      part.sum_pi.add(std::exp(state.log_pr_pi) * norm);
      part.sum_mu.add(pattern_probability(state, mu) * norm);
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        part.tv[k].add(std::abs(state.rho(pairs[k].first) - state.rho(pairs[k].second)));
      }
    });
  });

  ExperimentRow row;
  row.g = tree.levels();
  row.pattern_count = total;
  StableSum sum_pi, sum_mu;
  std::vector<StableSum> tv(pairs.size());
  for (const Partial& part : partials) {
    row.max_memory_norm = std::max(row.max_memory_norm, part.max_norm);
    row.impossible_count += part.impossible;
    sum_pi.add(part.sum_pi.value());
    sum_mu.add(part.sum_mu.value());
    for (std::size_t k = 0; k < pairs.size(); ++k) tv[k].add(part.tv[k].value());
  }
  row.expected_memory_norm_pi = sum_pi.value();
  row.expected_memory_norm_mu = sum_mu.value();
  for (const StableSum& s : tv) row.tv_sums.push_back(s.value());
  return row;
}

EquivalenceReport equivalence_check(const TreeSpec& tree, const Vector& mu) {
  const Vector& pi = tree.pi();
  const double min_pi = pi.minCoeff();
  const double min_mu = mu.minCoeff();
  const int n = tree.alphabet_size();

  EquivalenceReport report;
  double worst_pattern = std::numeric_limits<double>::infinity();
  report.pr_lower_slack = worst_pattern;
  report.pr_upper_slack = worst_pattern;
  report.tv_upper_slack = worst_pattern;
  report.tv_lower_slack = worst_pattern;
  StableSum exp_pi_l1, exp_mu_l1;

  for_each_pattern(tree, [&](std::int64_t, const Pattern& pattern) {
    ++report.patterns;
    LikelihoodState state;
    try {
      state = prune(tree, pattern);
    } catch (const PatternImpossible&) {
      return;  // both measures put zero mass here; every chain is trivial
    }
    const double pr_pi = std::exp(state.log_pr_pi);
    const double pr_mu = pattern_probability(state, mu);
    report.pr_lower_slack = std::min(report.pr_lower_slack, pr_pi - min_pi * pr_mu);
    report.pr_upper_slack = std::min(report.pr_upper_slack, pr_mu / min_mu - pr_pi);

    const double l1 = state.memory.cwiseAbs().sum();
    exp_pi_l1.add(pr_pi * l1);
    exp_mu_l1.add(pr_mu * l1);

    for (int i = 0; i < n; ++i) {
      double weighted = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const double gap = std::abs(state.rho_tilde(i) - state.rho_tilde(j));
        weighted += pi(j) * gap;
        if (j > i) {
          report.tv_upper_slack =
              std::min(report.tv_upper_slack,
                       std::abs(state.memory(i)) + std::abs(state.memory(j)) - gap);
        }
      }
      report.tv_lower_slack =
          std::min(report.tv_lower_slack, weighted - std::abs(state.memory(i)));
    }
  });

  report.exp_lower_slack = exp_pi_l1.value() - min_pi * exp_mu_l1.value();
  report.exp_upper_slack = exp_mu_l1.value() / min_mu - exp_pi_l1.value();
  const double worst =
      std::min({report.pr_lower_slack, report.pr_upper_slack, report.exp_lower_slack,
                report.exp_upper_slack, report.tv_upper_slack, report.tv_lower_slack});
  report.all_hold = worst >= -1e-10;
  return report;
}

DecaySweep decay_sweep(const Channel& channel, int d, int g_min, int g_max,
                       ContractionMode mode, const Vector& mu, int workers) {
  if (g_min < 0 || g_min > g_max) {
    throw SOutOfRange("sweep range must satisfy 0 <= g_min <= g_max, got " +
                      std::to_string(g_min) + ".." + std::to_string(g_max));
  }
  DecaySweep sweep;
  switch (mode) {
    case ContractionMode::reversible_eig:
      sweep.certificate = unsolvability_reversible(channel, d);
      break;
    case ContractionMode::general_singular:
      sweep.certificate = unsolvability_singular(channel, d);
      break;
    case ContractionMode::tight_pi_operator:
      sweep.certificate = unsolvability_condition(
          contraction_constant(channel, ContractionMode::tight_pi_operator), d, channel.pi());
      break;
  }
  if (sweep.certificate && sweep.certificate->decay_factor) {
    sweep.certified_factor = *sweep.certificate->decay_factor;
  }
  // Ratios against a numerically zero level would be quotient noise; skip them.
  constexpr double kNormFloor = 1e-14;
  for (int g = g_min; g <= g_max; ++g) {
    TreeSpec tree = build_complete_dary(d, g, channel);
    ExperimentRow row = exhaustive_stats(tree, mu, workers);
    if (!sweep.rows.empty() && sweep.rows.back().max_memory_norm > kNormFloor) {
      row.decay_ratio = row.max_memory_norm / sweep.rows.back().max_memory_norm;
    }
    sweep.rows.push_back(std::move(row));
  }
  return sweep;
}

MonteCarloResult monte_carlo_reconstruction(const TreeSpec& tree, const Vector& mu,
                                            std::int64_t n_samples, std::uint64_t seed,
                                            int workers) {
  if (n_samples < 1) {
    throw SOutOfRange("need at least one sample, got " + std::to_string(n_samples));
  }
  const auto ranges = partition_range(n_samples, workers);
  std::vector<std::int64_t> corrects(ranges.size(), 0);
  run_partitioned(ranges, [&](std::size_t w, std::int64_t begin, std::int64_t end) {
    std::int64_t correct = 0;
    for (std::int64_t i = begin; i < end; ++i) {
      const SampleResult sample = forward_sample(tree, mu, derive_seed(seed, i));
      const LikelihoodState state = prune(tree, sample.pattern);
      if (posterior(state, mu).map_state == sample.root_state) ++correct;
    }
    corrects[w] = correct;
  });

  MonteCarloResult result;
  result.n_samples = n_samples;
  for (std::int64_t c : corrects) result.correct += c;
  result.accuracy = static_cast<double>(result.correct) / static_cast<double>(n_samples);
  result.std_error = std::sqrt(result.accuracy * (1.0 - result.accuracy) /
                               static_cast<double>(n_samples));
  return result;
}

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows, int alphabet_size) {
  const auto pairs = state_pairs(alphabet_size);
  out << "# treecast report schema v1\n";
  out << "g,pattern_count,max_mem_norm,exp_mem_norm_pi,exp_mem_norm_mu";
  for (const auto& [i, j] : pairs) out << ",tv_" << i << "_" << j;
  out << ",decay_ratio,map_acc,map_se\n";
  for (const ExperimentRow& row : rows) {
    out << row.g << ',' << row.pattern_count << ',' << format_double(row.max_memory_norm) << ','
        << format_double(row.expected_memory_norm_pi) << ','
        << format_double(row.expected_memory_norm_mu);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      out << ',' << (k < row.tv_sums.size() ? format_double(row.tv_sums[k]) : "");
    }
    out << ',' << (row.decay_ratio ? format_double(*row.decay_ratio) : "");
    out << ',' << (row.map_accuracy ? format_double(*row.map_accuracy) : "");
    out << ',' << (row.map_se ? format_double(*row.map_se) : "");
    out << '\n';
  }
}

}  // namespace treecast
