#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <treecast/certifier.hpp>
#include <treecast/channel.hpp>
#include <treecast/errors.hpp>
#include <treecast/experiments.hpp>
#include <treecast/json_io.hpp>
#include <treecast/pruning.hpp>
#include <treecast/tree.hpp>

namespace {

using namespace treecast;

ContractionMode parse_mode(const std::string& mode) {
  if (mode == "theta1") return ContractionMode::reversible_eig;
  if (mode == "sigma1") return ContractionMode::general_singular;
  return ContractionMode::tight_pi_operator;
}

std::pair<int, int> parse_g_range(const std::string& text) {
  try {
    const auto pos = text.find("..");
    if (pos == std::string::npos) {
      const int g = std::stoi(text);
      return {g, g};
    }
    return {std::stoi(text.substr(0, pos)), std::stoi(text.substr(pos + 2))};
  } catch (const std::exception&) {
    throw MalformedSpec("cannot parse depth range '" + text + "' (expected e.g. 1..4)");
  }
}

void emit_csv(const std::string& path, const std::vector<ExperimentRow>& rows, int alphabet) {
  if (path.empty() || path == "-") {
    write_csv(std::cout, rows, alphabet);
    return;
  }
  std::ofstream out(path);
  if (!out) throw MalformedSpec("cannot write " + path);
  write_csv(out, rows, alphabet);
}

BoundCertificate make_certificate(const Channel& channel, int d, const std::string& mode_name,
                                  bool expectation, double epsilon) {
  const ContractionMode mode = parse_mode(mode_name);
  if (expectation) {
    const double c = contraction_constant(channel, mode);
    return epsilon > 0.0 ? unsolvability_expectation(c, d, channel.pi(), epsilon)
                         : unsolvability_expectation(c, d, channel.pi());
  }
  switch (mode) {
    case ContractionMode::reversible_eig:
      return epsilon > 0.0 ? unsolvability_reversible(channel, d, epsilon)
                           : unsolvability_reversible(channel, d);
    case ContractionMode::general_singular:
      return epsilon > 0.0 ? unsolvability_singular(channel, d, epsilon)
                           : unsolvability_singular(channel, d);
    case ContractionMode::tight_pi_operator:
    default: {
      const double c = contraction_constant(channel, ContractionMode::tight_pi_operator);
      return epsilon > 0.0 ? unsolvability_condition(c, d, channel.pi(), epsilon)
                           : unsolvability_condition(c, d, channel.pi());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Broadcasting-on-trees likelihood toolkit"};
  app.require_subcommand(1);

  std::string analyze_path;
  CLI::App* analyze = app.add_subcommand("analyze", "Validate a channel and report its spectrum");
  analyze->add_option("channel", analyze_path, "Channel JSON file ({\"matrix\": [[...]]})")
      ->required();

  std::string prune_tree, prune_pattern, prune_prior = "uniform";
  CLI::App* prune_cmd =
      app.add_subcommand("prune", "Likelihood, posterior, and MAP for one observed pattern");
  prune_cmd->add_option("tree", prune_tree, "Tree JSON file")->required();
  prune_cmd->add_option("--pattern", prune_pattern, "Leaf states in leaf order, e.g. 01302002")
      ->required();
  prune_cmd->add_option("--prior", prune_prior, "uniform | pi | JSON file");

  std::string certify_path, certify_mode = "theta1";
  int certify_d = 0;
  bool certify_expectation = false;
  double certify_epsilon = -1.0;
  CLI::App* certify =
      app.add_subcommand("certify", "Check the unsolvability threshold for a channel and arity");
  certify->add_option("channel", certify_path, "Channel JSON file")->required();
  certify->add_option("--d", certify_d, "Children per node")->required()
      ->check(CLI::PositiveNumber);
  certify->add_option("--mode", certify_mode, "Contraction constant: theta1 | sigma1 | tight")
      ->check(CLI::IsMember({"theta1", "sigma1", "tight"}));
  certify->add_flag("--expectation", certify_expectation,
                    "Check the in-expectation condition instead of the patternwise one");
  certify->add_option("--epsilon", certify_epsilon,
                      "Override the default epsilon (1/2 patternwise, 2 expectation)");

  std::string enum_tree, enum_prior = "uniform", enum_out;
  int enum_workers = 1;
  CLI::App* enumerate_cmd =
      app.add_subcommand("enumerate", "Exhaustive pattern statistics for a tree, as CSV");
  enumerate_cmd->add_option("tree", enum_tree, "Tree JSON file")->required();
  enumerate_cmd->add_option("--prior", enum_prior, "uniform | pi | JSON file");
  enumerate_cmd->add_option("--out", enum_out, "Output CSV path (default stdout)");
  enumerate_cmd->add_option("--workers", enum_workers, "Worker threads")
      ->check(CLI::PositiveNumber);

  std::string sweep_channel, sweep_g = "1..4", sweep_mode = "theta1", sweep_prior = "uniform",
              sweep_out;
  int sweep_d = 0, sweep_workers = 1;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Exhaustive depth sweep over complete d-ary trees, as CSV");
  sweep_cmd->add_option("--channel", sweep_channel, "Channel JSON file")->required();
  sweep_cmd->add_option("--d", sweep_d, "Children per node")->required()
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--g", sweep_g, "Depth range, e.g. 1..4");
  sweep_cmd->add_option("--mode", sweep_mode, "Contraction constant: theta1 | sigma1 | tight")
      ->check(CLI::IsMember({"theta1", "sigma1", "tight"}));
  sweep_cmd->add_option("--prior", sweep_prior, "uniform | pi | JSON file");
  sweep_cmd->add_option("--out", sweep_out, "Output CSV path (default stdout)");
  sweep_cmd->add_option("--workers", sweep_workers, "Worker threads")->check(CLI::PositiveNumber);

  std::string sim_tree, sim_channel, sim_prior = "uniform";
  int sim_d = 2, sim_g = 3, sim_workers = 1;
  std::int64_t sim_samples = 0;
  std::uint64_t sim_seed = 1;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo root reconstruction accuracy");
  simulate->add_option("--tree", sim_tree, "Tree JSON file");
  simulate->add_option("--channel", sim_channel, "Channel JSON file (with --d/--g)");
  simulate->add_option("--d", sim_d, "Children per node (with --channel)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--g", sim_g, "Tree depth (with --channel)")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--samples", sim_samples, "Number of samples")->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Master seed");
  simulate->add_option("--prior", sim_prior, "uniform | pi | JSON file");
  simulate->add_option("--workers", sim_workers, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*analyze) {
      std::cout << channel_report(load_channel(analyze_path)).dump(2) << "\n";
    } else if (*prune_cmd) {
      TreeSpec tree = load_tree(prune_tree);
      const Pattern pattern = Pattern::from_string(prune_pattern, tree.alphabet_size());
      const LikelihoodState state = prune(tree, pattern);
      const Vector mu = prior_from_arg(prune_prior, tree.pi());
      std::cout << likelihood_report(state, posterior(state, mu), tree.pi()).dump(2) << "\n";
    } else if (*certify) {
      const Channel channel = load_channel(certify_path);
      const BoundCertificate cert =
          make_certificate(channel, certify_d, certify_mode, certify_expectation, certify_epsilon);
      std::cout << certificate_report(cert).dump(2) << "\n";
      return cert.satisfied ? 0 : 2;
    } else if (*enumerate_cmd) {
      TreeSpec tree = load_tree(enum_tree);
      const Vector mu = prior_from_arg(enum_prior, tree.pi());
      emit_csv(enum_out, {exhaustive_stats(tree, mu, enum_workers)}, tree.alphabet_size());
    } else if (*sweep_cmd) {
      const Channel channel = load_channel(sweep_channel);
      const auto [g_min, g_max] = parse_g_range(sweep_g);
      const Vector mu = prior_from_arg(sweep_prior, channel.pi());
      const DecaySweep sweep = decay_sweep(channel, sweep_d, g_min, g_max,
                                           parse_mode(sweep_mode), mu, sweep_workers);
      emit_csv(sweep_out, sweep.rows, channel.size());
    } else if (*simulate) {
      if (sim_tree.empty() == sim_channel.empty()) {
        throw MalformedSpec("simulate needs exactly one of --tree or --channel");
      }
      TreeSpec tree = sim_tree.empty()
                          ? build_complete_dary(sim_d, sim_g, load_channel(sim_channel))
                          : load_tree(sim_tree);
      const Vector mu = prior_from_arg(sim_prior, tree.pi());
      const MonteCarloResult result =
          monte_carlo_reconstruction(tree, mu, sim_samples, sim_seed, sim_workers);
      std::cout << monte_carlo_report(result, sim_seed).dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
