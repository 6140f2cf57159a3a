#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "treecast/certifier.hpp"
#include "treecast/channel.hpp"
#include "treecast/experiments.hpp"
#include "treecast/pruning.hpp"
#include "treecast/tree.hpp"

namespace treecast {

using Json = nlohmann::json;

// [[...], ...] row-major with numeric entries; rows must align.
Matrix matrix_from_json(const Json& rows);

// Channel file {"matrix": [[...], ...]}. Noiseless doubly stochastic matrices
// are admitted with the uniform equilibrium (lenient_channel).
Channel load_channel(const std::string& path);

// Tree file {"channels": {name: matrix}, "root": id,
// "edges": [[parent, child, channelName], ...]}; ids may be strings or
// integers.
TreeDocument parse_tree_document(const Json& doc);
TreeDocument load_tree_document(const std::string& path);
TreeSpec load_tree(const std::string& path, const TreeLimits& limits = {});

// "uniform", "pi", or a path to a JSON array (bare or under a "prior" key).
Vector prior_from_arg(const std::string& arg, const Vector& pi);

Json channel_report(const Channel& channel);
Json likelihood_report(const LikelihoodState& state, const Posterior& post, const Vector& pi);
Json certificate_report(const BoundCertificate& certificate);
// Same field names as the CSV columns, one object per row.
Json rows_report(const std::vector<ExperimentRow>& rows, int alphabet_size);
Json monte_carlo_report(const MonteCarloResult& result, std::uint64_t seed);

}  // namespace treecast
