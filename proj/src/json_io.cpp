#include "treecast/json_io.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include "treecast/errors.hpp"
#include "treecast/info_measures.hpp"

namespace treecast {
namespace {

Json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw MalformedSpec("cannot open " + path);
  }
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw MalformedSpec(path + ": " + e.what());
  }
}

std::string node_name(const Json& value, const std::string& where) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
  throw MalformedSpec(where + " must be a string or integer node id, got " + value.dump());
}

Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vector vector_from_json(const Json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty()) {
    throw MalformedSpec(where + " must be a nonempty array of numbers");
  }
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw MalformedSpec(where + " must contain only numbers, got " + arr[i].dump());
    }
    v(static_cast<int>(i)) = arr[i].get<double>();
  }
  return v;
}

Json assertion_to_json(const Assertion& a) {
  return Json{{"name", a.name},
              {"lhs", a.lhs},
              {"rhs", a.rhs},
              {"holds", a.holds},
              {"boundary", a.boundary}};
}

}  // namespace

Matrix matrix_from_json(const Json& rows) {
  if (!rows.is_array() || rows.empty()) {
    throw MalformedSpec("matrix must be a nonempty array of rows");
  }
  const std::size_t n = rows.size();
  Matrix m(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Json& row = rows[i];
    if (!row.is_array()) {
      throw MalformedSpec("matrix row " + std::to_string(i) + " is not an array");
    }
    if (i == 0) {
      m.resize(n, row.size());
    } else if (row.size() != static_cast<std::size_t>(m.cols())) {
      throw MalformedSpec("matrix row " + std::to_string(i) + " has " +
                          std::to_string(row.size()) + " entries, expected " +
                          std::to_string(m.cols()));
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (!row[j].is_number()) {
        throw MalformedSpec("matrix entry (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") is not a number: " + row[j].dump());
      }
      m(static_cast<int>(i), static_cast<int>(j)) = row[j].get<double>();
    }
  }
  return m;
}

Channel load_channel(const std::string& path) {
  const Json doc = parse_file(path);
  if (!doc.is_object() || !doc.contains("matrix")) {
    throw MalformedSpec(path + ": expected an object with a \"matrix\" field");
  }
  return lenient_channel(matrix_from_json(doc["matrix"]));
}

TreeDocument parse_tree_document(const Json& doc) {
  if (!doc.is_object()) {
    throw MalformedSpec("tree document must be a JSON object");
  }
  if (!doc.contains("channels") || !doc["channels"].is_object()) {
    throw MalformedSpec("tree document needs a \"channels\" object");
  }
  if (!doc.contains("root")) {
    throw MalformedSpec("tree document needs a \"root\" node id");
  }
  TreeDocument out;
  for (const auto& [name, matrix] : doc["channels"].items()) {
    out.channels[name] = matrix_from_json(matrix);
  }
  out.root = node_name(doc["root"], "root");
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) {
      throw MalformedSpec("\"edges\" must be an array of [parent, child, channel] triples");
    }
    for (const Json& edge : doc["edges"]) {
      if (!edge.is_array() || edge.size() != 3 || !edge[2].is_string()) {
        throw MalformedSpec("edge must be [parent, child, channelName], got " + edge.dump());
      }
      out.edges.push_back({node_name(edge[0], "edge parent"), node_name(edge[1], "edge child"),
                           edge[2].get<std::string>()});
    }
  }
  return out;
}

TreeDocument load_tree_document(const std::string& path) {
  return parse_tree_document(parse_file(path));
}

TreeSpec load_tree(const std::string& path, const TreeLimits& limits) {
  return build_from_spec(load_tree_document(path), limits);
}

Vector prior_from_arg(const std::string& arg, const Vector& pi) {
  if (arg == "uniform") {
    return Vector::Constant(pi.size(), 1.0 / static_cast<double>(pi.size()));
  }
  if (arg == "pi") {
    return pi;
  }
  const Json doc = parse_file(arg);
  if (doc.is_object() && doc.contains("prior")) {
    return vector_from_json(doc["prior"], arg + ": prior");
  }
  return vector_from_json(doc, arg + ": prior");
}

Json channel_report(const Channel& channel) {
  const SpectralProfile& profile = channel.profile();
  Json report{{"size", channel.size()},
              {"pi", vector_to_json(channel.pi())},
              {"min_pi", channel.min_pi()},
              {"reversible", channel.reversible()},
              {"primitive", channel.primitive()},
              {"sigma1", profile.sigma1},
              {"contraction_constants",
               Json{{"general_singular", profile.c_general}, {"tight", profile.c_tight}}}};
  if (profile.theta1_abs) {
    report["theta1_abs"] = *profile.theta1_abs;
    report["contraction_constants"]["theta1"] = *profile.theta1_abs;
    report["eigenvalues"] = vector_to_json(profile.eigenvalues);
  }
  return report;
}

Json likelihood_report(const LikelihoodState& state, const Posterior& post, const Vector& pi) {
  return Json{{"rho_tilde", vector_to_json(state.rho_tilde)},
              {"memory_norm_pi", pi_norm(state.memory, pi)},
              {"log_pr_pi", state.log_pr_pi},
              {"pr_pi", std::exp(state.log_pr_pi)},
              {"prior", vector_to_json(post.mu)},
              {"posterior", vector_to_json(post.r)},
              {"map_state", post.map_state},
              {"map_prob", post.map_prob}};
}

Json certificate_report(const BoundCertificate& certificate) {
  Json report{{"condition_id", certificate.condition_id},
              {"constants", certificate.constants},
              {"arity", certificate.arity},
              {"min_pi", certificate.min_pi},
              {"epsilon", certificate.epsilon_used},
              {"threshold_lhs", certificate.threshold_lhs},
              {"threshold_rhs", certificate.threshold_rhs},
              {"strict_threshold", certificate.strict_threshold},
              {"satisfied", certificate.satisfied},
              {"boundary", certificate.boundary},
              {"assertions", Json::array()}};
  report["decay_factor"] =
      certificate.decay_factor ? Json(*certificate.decay_factor) : Json(nullptr);
  for (const Assertion& a : certificate.assertions) {
    report["assertions"].push_back(assertion_to_json(a));
  }
  return report;
}

Json rows_report(const std::vector<ExperimentRow>& rows, int alphabet_size) {
  const auto pairs = state_pairs(alphabet_size);
  Json out{{"schema", "treecast report schema v1"}, {"rows", Json::array()}};
  for (const ExperimentRow& row : rows) {
    Json r{{"g", row.g},
           {"pattern_count", row.pattern_count},
           {"max_mem_norm", row.max_memory_norm},
           {"exp_mem_norm_pi", row.expected_memory_norm_pi},
           {"exp_mem_norm_mu", row.expected_memory_norm_mu}};
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const std::string key =
          "tv_" + std::to_string(pairs[k].first) + "_" + std::to_string(pairs[k].second);
      r[key] = k < row.tv_sums.size() ? Json(row.tv_sums[k]) : Json(nullptr);
    }
    r["decay_ratio"] = row.decay_ratio ? Json(*row.decay_ratio) : Json(nullptr);
    r["map_acc"] = row.map_accuracy ? Json(*row.map_accuracy) : Json(nullptr);
    r["map_se"] = row.map_se ? Json(*row.map_se) : Json(nullptr);
    out["rows"].push_back(std::move(r));
  }
  return out;
}

Json monte_carlo_report(const MonteCarloResult& result, std::uint64_t seed) {
  return Json{{"samples", result.n_samples},
              {"seed", seed},
              {"correct", result.correct},
              {"map_acc", result.accuracy},
              {"map_se", result.std_error}};
}

}  // namespace treecast
