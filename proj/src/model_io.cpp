#include <string>

#include "json.hpp"
#include "topoboost/error.hpp"
#include "topoboost/gbdt.hpp"

namespace topoboost::gbdt {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json node_to_json(const RegressionTree& tree, int index) {
  const TreeNode& n = tree.nodes()[static_cast<std::size_t>(index)];
  if (n.is_leaf()) return json{{"leaf_value", n.leaf_value}};
  return json{{"feature", n.feature},
              {"bin_threshold", n.bin_threshold},
              {"left", node_to_json(tree, n.left)},
              {"right", node_to_json(tree, n.right)}};
}

// Loaded trees are stored in pre-order; only shape and values affect prediction.
int node_from_json(const json& j, std::vector<TreeNode>& nodes) {
  const int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("leaf_value")) {
    nodes[static_cast<std::size_t>(index)].leaf_value = j.at("leaf_value").get<double>();
    return index;
  }
  const int feature = j.at("feature").get<int>();
  if (feature < 0) throw Error(ErrorCode::ParseError, "negative feature index in model");
  const auto threshold = j.at("bin_threshold").get<std::uint32_t>();
  const int left = node_from_json(j.at("left"), nodes);
  const int right = node_from_json(j.at("right"), nodes);
  TreeNode& n = nodes[static_cast<std::size_t>(index)];
  n.feature = feature;
  n.bin_threshold = threshold;
  n.left = left;
  n.right = right;
  return index;
}

}  // namespace

std::string save_model(const BoostedEnsemble& model) {
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(node_to_json(t, 0));
  json doc{{"format_version", kFormatVersion},
           {"objective", model.objective.name()},
           {"num_class", model.objective.num_class()},
           {"base_scores", model.base_scores},
           {"learning_rate", model.learning_rate},
           {"num_features", model.num_features},
           {"bin_boundaries", model.bin_boundaries},
           {"trees", std::move(trees)}};
  return doc.dump(1) + "\n";
}

BoostedEnsemble load_model(const std::string& json_text) {
  try {
    const json doc = json::parse(json_text);
    if (doc.at("format_version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::ParseError, "unsupported model format_version");
    }
    BoostedEnsemble model;
    const auto objective = doc.at("objective").get<std::string>();
    const int num_class = doc.at("num_class").get<int>();
    if (objective == "binary") {
      model.objective = Objective::binary();
    } else if (objective == "multiclass") {
      model.objective = Objective::multiclass(num_class);
    } else {
      throw Error(ErrorCode::ParseError, "unknown objective '" + objective + "'");
    }
    model.base_scores = doc.at("base_scores").get<std::vector<double>>();
    model.learning_rate = doc.at("learning_rate").get<double>();
    model.num_features = doc.at("num_features").get<std::size_t>();
    model.bin_boundaries = doc.at("bin_boundaries").get<std::vector<std::vector<double>>>();
    if (model.base_scores.size() != static_cast<std::size_t>(model.objective.num_outputs()) ||
        model.bin_boundaries.size() != model.num_features) {
      throw Error(ErrorCode::ParseError, "model document is inconsistent");
    }
    for (const auto& t : doc.at("trees")) {
      std::vector<TreeNode> nodes;
      node_from_json(t, nodes);
      for (const auto& n : nodes) {
        if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= model.num_features) {
          throw Error(ErrorCode::ParseError, "tree references a missing feature");
        }
      }
      model.trees.emplace_back(std::move(nodes));
    }
    if (model.trees.size() % static_cast<std::size_t>(model.objective.num_outputs()) != 0) {
      throw Error(ErrorCode::ParseError, "tree count is not a multiple of the output count");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed model: ") + e.what());
  }
}

}  // namespace topoboost::gbdt
