#include "mcts_bai/tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mcts_bai {

namespace {

using nlohmann::json;

void check_mean(double mean, const std::string& where) {
    if (!std::isfinite(mean) || mean < 0.0 || mean > 1.0) {
        std::ostringstream msg;
        msg << "leaf mean " << mean << " outside [0, 1] at " << where;
        throw TreeError(msg.str());
    }
}

NodeId parse_node(const json& value, NodeId parent, GameTree::Builder& builder,
                  const std::string& where) {
    if (!value.is_object()) throw TreeError("expected an object at " + where);
    const bool has_mean = value.contains("mean");
    const bool has_children = value.contains("children");
    if (has_mean == has_children) {
        throw TreeError("node at " + where + " must have exactly one of \"mean\" or \"children\"");
    }
    if (has_mean) {
        if (!value["mean"].is_number()) throw TreeError("non-numeric mean at " + where);
        const double mean = value["mean"].get<double>();
        check_mean(mean, where);
        return builder.add_leaf(mean, parent);
    }
    if (!value.contains("kind") || !value["kind"].is_string()) {
        throw TreeError("internal node at " + where + " needs a \"kind\" string");
    }
    const std::string kind = value["kind"].get<std::string>();
    NodeKind node_kind;
    if (kind == "max") {
        node_kind = NodeKind::Max;
    } else if (kind == "min") {
        node_kind = NodeKind::Min;
    } else {
        throw TreeError("unknown node kind \"" + kind + "\" at " + where);
    }
    const json& children = value["children"];
    if (!children.is_array() || children.empty()) {
        throw TreeError("internal node at " + where + " needs a non-empty children array");
    }
    const NodeId id = builder.add_internal(node_kind, parent);
    for (std::size_t i = 0; i < children.size(); ++i) {
        parse_node(children[i], id, builder, where + ".children[" + std::to_string(i) + "]");
    }
    return id;
}

void emit_node(const GameTree& tree, NodeId id, json& out) {
    const Node& node = tree.node(id);
    if (node.kind == NodeKind::Leaf) {
        out["mean"] = node.mean;
        return;
    }
    out["kind"] = node.kind == NodeKind::Max ? "max" : "min";
    json children = json::array();
    for (NodeId child : node.children) {
        json child_json;
        emit_node(tree, child, child_json);
        children.push_back(std::move(child_json));
    }
    out["children"] = std::move(children);
}

}  // namespace

NodeId GameTree::Builder::add_internal(NodeKind kind, NodeId parent) {
    if (kind == NodeKind::Leaf) throw TreeError("add_internal called with a leaf kind");
    Node node;
    node.kind = kind;
    node.parent = parent;
    node.depth = parent == kNoNode ? 0 : nodes_[static_cast<std::size_t>(parent)].depth + 1;
    const NodeId id = static_cast<NodeId>(nodes_.size());
    if (parent != kNoNode) nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
    nodes_.push_back(std::move(node));
    return id;
}

NodeId GameTree::Builder::add_leaf(double mean, NodeId parent) {
    check_mean(mean, "builder leaf");
    Node node;
    node.kind = NodeKind::Leaf;
    node.mean = mean;
    node.parent = parent;
    node.depth = parent == kNoNode ? 0 : nodes_[static_cast<std::size_t>(parent)].depth + 1;
    const NodeId id = static_cast<NodeId>(nodes_.size());
    if (parent != kNoNode) nodes_[static_cast<std::size_t>(parent)].children.push_back(id);
    nodes_.push_back(std::move(node));
    return id;
}

GameTree GameTree::Builder::build() {
    if (nodes_.empty()) throw TreeError("empty tree");
    if (nodes_[0].kind != NodeKind::Max) throw TreeError("root must be a max node");
    GameTree tree;
    tree.nodes_ = std::move(nodes_);
    nodes_.clear();
    for (std::size_t id = 0; id < tree.nodes_.size(); ++id) {
        Node& node = tree.nodes_[id];
        if (node.kind == NodeKind::Leaf) {
            node.leaf_index = static_cast<std::int32_t>(tree.leaves_.size());
            tree.leaves_.push_back(static_cast<NodeId>(id));
            tree.depth_ = std::max(tree.depth_, static_cast<int>(node.depth));
        } else if (node.children.empty()) {
            throw TreeError("internal node without children");
        }
    }
    return tree;
}

GameTree GameTree::from_json(const std::string& text) {
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error& err) {
        throw TreeError(std::string("tree JSON parse error: ") + err.what());
    }
    Builder builder;
    const NodeId root = parse_node(value, kNoNode, builder, "$");
    if (root != 0) throw TreeError("root was not the first node");
    GameTree tree = builder.build();
    return tree;
}

GameTree GameTree::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TreeError("cannot open tree file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

std::string GameTree::to_json(int indent) const {
    json out;
    emit_node(*this, root(), out);
    return out.dump(indent);
}

TreeAnalysis evaluate_tree(const GameTree& tree) {
    TreeAnalysis analysis;
    analysis.values.assign(tree.node_count(), 0.0);
    analysis.leaf_gaps.assign(tree.leaf_count(), 0.0);
    analysis.leaf_gaps_below_top.assign(tree.leaf_count(), 0.0);

    // Values bottom-up; node ids are in pre-order so children follow parents.
    for (std::size_t i = tree.node_count(); i-- > 0;) {
        const NodeId id = static_cast<NodeId>(i);
        const Node& node = tree.node(id);
        if (node.kind == NodeKind::Leaf) {
            analysis.values[i] = node.mean;
            continue;
        }
        double value = analysis.values[static_cast<std::size_t>(node.children[0])];
        for (std::size_t c = 1; c < node.children.size(); ++c) {
            const double child = analysis.values[static_cast<std::size_t>(node.children[c])];
            value = node.kind == NodeKind::Max ? std::max(value, child) : std::min(value, child);
        }
        analysis.values[i] = value;
    }

    // Gap maxima top-down: for each node below the root, the deviation from
    // its parent joins the running maximum along the path.
    std::vector<double> running_gap(tree.node_count(), 0.0);
    std::vector<double> running_gap_below_top(tree.node_count(), 0.0);
    for (std::size_t i = 1; i < tree.node_count(); ++i) {
        const Node& node = tree.node(static_cast<NodeId>(i));
        const std::size_t parent = static_cast<std::size_t>(node.parent);
        const double step = std::abs(analysis.values[i] - analysis.values[parent]);
        running_gap[i] = std::max(running_gap[parent], step);
        running_gap_below_top[i] =
            node.depth >= 2 ? std::max(running_gap_below_top[parent], step) : 0.0;
        if (node.kind == NodeKind::Leaf) {
            const std::size_t rank = static_cast<std::size_t>(node.leaf_index);
            analysis.leaf_gaps[rank] = running_gap[i];
            analysis.leaf_gaps_below_top[rank] = running_gap_below_top[i];
        }
    }

    // Best and second-best depth-one actions, ties to the lowest index.
    const Node& root = tree.node(tree.root());
    for (NodeId child : root.children) {
        const double value = analysis.values[static_cast<std::size_t>(child)];
        if (analysis.best_action == kNoNode ||
            value > analysis.values[static_cast<std::size_t>(analysis.best_action)]) {
            analysis.second_best_action = analysis.best_action;
            analysis.best_action = child;
        } else if (analysis.second_best_action == kNoNode ||
                   value > analysis.values[static_cast<std::size_t>(analysis.second_best_action)]) {
            analysis.second_best_action = child;
        }
    }
    if (analysis.second_best_action != kNoNode) {
        analysis.root_gap =
            analysis.values[static_cast<std::size_t>(analysis.best_action)] -
            analysis.values[static_cast<std::size_t>(analysis.second_best_action)];
        analysis.ambiguous_best = analysis.root_gap <= kTieTolerance;
    }
    return analysis;
}

double complexity_term(const GameTree& tree, const TreeAnalysis& analysis, double epsilon,
                       GapVariant variant) {
    const std::vector<double>& gaps =
        variant == GapVariant::Standard ? analysis.leaf_gaps : analysis.leaf_gaps_below_top;
    double sum = 0.0;
    for (std::size_t rank = 0; rank < tree.leaf_count(); ++rank) {
        const double dominant = std::max({gaps[rank], analysis.root_gap, epsilon});
        if (dominant == 0.0) {
            throw InfiniteComplexityError(
                "complexity term diverges: leaf " + std::to_string(rank) +
                " has zero gap, zero root gap and epsilon = 0");
        }
        if (std::isinf(dominant)) continue;
        sum += 1.0 / (dominant * dominant);
    }
    return sum;
}

}  // namespace mcts_bai
