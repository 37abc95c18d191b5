#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mcts_bai/errors.hpp"

namespace mcts_bai {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Tolerance under which two node values are treated as tied.
inline constexpr double kTieTolerance = 1e-12;

enum class NodeKind : std::uint8_t { Max, Min, Leaf };

struct Node {
    NodeKind kind = NodeKind::Leaf;
    double mean = 0.0;  ///< Bernoulli mean, leaves only.
    NodeId parent = kNoNode;
    std::int32_t depth = 0;
    std::int32_t leaf_index = -1;  ///< Depth-first leaf rank, -1 for internal nodes.
    std::vector<NodeId> children;
};

/// Immutable game tree over Bernoulli leaves. The root is always a max node;
/// max and min nodes may otherwise be mixed freely. Leaves are numbered in
/// depth-first order, which is also the order used by samplers and reports.
class GameTree {
public:
    /// Parses the canonical JSON form: internal nodes are
    /// {"kind": "max"|"min", "children": [...]}, leaves are {"mean": m}.
    static GameTree from_json(const std::string& text);
    static GameTree load_file(const std::string& path);

    NodeId root() const { return 0; }
    const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t leaf_count() const { return leaves_.size(); }
    const std::vector<NodeId>& leaves() const { return leaves_; }
    NodeId leaf(std::int32_t leaf_index) const {
        return leaves_[static_cast<std::size_t>(leaf_index)];
    }
    bool is_leaf(NodeId id) const { return node(id).kind == NodeKind::Leaf; }
    /// Depth of the deepest leaf (root has depth 0).
    int depth() const { return depth_; }

    std::string to_json(int indent = -1) const;

    class Builder {
    public:
        /// Adds an internal node and returns its id. Pass kNoNode for the root.
        NodeId add_internal(NodeKind kind, NodeId parent);
        NodeId add_leaf(double mean, NodeId parent);
        /// Validates (root is max, internal nodes not childless, means in
        /// range) and freezes the tree. Throws TreeError on violation.
        GameTree build();

    private:
        std::vector<Node> nodes_;
    };

private:
    GameTree() = default;
    std::vector<Node> nodes_;
    std::vector<NodeId> leaves_;
    int depth_ = 0;
};

/// Exact minimax evaluation plus the gap quantities driving sample
/// complexity.
struct TreeAnalysis {
    std::vector<double> values;  ///< Minimax value per node id.
    NodeId best_action = kNoNode;
    NodeId second_best_action = kNoNode;  ///< kNoNode when the root has one child.
    /// V(best) - V(second best); +infinity when the root has a single child.
    double root_gap = std::numeric_limits<double>::infinity();
    /// True when the top two depth-one values are within kTieTolerance.
    bool ambiguous_best = false;
    /// Per leaf rank: largest |V(s) - V(parent(s))| over the nodes s on the
    /// path from the depth-one ancestor down to the leaf itself.
    std::vector<double> leaf_gaps;
    /// Same maximum but skipping the depth-one step, i.e. over nodes at
    /// depth >= 2 only. Zero for leaves at depth one.
    std::vector<double> leaf_gaps_below_top;
};

TreeAnalysis evaluate_tree(const GameTree& tree);

enum class GapVariant { Standard, BelowTop };

/// Sum over leaves of 1 / max(gap^2, root_gap^2, epsilon^2). Throws
/// InfiniteComplexityError when some leaf has a zero denominator.
double complexity_term(const GameTree& tree, const TreeAnalysis& analysis, double epsilon,
                       GapVariant variant = GapVariant::Standard);

}  // namespace mcts_bai
