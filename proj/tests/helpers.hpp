#pragma once

#include <random>
#include <string>
#include <vector>

#include "mcts_bai/tree.hpp"

namespace test_helpers {

using namespace mcts_bai;

/// Depth-one max tree over the given leaf means.
inline GameTree depth_one(const std::vector<double>& means) {
    GameTree::Builder builder;
    const NodeId root = builder.add_internal(NodeKind::Max, kNoNode);
    for (double mean : means) {
        builder.add_leaf(mean, root);
    }
    return builder.build();
}

/// Depth-two max-of-mins tree from a row-major mean matrix.
inline GameTree depth_two(const std::vector<std::vector<double>>& rows) {
    GameTree::Builder builder;
    const NodeId root = builder.add_internal(NodeKind::Max, kNoNode);
    for (const auto& row : rows) {
        const NodeId mid = builder.add_internal(NodeKind::Min, root);
        for (double mean : row) {
            builder.add_leaf(mean, mid);
        }
    }
    return builder.build();
}

/// Random tree with mixed arity (2..max_branching) and alternating kinds,
/// driven by a plain engine independent of the library's stream derivation.
inline GameTree random_tree(std::mt19937_64& engine, int depth, int max_branching) {
    GameTree::Builder builder;
    std::uniform_int_distribution<int> arity(2, max_branching);
    std::uniform_real_distribution<double> mean(0.0, 1.0);
    struct Frame {
        NodeId id;
        int level;
    };
    std::vector<Frame> stack;
    const NodeId root = builder.add_internal(NodeKind::Max, kNoNode);
    stack.push_back({root, 0});
    while (!stack.empty()) {
        const Frame frame = stack.back();
        stack.pop_back();
        const int kids = arity(engine);
        for (int i = 0; i < kids; ++i) {
            if (frame.level + 1 == depth) {
                builder.add_leaf(mean(engine), frame.id);
            } else {
                const NodeKind kind = frame.level % 2 == 0 ? NodeKind::Min : NodeKind::Max;
                stack.push_back({builder.add_internal(kind, frame.id), frame.level + 1});
            }
        }
    }
    return builder.build();
}

/// Independent recursive minimax evaluation.
inline double brute_force_value(const GameTree& tree, NodeId id) {
    const Node& node = tree.node(id);
    if (node.kind == NodeKind::Leaf) {
        return node.mean;
    }
    double value = brute_force_value(tree, node.children.front());
    for (std::size_t i = 1; i < node.children.size(); ++i) {
        const double child = brute_force_value(tree, node.children[i]);
        value = node.kind == NodeKind::Max ? std::max(value, child) : std::min(value, child);
    }
    return value;
}

}  // namespace test_helpers
