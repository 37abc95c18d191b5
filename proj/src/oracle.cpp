#include "mcts_bai/oracle.hpp"

namespace mcts_bai {

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t repetition,
                                 std::uint64_t stream) {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ repetition);
    h = mix64(h ^ stream);
    return h;
}

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t repetition,
                            std::uint64_t stream) {
    return std::mt19937_64(derive_stream_seed(master_seed, repetition, stream));
}

LeafOracle::LeafOracle(const GameTree& tree, std::uint64_t master_seed, std::uint64_t repetition)
    : tree_(&tree) {
    engines_.reserve(tree.leaf_count());
    for (std::size_t rank = 0; rank < tree.leaf_count(); ++rank) {
        engines_.push_back(make_stream(master_seed, repetition, rank));
    }
}

double LeafOracle::draw(NodeId leaf) {
    const Node& node = tree_->node(leaf);
    if (node.kind != NodeKind::Leaf) {
        throw NotALeafError("draw called on internal node " + std::to_string(leaf));
    }
    ++total_draws_;
    const double u = canonical_uniform(engines_[static_cast<std::size_t>(node.leaf_index)]);
    return u < node.mean ? 1.0 : 0.0;
}

}  // namespace mcts_bai
