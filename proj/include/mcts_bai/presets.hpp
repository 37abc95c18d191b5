#pragma once

#include <string>
#include <vector>

#include "mcts_bai/harness.hpp"

namespace mcts_bai {

/// Embedded copies of the benchmark trees (identical to the files under
/// data/), so presets work from any directory.
const std::string& fig2_tree_json();
const std::string& fig3_tree_json();
const std::string& twoleaf_tree_json();

const std::vector<std::string>& preset_names();  // fig2, fig3, ensemble

/// Canned experiment specs reproducing the three benchmark experiments at
/// desk scale (1000 repetitions for the fixed trees, 100 random instances
/// for the ensemble). Throws DomainError for unknown names.
ExperimentSpec preset_spec(const std::string& name);

}  // namespace mcts_bai
