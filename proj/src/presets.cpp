#include "mcts_bai/presets.hpp"

#include "mcts_bai/errors.hpp"

namespace mcts_bai {

namespace {

const std::string kFig2Tree = R"json({
  "kind": "max",
  "children": [
    {"kind": "min", "children": [{"mean": 0.45}, {"mean": 0.5}, {"mean": 0.55}]},
    {"kind": "min", "children": [{"mean": 0.35}, {"mean": 0.4}, {"mean": 0.6}]},
    {"kind": "min", "children": [{"mean": 0.3}, {"mean": 0.47}, {"mean": 0.52}]}
  ]
})json";

const std::string kTwoLeafTree = R"json({
  "kind": "max",
  "children": [{"mean": 0.5}, {"mean": 0.4}]
})json";

const std::string kFig3Tree = R"json({
  "kind": "max",
  "children": [
    {"kind": "min", "children": [
      {"kind": "max", "children": [{"mean": 0.87}, {"mean": 0.18}, {"mean": 0.49}]},
      {"kind": "max", "children": [{"mean": 0.84}, {"mean": 0.95}, {"mean": 0.74}]},
      {"kind": "max", "children": [{"mean": 0.86}, {"mean": 0.54}, {"mean": 0.27}]}
    ]},
    {"kind": "min", "children": [
      {"kind": "max", "children": [{"mean": 0.57}, {"mean": 0.17}, {"mean": 0.76}]},
      {"kind": "max", "children": [{"mean": 0.23}, {"mean": 0.99}, {"mean": 0.62}]},
      {"kind": "max", "children": [{"mean": 0.48}, {"mean": 0.95}, {"mean": 0.75}]}
    ]},
    {"kind": "min", "children": [
      {"kind": "max", "children": [{"mean": 0.53}, {"mean": 0.74}, {"mean": 0.36}]},
      {"kind": "max", "children": [{"mean": 0.21}, {"mean": 0.02}, {"mean": 0.38}]},
      {"kind": "max", "children": [{"mean": 0.48}, {"mean": 0.56}, {"mean": 0.46}]}
    ]}
  ]
})json";

}  // namespace

const std::string& fig2_tree_json() { return kFig2Tree; }
const std::string& fig3_tree_json() { return kFig3Tree; }
const std::string& twoleaf_tree_json() { return kTwoLeafTree; }

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig2", "fig3", "ensemble"};
    return names;
}

ExperimentSpec preset_spec(const std::string& name) {
    ExperimentSpec spec;
    if (name == "fig2") {
        spec.tree.label = "preset:fig2";
        spec.tree.inline_json = kFig2Tree;
        spec.algorithms = {Algorithm::LucbMcts, Algorithm::UgapeMcts, Algorithm::FindTopWinner,
                           Algorithm::MLucb};
        spec.epsilon = 0.0;
        spec.delta = 0.9;  // 0.1 per leaf, 9 leaves
        spec.rate = RateVariant::Experiments;
        spec.ci = CiFamily::KlBernoulli;
        spec.repetitions = 1000;
        spec.master_seed = 101;
        return spec;
    }
    if (name == "fig3") {
        spec.tree.label = "preset:fig3";
        spec.tree.inline_json = kFig3Tree;
        spec.algorithms = {Algorithm::LucbMcts, Algorithm::UgapeMcts, Algorithm::FindTopWinner};
        spec.epsilon = 0.0;
        spec.delta = 2.7;  // 0.1 per leaf, 27 leaves
        spec.rate = RateVariant::Experiments;
        spec.ci = CiFamily::KlBernoulli;
        spec.repetitions = 1000;
        spec.master_seed = 202;
        return spec;
    }
    if (name == "ensemble") {
        spec.tree.label = "random:b=10,depth=3";
        spec.tree.branching = 10;
        spec.tree.depth = 3;
        spec.algorithms = {Algorithm::LucbMcts, Algorithm::UgapeMcts, Algorithm::FindTopWinner};
        spec.epsilon = 0.01;
        spec.delta = 0.1;
        spec.rate = RateVariant::Theoretical;
        spec.ci = CiFamily::KlBernoulli;
        spec.repetitions = 100;
        spec.master_seed = 303;
        return spec;
    }
    throw DomainError("unknown preset: " + name + " (expected fig2, fig3 or ensemble)");
}

}  // namespace mcts_bai
