#pragma once

#include "qforge/evaluate.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace qf {

enum class SearchMethod { RandomSearch, DerivativeFreeLocal };

struct SearchConfig {
    SearchMethod method = SearchMethod::DerivativeFreeLocal;
    int max_evals = 1000;
    std::uint64_t seed = 0;
    Eigen::VectorXd initial_point;  // optional; sampled when empty
    int restarts = 1;
};

/// A parametric gate-set ansatz with packed parameter bounds. R1/R2 members
/// freeze with freeze_seed once per discovery run and are never re-sampled
/// during the search.
struct GateSetTemplate {
    std::vector<GateSpec> specs;
    Eigen::VectorXd lo, hi;
    std::uint64_t freeze_seed = 0;
    std::string label;
};

GateSetTemplate make_template(const std::vector<GateSpec>& specs, std::uint64_t freeze_seed,
                              const std::string& label);
GateSet instantiate_template(const GateSetTemplate& t, const Eigen::VectorXd& params);

/// Instantiates GS2 from params (clipped to bounds), evaluates it on ds, and
/// returns the Eq.-style score against the pre-computed GS1 report.
/// Evaluation failures yield -inf.
double discovery_objective(const Eigen::VectorXd& params, const GateSetTemplate& ansatz,
                           const EvaluationReport& gs1_report, const Dataset& ds,
                           const CostWeights& weights, const EvalConfig& cfg);

struct DiscoveryReport {
    Eigen::VectorXd best_params;
    double best_score = 0;
    GateSet best_gateset;
    std::vector<std::pair<int, double>> trajectory;  // (eval index, score)
    ComparisonReport final_comparison;
};

DiscoveryReport discover_gateset(const std::vector<GateSpec>& ansatz, const GateSet& gs1,
                                 const Dataset& ds, const CostWeights& weights,
                                 const EvalConfig& eval_cfg, const SearchConfig& search_cfg);

}  // namespace qf
