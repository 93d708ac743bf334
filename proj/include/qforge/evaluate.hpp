#pragma once

#include "qforge/datasets.hpp"
#include "qforge/decomp.hpp"

#include <string>
#include <vector>

namespace qf {

struct EvalConfig {
    PipelineConfig pipeline;
    FidelityKind fidelity = FidelityKind::Process;
    std::uint64_t seed = 0;  // per-point decomposition seeds derive from this
    int threads = 1;
    bool keep_circuits = false;
};

struct EvaluationReport {
    std::string gateset_label;
    std::vector<double> pf;
    std::vector<int> cd;
    double pf_mean = 0, pf_std = 0, cd_mean = 0, cd_std = 0;
    std::vector<DecompositionResult> circuits;  // only when keep_circuits
    std::vector<std::string> diagnostics;       // per-point failure notes, "" when ok
    double elapsed = 0;
};

/// One decompose_pipeline call per datapoint (optionally fanned out over
/// threads, deterministic regardless of thread count), statistics aggregated.
/// Per-point failures record pf = 0, cd = 0 and a diagnostic instead of
/// aborting the run.
EvaluationReport evaluate_gateset(const GateSet& gs, const Dataset& ds, const EvalConfig& cfg);

struct CostWeights {
    double apf = 50, npf = 1, acd = 1, ncd = 1, agf = 0;
};

struct NoveltyScores {
    double c_npf = 0;
    double c_ncd = 0;
    double pearson_pf = 0;
    bool pearson_defined = true;
};

/// Novelty: center each PF trace at its mean, negate trace 1, take the L2
/// distance of trace 2 from the negated trace, normalize by the joint mean
/// fidelity, and squash via x -> 1/(1+x) so higher = more anti-correlated.
/// Depth novelty runs the same construction on mean-normalized depth traces.
NoveltyScores novelty_scores(const EvaluationReport& r1, const EvaluationReport& r2);

double pearson(const std::vector<double>& a, const std::vector<double>& b, bool* defined = nullptr);

struct ComparisonReport {
    EvaluationReport report1, report2;
    double c_apf = 0, c_npf = 0, c_acd = 0, c_ncd = 0, c_agf = 0;
    double pearson_pf = 0;
    double total_cost = 0;  // a score to maximize; optimizers minimize its negation
};

ComparisonReport cost(const EvaluationReport& r1, const EvaluationReport& r2, const CostWeights& w,
                      const std::vector<double>& gs2_fab_costs);

}  // namespace qf
