#include "qforge/evaluate.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

namespace qf {

namespace {

double state_fidelity(const Mat& target, const Mat& achieved) {
    const cplx ov = target.col(0).adjoint() * achieved.col(0);
    return std::norm(ov);
}

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
    if (xs.empty()) {
        mean = sd = 0;
        return;
    }
    mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double acc = 0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    sd = std::sqrt(acc / xs.size());
}

}  // namespace

EvaluationReport evaluate_gateset(const GateSet& gs, const Dataset& ds, const EvalConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const int npoints = ds.size();
    EvaluationReport rep;
    rep.gateset_label = gs.label;
    PipelineConfig pipe_cfg = cfg.pipeline;
    pipe_cfg.objective = cfg.fidelity;
    rep.pf.assign(npoints, 0.0);
    rep.cd.assign(npoints, 0);
    rep.diagnostics.assign(npoints, "");
    if (cfg.keep_circuits) rep.circuits.resize(npoints);

    // One shared SK-basis per run; it only depends on the gate set.
    PipelineScratch scratch;
    if (pipe_cfg.oneq == OneQubitMethod::SKD && !gs.one_qubit_indices().empty()) {
        scratch.sk_basis = skd_build_basis(one_qubit_subset(gs), pipe_cfg.basis_depth);
    }

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= npoints) break;
            try {
                RngHandle point_rng = RngHandle(cfg.seed).child(static_cast<std::uint64_t>(i));
                DecompositionResult r =
                    decompose_pipeline(ds.unitaries[i], gs, pipe_cfg, point_rng, &scratch);
                double fid = r.fidelity;
                if (cfg.fidelity == FidelityKind::State) {
                    fid = state_fidelity(ds.unitaries[i], circuit_unitary(r.circuit, gs));
                }
                rep.pf[i] = fid;
                rep.cd[i] = r.depth;
                if (cfg.keep_circuits) rep.circuits[i] = std::move(r);
            } catch (const std::exception& e) {
                rep.pf[i] = 0.0;
                rep.cd[i] = 0;
                rep.diagnostics[i] = e.what();
            }
        }
    };

    const int nthreads = std::max(1, cfg.threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<double> cds(rep.cd.begin(), rep.cd.end());
    mean_std(rep.pf, rep.pf_mean, rep.pf_std);
    mean_std(cds, rep.cd_mean, rep.cd_std);
    rep.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b, bool* defined) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("pearson: traces must have equal nonzero length");
    }
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa < 1e-300 || sbb < 1e-300) {
        if (defined) *defined = false;
        return 0.0;
    }
    if (defined) *defined = true;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

NoveltyScores novelty_scores(const EvaluationReport& r1, const EvaluationReport& r2) {
    if (r1.pf.size() != r2.pf.size()) {
        throw std::invalid_argument("novelty_scores: reports cover different dataset sizes");
    }
    NoveltyScores ns;
    const std::size_t n = r1.pf.size();

    // PF novelty: distance between trace 2 and the negated trace 1 after
    // mean-centering, normalized by the joint mean fidelity.
    double x = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (r2.pf[i] - r2.pf_mean) + (r1.pf[i] - r1.pf_mean);
        x += d * d;
    }
    const double joint = std::max(0.5 * (r1.pf_mean + r2.pf_mean), 1e-12);
    ns.c_npf = 1.0 / (1.0 + std::sqrt(x) / joint);

    // depth novelty on mean-normalized traces (their means are 1 by construction)
    const double m1 = std::max(r1.cd_mean, 1e-12);
    const double m2 = std::max(r2.cd_mean, 1e-12);
    double xd = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (r2.cd[i] / m2 - 1.0) + (r1.cd[i] / m1 - 1.0);
        xd += d * d;
    }
    ns.c_ncd = 1.0 / (1.0 + std::sqrt(xd));

    ns.pearson_pf = pearson(r1.pf, r2.pf, &ns.pearson_defined);
    return ns;
}

ComparisonReport cost(const EvaluationReport& r1, const EvaluationReport& r2, const CostWeights& w,
                      const std::vector<double>& gs2_fab_costs) {
    if (r1.pf.size() != r2.pf.size()) {
        throw std::invalid_argument("cost: reports cover different dataset sizes");
    }
    ComparisonReport cr;
    cr.report1 = r1;
    cr.report2 = r2;
    cr.c_apf = r2.pf_mean - r1.pf_mean;
    cr.c_acd = (r1.cd_mean - r2.cd_mean) / std::max(r1.cd_mean, 1.0);
    const NoveltyScores ns = novelty_scores(r1, r2);
    cr.c_npf = ns.c_npf;
    cr.c_ncd = ns.c_ncd;
    cr.pearson_pf = ns.pearson_pf;
    double fab = 0;
    if (!gs2_fab_costs.empty()) {
        fab = std::accumulate(gs2_fab_costs.begin(), gs2_fab_costs.end(), 0.0) / gs2_fab_costs.size();
    }
    cr.c_agf = -fab;
    cr.total_cost = w.apf * cr.c_apf + w.npf * cr.c_npf + w.acd * cr.c_acd + w.ncd * cr.c_ncd +
                    w.agf * cr.c_agf;
    return cr;
}

}  // namespace qf
