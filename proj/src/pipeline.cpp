#include "qforge/decomp.hpp"

#include <chrono>
#include <cmath>

namespace qf {

GateSet one_qubit_subset(const GateSet& gs, std::vector<int>* orig_indices) {
    GateSet sub;
    sub.label = gs.label;
    sub.include_daggers = gs.include_daggers;
    sub.seed = gs.seed;
    if (orig_indices) orig_indices->clear();
    std::size_t off = 0;
    for (int i = 0; i < static_cast<int>(gs.specs.size()); ++i) {
        const int pc = gs.specs[i].param_count;
        if (gs.specs[i].arity == 1) {
            sub.specs.push_back(gs.specs[i]);
            sub.matrices.push_back(gs.matrices[i]);
            sub.fab_costs.push_back(gs.fab_costs[i]);
            sub.params.insert(sub.params.end(), gs.params.begin() + off, gs.params.begin() + off + pc);
            if (orig_indices) orig_indices->push_back(i);
        }
        off += pc;
    }
    return sub;
}

namespace {

struct OneQubitDecomposer {
    const GateSet& full;
    const PipelineConfig& cfg;
    RngHandle& rng;
    GateSet subset;
    std::vector<int> orig_indices;
    const SkBasis* basis = nullptr;
    std::optional<SkBasis> owned_basis;

    OneQubitDecomposer(const GateSet& gs, const PipelineConfig& c, RngHandle& r, PipelineScratch* scratch)
        : full(gs), cfg(c), rng(r) {
        subset = one_qubit_subset(gs, &orig_indices);
        if (cfg.oneq == OneQubitMethod::SKD && !subset.specs.empty()) {
            if (scratch && scratch->sk_basis) {
                basis = &*scratch->sk_basis;
            } else {
                owned_basis = skd_build_basis(subset, cfg.basis_depth);
                basis = &*owned_basis;
            }
        }
    }

    bool usable() const { return !subset.specs.empty(); }

    // ops over the FULL gate set, targeting `qubit` within an n-qubit circuit
    std::vector<CircuitOp> decompose(const Mat& u, int qubit) {
        std::vector<CircuitOp> out;
        DecompositionResult r;
        if (cfg.oneq == OneQubitMethod::SKD) {
            r = skd_decompose(u, subset, cfg.recursion, *basis);
        } else {
            r = rd_decompose(u, subset, cfg.rd_max_length, cfg.rd_trials, rng);
        }
        for (const auto& op : r.circuit.ops) {
            out.push_back({orig_indices[op.gate], {qubit}, op.dagger});
        }
        return out;
    }
};

DecompositionResult finalize(Circuit c, const GateSet& gs, const Mat& u,
                             std::chrono::steady_clock::time_point t0) {
    DecompositionResult res;
    res.method = Method::Pipeline;
    res.fidelity = process_fidelity(circuit_unitary(c, gs), u);
    res.depth = circuit_depth(c);
    for (const auto& op : c.ops) {
        if (op.qubits.size() == 2) ++res.entangler_count;
    }
    res.circuit = std::move(c);
    res.gate_set = gs;
    res.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

DecompositionResult pipeline_dim2(const Mat& u, const GateSet& gs, const PipelineConfig& cfg,
                                  RngHandle& rng, PipelineScratch* scratch,
                                  std::chrono::steady_clock::time_point t0) {
    OneQubitDecomposer oneq(gs, cfg, rng, scratch);
    if (!oneq.usable()) {
        throw std::invalid_argument("pipeline: gate set has no 1-qubit gates for a 1-qubit target");
    }
    Circuit c;
    c.n_qubits = 1;
    c.gateset_label = gs.label;
    c.ops = oneq.decompose(u, 0);
    return finalize(std::move(c), gs, u, t0);
}

DecompositionResult pipeline_dim4_kak(const Mat& u, const GateSet& gs, const PipelineConfig& cfg,
                                      RngHandle& rng, PipelineScratch* scratch,
                                      std::chrono::steady_clock::time_point t0) {
    const std::vector<int> ents = gs.two_qubit_indices();
    if (ents.empty()) {
        throw std::invalid_argument("pipeline: KAK stage requires a 2-qubit gate in the set");
    }
    OneQubitDecomposer oneq(gs, cfg, rng, scratch);

    // try each available entangler and keep the best end-to-end result
    DecompositionResult best;
    best.fidelity = -1.0;
    for (int ent : ents) {
        const EntanglerSynthesis syn = kak_fit_entangler(u, gs.matrices[ent], cfg.max_apps, rng);
        Circuit c;
        c.n_qubits = 2;
        c.gateset_label = gs.label;
        for (int layer = 0; layer <= syn.applications; ++layer) {
            if (layer > 0) c.ops.push_back({ent, {0, 1}});
            for (int q = 0; q < 2; ++q) {
                const Mat2& local = syn.locals[layer][q];
                if ((local - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-12) continue;
                if (oneq.usable()) {
                    const auto ops = oneq.decompose(local, q);
                    c.ops.insert(c.ops.end(), ops.begin(), ops.end());
                }
            }
        }
        DecompositionResult r = finalize(std::move(c), gs, u, t0);
        if (r.fidelity > best.fidelity) best = std::move(r);
    }
    return best;
}

DecompositionResult pipeline_nq_qsd(const Mat& u, const GateSet& gs, const PipelineConfig& cfg,
                                    RngHandle& rng, PipelineScratch* scratch,
                                    std::chrono::steady_clock::time_point t0) {
    const std::vector<int> ents = gs.two_qubit_indices();
    if (ents.empty()) {
        throw std::invalid_argument("pipeline: KAK stage requires a 2-qubit gate in the set");
    }
    const DecompositionResult qsd = qsd_decompose(u);
    const int n = qsd.circuit.n_qubits;
    OneQubitDecomposer oneq(gs, cfg, rng, scratch);

    DecompositionResult best;
    best.fidelity = -1.0;
    for (int ent : ents) {
        // how one CX maps onto this entangler (k = 1 exactly when the classes match)
        RngHandle cx_rng = rng.child(0xab1e);
        const EntanglerSynthesis cx_syn =
            kak_fit_entangler(qsd.gate_set.matrices[0], gs.matrices[ent], cfg.max_apps, cx_rng);

        Circuit c;
        c.n_qubits = n;
        c.gateset_label = gs.label;
        std::vector<Mat> pending(n, Mat::Identity(2, 2));
        auto flush = [&](int q) {
            if ((pending[q] - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12) {
                pending[q] = Mat::Identity(2, 2);
                return;
            }
            if (oneq.usable()) {
                const auto ops = oneq.decompose(pending[q], q);
                c.ops.insert(c.ops.end(), ops.begin(), ops.end());
            }
            pending[q] = Mat::Identity(2, 2);
        };

        for (const auto& op : qsd.circuit.ops) {
            if (op.qubits.size() == 1) {
                pending[op.qubits[0]] = qsd.gate_set.matrices[op.gate] * pending[op.qubits[0]];
                continue;
            }
            const int qa = op.qubits[0], qb = op.qubits[1];
            pending[qa] = cx_syn.locals[0][0] * pending[qa];
            pending[qb] = cx_syn.locals[0][1] * pending[qb];
            for (int app = 1; app <= cx_syn.applications; ++app) {
                flush(qa);
                flush(qb);
                c.ops.push_back({ent, {qa, qb}});
                pending[qa] = cx_syn.locals[app][0];
                pending[qb] = cx_syn.locals[app][1];
            }
        }
        for (int q = 0; q < n; ++q) flush(q);
        DecompositionResult r = finalize(std::move(c), gs, u, t0);
        if (r.fidelity > best.fidelity) best = std::move(r);
    }
    return best;
}

}  // namespace

DecompositionResult decompose_pipeline(const Mat& u, const GateSet& gs, const PipelineConfig& cfg,
                                       RngHandle& rng, PipelineScratch* scratch) {
    const auto t0 = std::chrono::steady_clock::now();
    const int dim = static_cast<int>(u.rows());
    if (!is_power_of_two(dim) || dim < 2 || dim > 64) {
        throw std::invalid_argument("pipeline: dimension must be a power of two in [2, 64]");
    }
    require_unitary(u, 1e-8, "decompose_pipeline");

    if (dim == 2) {
        if (cfg.oneq == OneQubitMethod::RD) {
            std::vector<int> orig;
            const GateSet sub = one_qubit_subset(gs, &orig);
            if (sub.specs.empty()) {
                throw std::invalid_argument("pipeline: gate set has no 1-qubit gates for a 1-qubit target");
            }
            DecompositionResult r =
                rd_decompose(u, sub, cfg.rd_max_length, cfg.rd_trials, rng, cfg.objective);
            for (auto& op : r.circuit.ops) op.gate = orig[op.gate];
            r.gate_set = gs;
            r.method = Method::Pipeline;
            return r;
        }
        return pipeline_dim2(u, gs, cfg, rng, scratch, t0);
    }
    if (dim == 4) {
        if (cfg.twoq == TwoQubitMethod::RD) {
            DecompositionResult r =
                rd_decompose(u, gs, cfg.rd_max_length, cfg.rd_trials, rng, cfg.objective);
            r.method = Method::Pipeline;
            return r;
        }
        return pipeline_dim4_kak(u, gs, cfg, rng, scratch, t0);
    }
    if (cfg.nq == NQubitMethod::RD) {
        DecompositionResult r =
            rd_decompose(u, gs, cfg.rd_max_length, cfg.rd_trials, rng, cfg.objective);
        r.method = Method::Pipeline;
        return r;
    }
    return pipeline_nq_qsd(u, gs, cfg, rng, scratch, t0);
}

}  // namespace qf
