#include "qforge/runner.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace qf {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw IoError(path.string() + ": write failed");
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

json report_stats(const EvaluationReport& r) {
    json j;
    j["gateset"] = r.gateset_label;
    j["pf_mean"] = r.pf_mean;
    j["pf_std"] = r.pf_std;
    j["cd_mean"] = r.cd_mean;
    j["cd_std"] = r.cd_std;
    j["points"] = r.pf.size();
    int failures = 0;
    for (const auto& d : r.diagnostics) {
        if (!d.empty()) ++failures;
    }
    j["failures"] = failures;
    return j;
}

void write_circuits(const fs::path& dir, const EvaluationReport& rep, const GateSet& gs) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < rep.circuits.size(); ++i) {
        const DecompositionResult& r = rep.circuits[i];
        std::string text = circuit_to_text(r.circuit, gs);
        text += "fidelity " + fmt(rep.pf[i]) + "\n";
        text += "depth " + std::to_string(rep.cd[i]) + "\n";
        write_file(dir / ("point_" + std::to_string(i) + ".txt"), text);
    }
}

void export_gate_files(const fs::path& dir, const GateSet& gs) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < gs.specs.size(); ++i) {
        save_matrix_binary(gs.matrices[i],
                           (dir / (gs.specs[i].name() + "_" + std::to_string(i) + ".umat")).string());
    }
}

}  // namespace

Dataset build_dataset(const DatasetConfig& dc, std::uint64_t master_seed) {
    const std::uint64_t seed = dc.seed ? *dc.seed : splitmix64(master_seed ^ 0xDA7A5E7ull);
    RngHandle rng(seed);
    switch (dc.kind) {
        case DatasetKind::HaarUnitary:
            return gen_haar_unitaries(dc.qubits, dc.size, rng);
        case DatasetKind::HaarState:
            return gen_haar_states(dc.qubits, dc.size, rng);
        case DatasetKind::GoldenEquispaced:
            return gen_golden_equispaced(dc.size);
        case DatasetKind::U3Grid:
            return gen_u3_grid(dc.resolution);
        case DatasetKind::StabMagic:
            return gen_stab_magic();
        case DatasetKind::WeylRandom:
            return gen_weyl_random(dc.size, rng);
        case DatasetKind::WeylEquispacedNonlocal:
            return gen_weyl_equispaced_nonlocal(dc.size);
        case DatasetKind::FromFiles:
            return load_dataset(dc.paths, dc.qubits);
    }
    throw std::logic_error("unreachable dataset kind");
}

GateSet build_gateset(const GateSetConfig& gc, std::uint64_t master_seed, std::uint64_t salt) {
    const std::uint64_t seed = gc.seed ? *gc.seed : splitmix64(master_seed ^ (0x6A7E5E7ull + salt));
    RngHandle rng(seed);
    std::vector<double> params = gc.params;
    int want = 0;
    for (const auto& s : gc.gates) want += s.param_count;
    if (params.empty() && want > 0) {
        // midpoint defaults when a parametric set is used without explicit params
        for (const auto& s : gc.gates) {
            const ParamBounds b = param_bounds(s);
            for (int i = 0; i < s.param_count; ++i) params.push_back(0.5 * (b.lo[i] + b.hi[i]));
        }
    }
    return assemble_gateset(gc.gates, params, rng, gc.include_daggers, gc.label);
}

void run(const RunConfig& cfg, const std::string& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out(out_dir);
    fs::create_directories(out);

    const Dataset ds = build_dataset(cfg.dataset, cfg.seed);

    EvalConfig ec;
    ec.pipeline = cfg.pipeline;
    ec.fidelity = cfg.fidelity;
    ec.seed = cfg.seed;
    ec.threads = cfg.threads;

    std::string report_csv;
    json summary;
    summary["label"] = cfg.label;
    summary["mode"] = cfg.mode == RunMode::Compile ? "compile"
                      : cfg.mode == RunMode::Compare ? "compare"
                                                     : "discover";
    summary["dataset"] = {{"kind", dataset_kind_name(ds.kind)},
                          {"qubits", ds.n_qubits},
                          {"size", ds.size()}};

    if (cfg.mode == RunMode::Compile) {
        const GateSet gs1 = build_gateset(cfg.gateset1, cfg.seed, 1);
        ec.keep_circuits = true;
        const EvaluationReport rep = evaluate_gateset(gs1, ds, ec);
        report_csv = "index,pf,cd\n";
        for (int i = 0; i < ds.size(); ++i) {
            report_csv += std::to_string(i) + "," + fmt(rep.pf[i]) + "," + std::to_string(rep.cd[i]) + "\n";
        }
        summary["gateset1"] = report_stats(rep);
        write_circuits(out / "circuits", rep, gs1);
    } else if (cfg.mode == RunMode::Compare) {
        const GateSet gs1 = build_gateset(cfg.gateset1, cfg.seed, 1);
        const GateSet gs2 = build_gateset(*cfg.gateset2, cfg.seed, 2);
        ec.keep_circuits = cfg.emit_circuits;
        const EvaluationReport r1 = evaluate_gateset(gs1, ds, ec);
        const EvaluationReport r2 = evaluate_gateset(gs2, ds, ec);
        const ComparisonReport cr = cost(r1, r2, cfg.weights, gs2.fab_costs);
        report_csv = "index,pf1,cd1,pf2,cd2\n";
        for (int i = 0; i < ds.size(); ++i) {
            report_csv += std::to_string(i) + "," + fmt(r1.pf[i]) + "," + std::to_string(r1.cd[i]) +
                          "," + fmt(r2.pf[i]) + "," + std::to_string(r2.cd[i]) + "\n";
        }
        summary["gateset1"] = report_stats(r1);
        summary["gateset2"] = report_stats(r2);
        summary["metrics"] = {{"c_apf", cr.c_apf}, {"c_npf", cr.c_npf}, {"c_acd", cr.c_acd},
                              {"c_ncd", cr.c_ncd}, {"c_agf", cr.c_agf}};
        summary["pearson_pf"] = cr.pearson_pf;
        summary["total_cost"] = cr.total_cost;
        summary["weights"] = {cfg.weights.apf, cfg.weights.npf, cfg.weights.acd, cfg.weights.ncd,
                              cfg.weights.agf};
        if (cfg.emit_circuits) {
            write_circuits(out / "circuits" / gs1.label, r1, gs1);
            write_circuits(out / "circuits" / gs2.label, r2, gs2);
        }
    } else {
        const GateSet gs1 = build_gateset(cfg.gateset1, cfg.seed, 1);
        SearchConfig sc = cfg.search;
        if (cfg.ansatz->seed) sc.seed = *cfg.ansatz->seed;
        const DiscoveryReport rep = discover_gateset(cfg.ansatz->gates, gs1, ds, cfg.weights, ec, sc);
        const EvaluationReport& r1 = rep.final_comparison.report1;
        const EvaluationReport& r2 = rep.final_comparison.report2;
        report_csv = "index,pf1,cd1,pf2,cd2\n";
        for (int i = 0; i < ds.size(); ++i) {
            report_csv += std::to_string(i) + "," + fmt(r1.pf[i]) + "," + std::to_string(r1.cd[i]) +
                          "," + fmt(r2.pf[i]) + "," + std::to_string(r2.cd[i]) + "\n";
        }
        summary["gateset1"] = report_stats(r1);
        summary["gateset2"] = report_stats(r2);
        summary["best_score"] = rep.best_score;
        summary["best_params"] = std::vector<double>(rep.best_params.data(),
                                                     rep.best_params.data() + rep.best_params.size());
        summary["metrics"] = {{"c_apf", rep.final_comparison.c_apf},
                              {"c_npf", rep.final_comparison.c_npf},
                              {"c_acd", rep.final_comparison.c_acd},
                              {"c_ncd", rep.final_comparison.c_ncd},
                              {"c_agf", rep.final_comparison.c_agf}};
        summary["pearson_pf"] = rep.final_comparison.pearson_pf;
        summary["weights"] = {cfg.weights.apf, cfg.weights.npf, cfg.weights.acd, cfg.weights.ncd,
                              cfg.weights.agf};
        summary["evaluations"] = rep.trajectory.size();

        std::string traj = "eval,score\n";
        for (const auto& [idx, score] : rep.trajectory) {
            traj += std::to_string(idx) + "," + fmt(score) + "\n";
        }
        write_file(out / "trajectory.csv", traj);
        export_gate_files(out / "gates", rep.best_gateset);
    }

    write_file(out / "report.csv", report_csv);
    write_file(out / "summary.json", summary.dump(2) + "\n");
    if (ds.n_qubits <= 2) {
        write_file(out / "coords.csv", export_coords(ds));
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest;
    manifest["tool"] = "forge";
    manifest["version"] = kToolVersion;
    manifest["config"] = json::parse(config_to_json(cfg));
    manifest["seed"] = cfg.seed;
    manifest["wall_time_s"] = wall;
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace qf
