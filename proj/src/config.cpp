#include "qforge/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace qf {

using json = nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

GateSetConfig parse_gateset(const json& j, const std::string& where) {
    check_keys(j, {"label", "gates", "params", "seed", "include_daggers"}, where);
    GateSetConfig gc;
    if (!j.contains("gates") || !j["gates"].is_array() || j["gates"].empty()) {
        throw ConfigError(where + ": 'gates' must be a non-empty array");
    }
    for (const auto& g : j["gates"]) {
        if (g.is_string()) {
            gc.gates.push_back(GateSpec::from_name(g.get<std::string>()));
        } else if (g.is_object()) {
            check_keys(g, {"name", "file", "fab_cost"}, where + ".gates[]");
            GateSpec spec = GateSpec::from_name(g.at("name").get<std::string>());
            if (g.contains("file")) spec.file_path = g["file"].get<std::string>();
            if (g.contains("fab_cost")) spec.fab_cost = g["fab_cost"].get<double>();
            gc.gates.push_back(spec);
        } else {
            throw ConfigError(where + ": gate entries must be names or objects");
        }
    }
    gc.label = j.value("label", std::string{});
    if (j.contains("params")) gc.params = j["params"].get<std::vector<double>>();
    if (j.contains("seed")) gc.seed = j["seed"].get<std::uint64_t>();
    gc.include_daggers = j.value("include_daggers", false);
    return gc;
}

json gateset_to_json(const GateSetConfig& gc) {
    json j;
    j["label"] = gc.label;
    json gates = json::array();
    for (const auto& g : gc.gates) {
        if (g.file_path.empty() && g.fab_cost == 1.0) {
            gates.push_back(g.name());
        } else {
            json e;
            e["name"] = g.name();
            if (!g.file_path.empty()) e["file"] = g.file_path;
            if (g.fab_cost != 1.0) e["fab_cost"] = g.fab_cost;
            gates.push_back(e);
        }
    }
    j["gates"] = gates;
    if (!gc.params.empty()) j["params"] = gc.params;
    if (gc.seed) j["seed"] = *gc.seed;
    if (gc.include_daggers) j["include_daggers"] = true;
    return j;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    // allow replaying a manifest directly
    if (j.contains("config") && j.contains("tool")) {
        j = j["config"];
    }

    check_keys(j,
               {"mode", "label", "seed", "threads", "out", "emit_circuits", "dataset", "gateset1",
                "gateset2", "ansatz", "pipeline", "weights", "fidelity", "search"},
               origin);
    RunConfig cfg;
    if (!j.contains("mode")) throw ConfigError(origin + ": missing required key 'mode'");
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "compile") {
        cfg.mode = RunMode::Compile;
    } else if (mode == "compare") {
        cfg.mode = RunMode::Compare;
    } else if (mode == "discover") {
        cfg.mode = RunMode::Discover;
    } else {
        throw ConfigError(origin + ": mode must be compile|compare|discover, got '" + mode + "'");
    }
    cfg.label = j.value("label", std::string("run"));
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.threads = j.value("threads", 1);
    cfg.out_dir = j.value("out", std::string{});
    cfg.emit_circuits = j.value("emit_circuits", false);

    if (!j.contains("dataset")) throw ConfigError(origin + ": missing required key 'dataset'");
    {
        const json& d = j["dataset"];
        check_keys(d, {"kind", "qubits", "size", "seed", "resolution", "paths"}, origin + ".dataset");
        if (!d.contains("kind")) throw ConfigError(origin + ".dataset: missing 'kind'");
        cfg.dataset.kind = dataset_kind_from_name(d["kind"].get<std::string>());
        cfg.dataset.qubits = d.value("qubits", 1);
        cfg.dataset.size = d.value("size", 10);
        if (d.contains("seed")) cfg.dataset.seed = d["seed"].get<std::uint64_t>();
        cfg.dataset.resolution = d.value("resolution", 4);
        if (d.contains("paths")) cfg.dataset.paths = d["paths"].get<std::vector<std::string>>();
    }

    if (!j.contains("gateset1")) throw ConfigError(origin + ": missing required key 'gateset1'");
    cfg.gateset1 = parse_gateset(j["gateset1"], origin + ".gateset1");
    if (cfg.gateset1.label.empty()) cfg.gateset1.label = "gs1";
    if (j.contains("gateset2")) {
        cfg.gateset2 = parse_gateset(j["gateset2"], origin + ".gateset2");
        if (cfg.gateset2->label.empty()) cfg.gateset2->label = "gs2";
    }
    if (j.contains("ansatz")) {
        cfg.ansatz = parse_gateset(j["ansatz"], origin + ".ansatz");
        if (cfg.ansatz->label.empty()) cfg.ansatz->label = "gs2";
    }

    if (cfg.mode == RunMode::Compare && !cfg.gateset2) {
        throw ConfigError(origin + ": compare mode requires 'gateset2'");
    }
    if (cfg.mode == RunMode::Discover && !cfg.ansatz) {
        throw ConfigError(origin + ": discover mode requires 'ansatz'");
    }
    if (cfg.mode == RunMode::Compile && (cfg.gateset2 || cfg.ansatz)) {
        throw ConfigError(origin + ": compile mode takes exactly one gate set");
    }

    if (j.contains("pipeline")) {
        const json& p = j["pipeline"];
        check_keys(p,
                   {"oneq", "twoq", "nq", "basis_depth", "recursion", "rd_trials", "rd_max_length",
                    "max_apps"},
                   origin + ".pipeline");
        const std::string oneq = p.value("oneq", std::string("SKD"));
        if (oneq == "SKD") cfg.pipeline.oneq = OneQubitMethod::SKD;
        else if (oneq == "RD") cfg.pipeline.oneq = OneQubitMethod::RD;
        else throw ConfigError(origin + ".pipeline: oneq must be SKD|RD");
        const std::string twoq = p.value("twoq", std::string("KAK"));
        if (twoq == "KAK") cfg.pipeline.twoq = TwoQubitMethod::KAK;
        else if (twoq == "RD") cfg.pipeline.twoq = TwoQubitMethod::RD;
        else throw ConfigError(origin + ".pipeline: twoq must be KAK|RD");
        const std::string nq = p.value("nq", std::string("QSD"));
        if (nq == "QSD") cfg.pipeline.nq = NQubitMethod::QSD;
        else if (nq == "RD") cfg.pipeline.nq = NQubitMethod::RD;
        else throw ConfigError(origin + ".pipeline: nq must be QSD|RD");
        cfg.pipeline.basis_depth = p.value("basis_depth", 6);
        cfg.pipeline.recursion = p.value("recursion", 2);
        cfg.pipeline.rd_trials = p.value("rd_trials", 500);
        cfg.pipeline.rd_max_length = p.value("rd_max_length", 20);
        cfg.pipeline.max_apps = p.value("max_apps", 3);
    }

    if (j.contains("weights")) {
        const auto w = j["weights"].get<std::vector<double>>();
        if (w.size() != 5) throw ConfigError(origin + ": weights must have 5 entries [apf,npf,acd,ncd,agf]");
        bool any = false;
        for (double x : w) {
            if (x < 0 || !std::isfinite(x)) throw ConfigError(origin + ": weights must be finite and nonnegative");
            any = any || x != 0;
        }
        if (!any) throw ConfigError(origin + ": weights must not all be zero");
        cfg.weights = {w[0], w[1], w[2], w[3], w[4]};
    }

    const std::string fid = j.value("fidelity", std::string("process"));
    if (fid == "process") cfg.fidelity = FidelityKind::Process;
    else if (fid == "state") cfg.fidelity = FidelityKind::State;
    else throw ConfigError(origin + ": fidelity must be process|state");

    if (j.contains("search")) {
        const json& s = j["search"];
        check_keys(s, {"method", "max_evals", "seed", "restarts", "initial_point"}, origin + ".search");
        const std::string method = s.value("method", std::string("local"));
        if (method == "local") cfg.search.method = SearchMethod::DerivativeFreeLocal;
        else if (method == "random") cfg.search.method = SearchMethod::RandomSearch;
        else throw ConfigError(origin + ".search: method must be local|random");
        cfg.search.max_evals = s.value("max_evals", 1000);
        if (cfg.search.max_evals < 1) throw ConfigError(origin + ".search: max_evals must be >= 1");
        cfg.search.seed = s.value("seed", cfg.seed);
        cfg.search.restarts = s.value("restarts", 1);
        if (s.contains("initial_point")) {
            const auto v = s["initial_point"].get<std::vector<double>>();
            cfg.search.initial_point = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
        }
    } else {
        cfg.search.seed = cfg.seed;
    }
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["mode"] = cfg.mode == RunMode::Compile ? "compile"
                : cfg.mode == RunMode::Compare ? "compare"
                                               : "discover";
    j["label"] = cfg.label;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    if (!cfg.out_dir.empty()) j["out"] = cfg.out_dir;
    if (cfg.emit_circuits) j["emit_circuits"] = true;

    json d;
    d["kind"] = dataset_kind_name(cfg.dataset.kind);
    d["qubits"] = cfg.dataset.qubits;
    d["size"] = cfg.dataset.size;
    if (cfg.dataset.seed) d["seed"] = *cfg.dataset.seed;
    if (cfg.dataset.kind == DatasetKind::U3Grid) d["resolution"] = cfg.dataset.resolution;
    if (!cfg.dataset.paths.empty()) d["paths"] = cfg.dataset.paths;
    j["dataset"] = d;

    j["gateset1"] = gateset_to_json(cfg.gateset1);
    if (cfg.gateset2) j["gateset2"] = gateset_to_json(*cfg.gateset2);
    if (cfg.ansatz) j["ansatz"] = gateset_to_json(*cfg.ansatz);

    json p;
    p["oneq"] = cfg.pipeline.oneq == OneQubitMethod::SKD ? "SKD" : "RD";
    p["twoq"] = cfg.pipeline.twoq == TwoQubitMethod::KAK ? "KAK" : "RD";
    p["nq"] = cfg.pipeline.nq == NQubitMethod::QSD ? "QSD" : "RD";
    p["basis_depth"] = cfg.pipeline.basis_depth;
    p["recursion"] = cfg.pipeline.recursion;
    p["rd_trials"] = cfg.pipeline.rd_trials;
    p["rd_max_length"] = cfg.pipeline.rd_max_length;
    p["max_apps"] = cfg.pipeline.max_apps;
    j["pipeline"] = p;

    j["weights"] = {cfg.weights.apf, cfg.weights.npf, cfg.weights.acd, cfg.weights.ncd, cfg.weights.agf};
    j["fidelity"] = cfg.fidelity == FidelityKind::Process ? "process" : "state";

    json s;
    s["method"] = cfg.search.method == SearchMethod::DerivativeFreeLocal ? "local" : "random";
    s["max_evals"] = cfg.search.max_evals;
    s["seed"] = cfg.search.seed;
    s["restarts"] = cfg.search.restarts;
    if (cfg.search.initial_point.size() > 0) {
        s["initial_point"] = std::vector<double>(cfg.search.initial_point.data(),
                                                 cfg.search.initial_point.data() + cfg.search.initial_point.size());
    }
    j["search"] = s;
    return j.dump(2);
}

std::string config_schema_help() {
    return R"(Config file (JSON; unknown keys are errors):
{
  "mode": "compile|compare|discover",      required
  "label": "run",                          run name (default "run")
  "seed": 0,                               master seed (default 0)
  "threads": 1,                            worker threads (default 1)
  "out": "dir",                            output directory (or --out)
  "emit_circuits": false,                  write circuits/*.txt (default false)
  "dataset": {
    "kind": "haar-unitary|haar-state|golden-equispaced|u3-grid|stab-magic|
             weyl-random|weyl-equispaced-nonlocal|from-files",
    "qubits": 1, "size": 10,
    "seed": 7,                             optional, defaults from master seed
    "resolution": 4,                       u3-grid only (size = resolution^3)
    "paths": ["u.txt", ...]                from-files only
  },
  "gateset1": {
    "label": "HT",
    "gates": ["H1", "T1", {"name": "F1", "file": "g.umat", "fab_cost": 2.0}],
    "params": [..],                        parametric slots, packed in gate order
    "seed": 1,                             freeze seed for R1/R2
    "include_daggers": false
  },
  "gateset2": { .. },                      compare mode
  "ansatz":   { .. },                      discover mode (params optional)
  "pipeline": {
    "oneq": "SKD|RD", "twoq": "KAK|RD", "nq": "QSD|RD",
    "basis_depth": 6, "recursion": 2,
    "rd_trials": 500, "rd_max_length": 20, "max_apps": 3
  },
  "weights": [50, 1, 1, 1, 0],             [apf, npf, acd, ncd, agf]
  "fidelity": "process|state",             comparison metric (default process)
  "search": {
    "method": "local|random", "max_evals": 1000,
    "seed": 0, "restarts": 1, "initial_point": [..]
  }
}
Gate identifiers: R1 P1 T1 TD1 S1 Z1 X1 H1 F1 R2 NL2 CX2 CZ2 B2 SPE2 F2.
)";
}

}  // namespace qf
