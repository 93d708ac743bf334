#pragma once

#include "qforge/datasets.hpp"
#include "qforge/discover.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qf {

enum class RunMode { Compile, Compare, Discover };

struct DatasetConfig {
    DatasetKind kind = DatasetKind::HaarUnitary;
    int qubits = 1;
    int size = 10;
    std::optional<std::uint64_t> seed;
    int resolution = 4;              // u3-grid
    std::vector<std::string> paths;  // from-files
};

struct GateEntry {
    GateSpec spec;
};

struct GateSetConfig {
    std::string label;
    std::vector<GateSpec> gates;
    std::vector<double> params;  // concatenated parametric slots (may be empty for ansatz)
    std::optional<std::uint64_t> seed;
    bool include_daggers = false;
};

struct RunConfig {
    RunMode mode = RunMode::Compare;
    std::string label = "run";
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir;
    bool emit_circuits = false;

    DatasetConfig dataset;
    GateSetConfig gateset1;
    std::optional<GateSetConfig> gateset2;  // compare
    std::optional<GateSetConfig> ansatz;    // discover

    PipelineConfig pipeline;
    CostWeights weights;
    FidelityKind fidelity = FidelityKind::Process;
    SearchConfig search;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Strict parse: unknown keys are errors; defaults documented in --help.
/// Accepts either a bare config document or a run manifest (whose "config"
/// field is then used), so completed runs can be replayed directly.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

/// The effective configuration serialized back to the manifest format.
std::string config_to_json(const RunConfig& cfg);

std::string config_schema_help();

}  // namespace qf
