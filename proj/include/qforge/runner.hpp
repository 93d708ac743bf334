#pragma once

#include "qforge/config.hpp"

#include <string>

namespace qf {

inline constexpr const char* kToolVersion = "0.1.0";

/// Execute a run: build the dataset and gate sets, run the selected mode, and
/// write manifest.json, report.csv, summary.json, coords.csv, gates/*.umat and
/// (optionally) circuits/*.txt into out_dir. Outputs are byte-stable for a
/// given config regardless of the thread count.
void run(const RunConfig& cfg, const std::string& out_dir);

Dataset build_dataset(const DatasetConfig& dc, std::uint64_t master_seed);
GateSet build_gateset(const GateSetConfig& gc, std::uint64_t master_seed, std::uint64_t salt);

}  // namespace qf
