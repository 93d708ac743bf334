#include "qforge/runner.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kCompareConfig = R"({
  "mode": "compare",
  "label": "t",
  "seed": 3,
  "dataset": {"kind": "haar-unitary", "qubits": 1, "size": 4, "seed": 12},
  "gateset1": {"label": "HT", "gates": ["H1", "T1"]},
  "gateset2": {"label": "HTS", "gates": ["H1", "T1", "S1"]},
  "pipeline": {"basis_depth": 4, "recursion": 1}
})";

}  // namespace

TEST_CASE("config parsing: defaults, strictness, diagnostics") {
    const RunConfig cfg = parse_config_text(kCompareConfig, "test");
    CHECK(cfg.mode == RunMode::Compare);
    CHECK(cfg.weights.apf == 50);  // documented defaults fill in
    CHECK(cfg.weights.npf == 1);
    CHECK(cfg.pipeline.rd_trials == 500);
    CHECK(cfg.pipeline.basis_depth == 4);
    CHECK(cfg.fidelity == FidelityKind::Process);

    CHECK_THROWS_WITH_AS(parse_config_text(R"({"dataset": {"kind": "stab-magic"}})", "t"),
                         doctest::Contains("mode"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({"mode": "compare", "unknown_key": 1})", "t"),
                         doctest::Contains("unknown_key"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("not json", "t"), ConfigError);
    // compare without gateset2
    CHECK_THROWS_AS(parse_config_text(R"({
        "mode": "compare",
        "dataset": {"kind": "stab-magic"},
        "gateset1": {"gates": ["H1"]}
    })", "t"), ConfigError);
    // weights validation
    CHECK_THROWS_AS(parse_config_text(R"({
        "mode": "compile",
        "dataset": {"kind": "stab-magic"},
        "gateset1": {"gates": ["H1"]},
        "weights": [0, 0, 0, 0, 0]
    })", "t"), ConfigError);
}

TEST_CASE("config round trips through its JSON form") {
    const RunConfig cfg = parse_config_text(kCompareConfig, "test");
    const RunConfig cfg2 = parse_config_text(config_to_json(cfg), "round");
    CHECK(cfg2.mode == cfg.mode);
    CHECK(cfg2.seed == cfg.seed);
    CHECK(cfg2.dataset.size == cfg.dataset.size);
    CHECK(cfg2.gateset1.gates.size() == cfg.gateset1.gates.size());
    CHECK(cfg2.pipeline.basis_depth == cfg.pipeline.basis_depth);
}

TEST_CASE("compare run writes the full artifact set and reruns bitwise") {
    const fs::path dir = fs::temp_directory_path() / "qforge_cli_compare";
    fs::remove_all(dir);
    RunConfig cfg = parse_config_text(kCompareConfig, "test");
    run(cfg, (dir / "a").string());

    for (const char* f : {"manifest.json", "report.csv", "summary.json", "coords.csv"}) {
        CHECK(fs::exists(dir / "a" / f));
    }
    const std::string report = slurp(dir / "a" / "report.csv");
    CHECK(report.substr(0, 24) == "index,pf1,cd1,pf2,cd2\n0,");

    // replay from the manifest with a different thread count: byte-identical report
    RunConfig replay = parse_config((dir / "a" / "manifest.json").string());
    replay.threads = 4;
    run(replay, (dir / "b").string());
    CHECK(slurp(dir / "b" / "report.csv") == report);
    CHECK(slurp(dir / "b" / "coords.csv") == slurp(dir / "a" / "coords.csv"));
    fs::remove_all(dir);
}

TEST_CASE("identical gate sets compare with identical columns") {
    const fs::path dir = fs::temp_directory_path() / "qforge_cli_same";
    fs::remove_all(dir);
    RunConfig cfg = parse_config_text(R"({
      "mode": "compare",
      "seed": 4,
      "dataset": {"kind": "haar-unitary", "qubits": 1, "size": 3, "seed": 2},
      "gateset1": {"label": "a", "gates": ["H1", "T1"]},
      "gateset2": {"label": "b", "gates": ["H1", "T1"]},
      "pipeline": {"basis_depth": 3, "recursion": 1}
    })", "test");
    run(cfg, dir.string());
    std::istringstream in(slurp(dir / "report.csv"));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string idx, pf1, cd1, pf2, cd2;
        std::getline(row, idx, ',');
        std::getline(row, pf1, ',');
        std::getline(row, cd1, ',');
        std::getline(row, pf2, ',');
        std::getline(row, cd2, ',');
        CHECK(pf1 == pf2);
        CHECK(cd1 == cd2);
    }
    fs::remove_all(dir);
}

TEST_CASE("compile run emits per-unitary circuits") {
    const fs::path dir = fs::temp_directory_path() / "qforge_cli_compile";
    fs::remove_all(dir);
    const RunConfig cfg = parse_config_text(R"({
      "mode": "compile",
      "seed": 9,
      "dataset": {"kind": "haar-unitary", "qubits": 1, "size": 2, "seed": 5},
      "gateset1": {"label": "HT", "gates": ["H1", "T1"]},
      "pipeline": {"basis_depth": 3, "recursion": 1}
    })", "test");
    run(cfg, dir.string());
    CHECK(fs::exists(dir / "circuits" / "point_0.txt"));
    const std::string c0 = slurp(dir / "circuits" / "point_0.txt");
    CHECK(c0.find("gateset HT") != std::string::npos);
    CHECK(c0.find("fidelity ") != std::string::npos);
    CHECK(c0.find("depth ") != std::string::npos);
    const std::string report = slurp(dir / "report.csv");
    CHECK(report.substr(0, 12) == "index,pf,cd\n");
    fs::remove_all(dir);
}

TEST_CASE("discover run exports gates and trajectory") {
    const fs::path dir = fs::temp_directory_path() / "qforge_cli_discover";
    fs::remove_all(dir);
    const RunConfig cfg = parse_config_text(R"({
      "mode": "discover",
      "seed": 21,
      "dataset": {"kind": "haar-unitary", "qubits": 1, "size": 2, "seed": 3},
      "gateset1": {"label": "HT", "gates": ["H1", "T1"]},
      "ansatz": {"label": "PP", "gates": ["P1", "P1"]},
      "pipeline": {"basis_depth": 3, "recursion": 0},
      "search": {"method": "random", "max_evals": 8}
    })", "test");
    run(cfg, dir.string());
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "gates" / "P1_0.umat"));
    CHECK(fs::exists(dir / "gates" / "P1_1.umat"));
    // exported gates reload as unitaries
    const Mat g = load_matrix((dir / "gates" / "P1_0.umat").string());
    CHECK(is_unitary(g, 1e-10));
    fs::remove_all(dir);
}
