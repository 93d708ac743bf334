#include "qforge/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

int run_mode(const std::string& config_path, qf::RunMode expected, const std::string& out_override,
             std::int64_t seed_override, int threads_override, bool validate_only) {
    qf::RunConfig cfg;
    try {
        cfg = qf::parse_config(config_path);
        if (cfg.mode != expected) {
            throw qf::ConfigError(config_path + ": config 'mode' does not match the subcommand");
        }
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (seed_override >= 0) {
            cfg.seed = static_cast<std::uint64_t>(seed_override);
            cfg.search.seed = cfg.seed;
        }
        if (threads_override > 0) cfg.threads = threads_override;
        if (cfg.out_dir.empty() && !validate_only) {
            throw qf::ConfigError("no output directory: set 'out' in the config or pass --out");
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (validate_only) {
        std::cout << "config ok\n";
        return 0;
    }
    try {
        qf::run(cfg, cfg.out_dir);
        std::cout << "run '" << cfg.label << "' written to " << cfg.out_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forge - decompose unitaries over discrete gate sets, compare gate sets, and "
                 "discover new ones"};
    app.footer(qf::config_schema_help());
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::int64_t seed = -1;
    int threads = 0;
    bool validate_only = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (JSON) or a manifest.json to replay")
            ->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "master seed (overrides config)");
        sub->add_option("--threads", threads, "worker threads (overrides config)");
    };

    CLI::App* compile = app.add_subcommand("compile", "decompose each dataset unitary with one gate set");
    CLI::App* compare = app.add_subcommand("compare", "evaluate two gate sets side by side");
    CLI::App* discover = app.add_subcommand("discover", "search a parametric ansatz against a reference set");
    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config, then exit");
    add_common(compile);
    add_common(compare);
    add_common(discover);
    validate->add_option("--config", config_path, "config file to check")->required();

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand(validate)) {
        try {
            (void)qf::parse_config(config_path);
            std::cout << "config ok\n";
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
    }
    if (app.got_subcommand(compile)) {
        return run_mode(config_path, qf::RunMode::Compile, out_dir, seed, threads, validate_only);
    }
    if (app.got_subcommand(compare)) {
        return run_mode(config_path, qf::RunMode::Compare, out_dir, seed, threads, validate_only);
    }
    return run_mode(config_path, qf::RunMode::Discover, out_dir, seed, threads, validate_only);
}
