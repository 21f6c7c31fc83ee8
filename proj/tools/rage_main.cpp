#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rage/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Graph-enhanced tensor network states: experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "Run a config-driven experiment");
    run->add_option("config", config_path, "Config file path")->required();

    CLI::App* selftest = app.add_subcommand("selftest", "Oracle-equivalence self checks");

    std::string kind = "mps_closed";
    int n_sites = 8;
    int bond = 2;
    int local_dim = 2;
    bool graph_enhanced = false;
    std::string mode = "complex";
    CLI::App* pc = app.add_subcommand("param-count", "Parameter-count formulas");
    pc->add_option("--kind", kind, "mps_open | mps_closed | tts_subcubic | tts_chain");
    pc->add_option("--sites", n_sites, "Number of physical sites")->required();
    pc->add_option("--bond", bond, "Bond dimension");
    pc->add_option("--local-dim", local_dim, "Physical dimension");
    pc->add_flag("--graph-enhanced", graph_enhanced, "Include the graph layer parameters");
    pc->add_option("--mode", mode, "complex | mixed | real | flat");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const rage::ConfigFile cfg = rage::ConfigFile::parse_file(config_path);
            return rage::run_experiment(cfg).exit_code;
        }
        if (selftest->parsed()) {
            const int failures = rage::run_selftest(std::cout);
            std::cout << (failures == 0 ? "all checks passed" : "checks failed") << "\n";
            return failures == 0 ? 0 : 1;
        }
        if (pc->parsed()) {
            rage::AnsatzSpec spec;
            spec.backbone = kind;
            spec.bond_dim = bond;
            spec.local_dim = local_dim;
            spec.graph_enhanced = graph_enhanced;
            std::cout << rage::param_count(spec, n_sites, rage::count_mode_from_string(mode))
                      << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
