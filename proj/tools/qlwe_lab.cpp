#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qlab/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qlwe-lab: seeded experiments for quantum-amplitude LWE algorithms"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a named experiment from a JSON config");
    std::string config_path, out_dir;
    std::uint64_t seed_override = 0;
    bool have_seed = false, strict = false, emit_hidden = false;
    int jobs = 0;
    run->add_option("--config", config_path, "path to the experiment config JSON")->required();
    run->add_option("--seed", seed_override, "override the config seed")
        ->each([&](const std::string&) { have_seed = true; });
    run->add_option("--out", out_dir, "output directory (overrides config)");
    run->add_flag("--strict", strict, "enable strict-mode parameter checks");
    run->add_flag("--emit-hidden", emit_hidden, "write hidden-record *.SECRET.csv files");
    run->add_option("--jobs", jobs, "parallel trial workers (0 = default)");

    auto* list = app.add_subcommand("list", "list registered experiments");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& e : qlab::list_experiments()) {
            std::cout << e.name << "\t[" << e.criteria << "]\tparams: " << e.params_help << "\n";
        }
        return 0;
    }

    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "cannot open config: " << config_path << "\n";
            return 2;
        }
        nlohmann::json j;
        in >> j;
        qlab::ExperimentConfig cfg;
        cfg.experiment = j.at("experiment").get<std::string>();
        cfg.seed = j.value("seed", 1ull);
        cfg.params = j.value("params", nlohmann::json::object());
        cfg.out_dir = j.value("out_dir", std::string("."));
        cfg.strict_mode = j.value("strict_mode", false);
        cfg.emit_hidden = j.value("emit_hidden", false);
        if (have_seed) cfg.seed = seed_override;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (strict) cfg.strict_mode = true;
        if (emit_hidden) cfg.emit_hidden = true;
        cfg.jobs = jobs;

        auto rec = qlab::run_experiment(cfg);
        for (const auto& [name, ok] : rec.pass)
            std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        std::cout << "result.json written to " << cfg.out_dir << "\n";
        return rec.all_pass() ? 0 : 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}
