#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/runner.hpp"
#include "qwalk/scenario.hpp"

namespace {

// A path to an INI file, or the name of a catalog entry.
qwalk::ScenarioSpec load(const std::string& config) {
    if (std::filesystem::exists(config)) return qwalk::parse_scenario_file(config);
    if (const auto* entry = qwalk::find_catalog(config)) return qwalk::parse_scenario_text(entry->text);
    throw qwalk::ConfigError(config, "no such file or catalog scenario");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qwalk: lattice random-walk ensembles and their closed-form references"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed, np;
    std::optional<std::int64_t> nt;
    std::optional<std::string> out_dir, model;

    auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
    run->add_option("config", config, "INI file or catalog name")->required();
    run->add_option("--seed", seed, "master seed");
    run->add_option("--np", np, "number of emissions");
    run->add_option("--nt", nt, "number of iterations per emission");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--model", model, "M, Mstar or Mstarstar");

    auto* validate = app.add_subcommand("validate", "parse and check a scenario");
    validate->add_option("config", config, "INI file or catalog name")->required();

    auto* list = app.add_subcommand("list-scenarios", "list the built-in catalog");
    bool show_text = false;
    list->add_flag("--show", show_text, "print each entry's configuration");

    auto* theory = app.add_subcommand("print-theory", "print closed-form reference values");
    theory->add_option("config", config, "INI file or catalog name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& e : qwalk::catalog()) {
                std::cout << e.name << "\t" << e.description << "\n";
                if (show_text) std::cout << e.text << "\n";
            }
            return 0;
        }

        qwalk::ScenarioSpec spec = load(config);
        if (validate->parsed()) {
            std::cout << "ok " << spec.name << " " << qwalk::hash_hex(qwalk::scenario_hash(spec)) << "\n";
            return 0;
        }
        if (theory->parsed()) {
            std::cout << qwalk::summary_text(qwalk::theory_summary(spec));
            return 0;
        }

        if (seed) spec.seed = *seed;
        if (np) spec.np = *np;
        if (nt) spec.nt = *nt;
        if (out_dir) spec.out_dir = *out_dir;
        if (model) spec.model = qwalk::parse_model(*model);
        if (spec.replicas > spec.np) spec.replicas = static_cast<unsigned>(spec.np);
        qwalk::validate(spec);

        const auto start = std::chrono::steady_clock::now();
        const auto result = qwalk::run_scenario(spec, qwalk::thread_count());
        const auto files = qwalk::write_artifacts(result, spec.out_dir);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << qwalk::summary_text(result.summary);
        for (const auto& f : files) std::cerr << "wrote " << f << "\n";
        std::cerr << "elapsed " << secs << " s\n";
        return 0;
    } catch (const qwalk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qwalk::BosonCapError& e) {
        std::cerr << "memory cap: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
