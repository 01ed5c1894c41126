// Command line front end. Verbs map one-to-one onto the runners in kfp::cli.
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kfp/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"kinetic flocking PDE toolkit"};
    app.require_subcommand(1);

    struct Common {
        std::string config;
        std::string out = "out";
        std::uint64_t seed = 1;
        std::vector<std::string> overrides;
    };

    // The five config-driven verbs share a flag set; compare has its own.
    std::vector<std::pair<std::string, std::string>> verbs = {
        {"simulate", "march the evolution equation and dump the trajectory"},
        {"picard", "fixed point solve with the smallness certificate"},
        {"optimize", "projected gradient on the tracking functional"},
        {"particles", "interacting particle ensembles vs the PDE density"},
        {"verify", "identity and inequality suites plus constant estimation"},
    };
    std::vector<std::shared_ptr<Common>> states;
    std::vector<CLI::App*> subs;
    for (const auto& [name, desc] : verbs) {
        auto st = std::make_shared<Common>();
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", st->config, "JSON config file (defaults used if absent)")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", st->seed, "RNG seed, part of the run identity");
        sub->add_option("--out", st->out, "output directory");
        sub->add_option("--override", st->overrides,
                        "config override key.path=value, repeatable");
        states.push_back(st);
        subs.push_back(sub);
    }

    std::string cmp_a, cmp_b, cmp_out;
    kfp::cli::CompareOptions cmp_opts;
    CLI::App* cmp = app.add_subcommand("compare", "diff CSV artifacts of two runs");
    cmp->add_option("a", cmp_a, "first CSV file or run directory")->required();
    cmp->add_option("b", cmp_b, "second CSV file or run directory")->required();
    cmp->add_option("--atol", cmp_opts.atol, "absolute tolerance for pass/fail");
    cmp->add_option("--rtol", cmp_opts.rtol, "relative tolerance for pass/fail");
    cmp->add_flag("--require-identical", cmp_opts.require_identical,
                  "fail on any numeric difference");
    cmp->add_option("--out", cmp_out, "directory for the diff report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kfp::cli::kExitConfig;
    }

    if (cmp->parsed())
        return kfp::cli::run_compare(cmp_a, cmp_b, cmp_opts, cmp_out);
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed())
            return kfp::cli::run_verb(verbs[i].first, states[i]->config,
                                      states[i]->overrides, states[i]->seed,
                                      states[i]->out);
    return kfp::cli::kExitConfig;
}
