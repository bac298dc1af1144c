// Command-line driver: one subcommand per stage plus `pipeline`.
#include <iostream>

#include <CLI11.hpp>

#include "foppa/config.hpp"
#include "foppa/pipeline.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kInput = 3, kInvariant = 4 };

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    bool mask = false;
    std::string stageFrom;
    std::string stageTo;
    bool quiet = false;
};

foppa::PipelineConfig resolve(const Options& opt) {
    auto config = foppa::load_config(opt.config);
    if (!opt.out.empty()) config.output = opt.out;
    if (opt.seed) config.seed = *opt.seed;
    if (opt.jobs) {
        if (*opt.jobs < 1) throw foppa::ConfigError("--jobs must be at least 1");
        config.jobs = *opt.jobs;
    }
    return config;
}

foppa::pipeline::Stage stage_arg(const std::string& text, foppa::pipeline::Stage fallback) {
    if (text.empty()) return fallback;
    auto s = foppa::pipeline::parse_stage(text);
    if (!s) throw foppa::ConfigError("unknown stage '" + text + "'");
    return *s;
}

}  // namespace

int main(int argc, char** argv) {
    using foppa::pipeline::Stage;

    CLI::App app{"Builds a relational procurement database from TED award notices"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config, "JSON configuration file")->required();
        sub->add_option("-o,--out", opt.out, "Output directory (overrides the config)");
        sub->add_option("--seed", opt.seed, "Random seed (overrides the config)");
        sub->add_option("-j,--jobs", opt.jobs, "Worker threads (overrides the config)");
        sub->add_flag("-q,--quiet", opt.quiet, "No progress lines");
    };

    std::vector<std::pair<CLI::App*, Stage>> stageCommands;
    for (auto stage : foppa::pipeline::all_stages()) {
        const std::string name(foppa::pipeline::to_string(stage));
        auto* sub = app.add_subcommand(name, "Run the " + name + " stage from the previous checkpoint");
        common(sub);
        if (stage == Stage::Evaluate) sub->add_flag("--mask", opt.mask, "Hide known SIRETs and rerun to score them");
        stageCommands.emplace_back(sub, stage);
    }
    auto* pipe = app.add_subcommand("pipeline", "Run all stages in order");
    common(pipe);
    pipe->add_flag("--mask", opt.mask, "Evaluate with known SIRETs hidden");
    pipe->add_option("--stage-from", opt.stageFrom, "First stage to run");
    pipe->add_option("--stage-to", opt.stageTo, "Last stage to run");
    auto* check = app.add_subcommand("validate", "Check a configuration file and exit");
    check->add_option("-c,--config", opt.config, "JSON configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (check->parsed()) {
            foppa::load_config(opt.config);
            std::cout << "configuration ok\n";
            return kOk;
        }
        const auto config = resolve(opt);
        std::ostream* log = opt.quiet ? nullptr : &std::cerr;
        if (pipe->parsed()) {
            foppa::pipeline::run_stages(config, stage_arg(opt.stageFrom, Stage::Ingest),
                                        stage_arg(opt.stageTo, Stage::Evaluate), opt.mask, log);
            return kOk;
        }
        for (auto [sub, stage] : stageCommands)
            if (sub->parsed()) foppa::pipeline::run_stages(config, stage, stage, opt.mask, log);
        return kOk;
    } catch (const foppa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const foppa::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const foppa::InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return kInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOther;
    }
}
