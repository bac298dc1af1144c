// Writes a synthetic fixture directory (reference data, TED table, truth,
// config.json) for demos and benchmarks.
#include <iostream>

#include <CLI11.hpp>

#include "synth/synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generates a synthetic procurement fixture"};
    std::string out;
    std::size_t lots = 0;
    std::size_t winners = 0;
    std::uint64_t seed = 0;
    int jobs = 1;
    app.add_option("-o,--out", out, "Fixture directory")->required();
    app.add_option("--lots", lots, "Number of lots (default: the 100-row golden fixture)");
    app.add_option("--winners", winners, "Winner entities in the registry (buyers are a third of it)");
    app.add_option("--seed", seed, "Generator seed");
    app.add_option("-j,--jobs", jobs, "jobs value written into config.json");
    CLI11_PARSE(app, argc, argv);

    auto spec = foppa::synth::golden_spec();
    if (lots) {
        spec.ted.lots = lots;
        spec.ted.malformed = 0;
        spec.ted.rejected = 0;
    }
    if (winners) {
        spec.registry.winners = winners;
        spec.registry.buyers = winners / 3;
    }
    if (seed) {
        spec.registry.seed = seed;
        spec.ted.seed = seed + 1;
    }
    spec.jobs = jobs;
    try {
        foppa::synth::write_fixture(spec, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "fixture written to " << out << "\n";
    return 0;
}
