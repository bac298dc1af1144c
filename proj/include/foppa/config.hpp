#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "foppa/identify.hpp"
#include "foppa/ingest.hpp"
#include "foppa/merge.hpp"
#include "foppa/normalize.hpp"
#include "foppa/registry.hpp"

namespace foppa {

struct InputPaths {
    std::vector<std::filesystem::path> ted;
    std::filesystem::path entities;
    std::filesystem::path facilities;
    std::filesystem::path postal;           // optional
    std::filesystem::path activity;         // optional, CPV -> activity prefixes
    std::filesystem::path lexicon;          // optional, criterion keywords
    std::filesystem::path contractNotices;  // optional, for notice coverage
    std::filesystem::path truth;            // optional, occurrenceId,siret
};

struct PipelineConfig {
    InputPaths inputs;
    std::filesystem::path output = "out";

    ingest::IngestConfig ingest;
    registry::RegistryColumns registryColumns;
    std::string postalCityColumn = "city";
    std::string postalZipColumn = "zipcode";
    std::string contractNoticeColumn = "ID_NOTICE_CN";
    normalize::AddressConfig address;
    identify::MatchConfig match;
    merge::MergeConfig merge;

    std::uint64_t seed = 42;
    int jobs = 1;
    std::uint64_t samplePerRole = 250;
};

/// Every problem found in `config`, empty when valid: thresholds outside
/// [0,1], negative or all-zero weights, missing input files, bad period.
std::vector<std::string> validate_config(const PipelineConfig& config);

/// Parses a JSON config. Relative paths are resolved against the config
/// file's directory. Unknown keys are errors. Throws ConfigError carrying
/// every parse and validation problem, one per line.
PipelineConfig load_config(const std::filesystem::path& path);
/// Same, from JSON text; relative paths resolve against `baseDir`.
PipelineConfig parse_config(const std::string& json, const std::filesystem::path& baseDir);

}  // namespace foppa
