#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "foppa/config.hpp"
#include "foppa/criteria.hpp"
#include "foppa/emit.hpp"
#include "foppa/evaluate.hpp"
#include "foppa/identify.hpp"
#include "foppa/ingest.hpp"
#include "foppa/merge.hpp"
#include "foppa/normalize.hpp"
#include "foppa/registry.hpp"

namespace foppa::pipeline {

enum class Stage { Ingest, Criteria, Normalize, Identify, Merge, Emit, Evaluate };
std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view text);
const std::vector<Stage>& all_stages();

/// Identification snapshot names, in pipeline order.
inline constexpr const char* kSeparation = "separation";
inline constexpr const char* kNormalization = "normalization";
inline constexpr const char* kIdentification = "identification";
inline constexpr const char* kClustering = "clustering";

struct MatchLogEntry {
    OccurrenceId occurrenceId = 0;
    identify::MatchResult result;
    bool operator==(const MatchLogEntry&) const = default;
};

/// Everything a stage hands to the next one. Snapshots only hold present
/// identifiers.
struct State {
    Stage completed = Stage::Ingest;
    std::vector<LotRecord> lots;
    std::vector<AgentOccurrence> occurrences;
    std::vector<Criterion> criteria;
    std::set<LotId> criteriaFlagged;
    std::vector<ingest::RejectedRow> rejected;
    std::vector<std::pair<std::string, csv::MalformedLine>> skipped;
    std::size_t occurrencesBeforeSplit = 0;
    normalize::NormalizeStats normalizeStats;
    std::vector<MatchLogEntry> matchLog;
    std::vector<merge::AgentCluster> clusters;
    std::map<std::string, evaluate::Snapshot> snapshots;
};

bool operator==(const State& a, const State& b);

/// Lazily loaded reference data.
class Resources {
public:
    explicit Resources(const PipelineConfig& config) : config_(config) {}

    const registry::Registry& registry();
    const normalize::PostalTable& postal();
    /// Null when no activity table is configured.
    const registry::ActivityTable* activity();
    const criteria::Lexicon& lexicon();

private:
    const PipelineConfig& config_;
    std::unique_ptr<registry::Registry> registry_;
    std::unique_ptr<normalize::PostalTable> postal_;
    std::unique_ptr<registry::ActivityTable> activity_;
    bool activityLoaded_ = false;
    std::unique_ptr<criteria::Lexicon> lexicon_;
};

/// Identifier as literally declared: 14 digits (SIRET) or 9 digits (SIREN),
/// nothing stripped.
std::optional<Identifier> strict_declared(std::string_view raw);

State run_ingest(const PipelineConfig& config);
void run_criteria(State& state, const PipelineConfig& config, Resources& res);
void run_normalize(State& state, const PipelineConfig& config, Resources& res);
void run_identify(State& state, const PipelineConfig& config, Resources& res);
void run_merge(State& state, const PipelineConfig& config);
/// Builds the six tables; writes `tables/*.csv` and `foppa.sql` under the
/// output directory.
emit::OutputSchema run_emit(State& state, const PipelineConfig& config);

struct MaskedRun {
    std::set<OccurrenceId> masked;
    evaluate::Truth truth;
    State state;
    std::vector<OccurrenceId> leaks;
};

/// Hides the declared SIRET of every occurrence in `masked` and reruns
/// normalize, identify and merge from the ingested data in `state`.
MaskedRun mask_and_rerun(const State& state, const std::set<OccurrenceId>& masked, const PipelineConfig& config,
                         Resources& res);

/// Occurrences whose declared SIRET is a valid 14-digit SIRET.
std::set<OccurrenceId> known_siret_occurrences(const State& state);

/// Report over `state` (or over a masked rerun when `mask`); written under
/// `report/` or `report_masked/` of the output directory.
evaluate::EvaluationReport run_evaluate(State& state, const PipelineConfig& config, Resources& res, bool mask);

std::filesystem::path checkpoint_dir(const PipelineConfig& config, Stage stage);
void write_checkpoint(const State& state, const std::filesystem::path& dir);
/// Throws ConfigError when the checkpoint is absent.
State read_checkpoint(const std::filesystem::path& dir);

/// Runs stages from..to, reading the checkpoint before `from` when it is not
/// the first stage and writing a checkpoint after every stage.
State run_stages(const PipelineConfig& config, Stage from, Stage to, bool mask = false,
                 std::ostream* log = nullptr);

}  // namespace foppa::pipeline
