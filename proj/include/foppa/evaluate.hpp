#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "foppa/merge.hpp"
#include "foppa/types.hpp"

namespace foppa::evaluate {

enum class MatchOutcome { Full, Partial, Incorrect, None };
std::string_view to_string(MatchOutcome outcome);

/// FULL: same identifier. PARTIAL: same SIREN, different identifier.
/// INCORRECT: another SIREN. NONE: nothing, or only an internal code.
MatchOutcome classify_outcome(const std::optional<Identifier>& predicted, const Identifier& truth);

/// Ground truth: occurrence -> true SIRET.
using Truth = std::map<OccurrenceId, Identifier>;

/// CSV with columns occurrenceId,siret.
Truth load_truth(const std::filesystem::path& path);

struct Sample {
    std::vector<OccurrenceId> occurrences;  // one representative per sampled agent
    std::map<Role, std::size_t> shortfall;  // requested minus available, when positive
};

/// Seeded uniform sample without replacement of `perRole` distinct agents per
/// role among occurrences with both a name and a city. An agent is a
/// distinct (role, normalized name, normalized city); its representative is
/// its smallest occurrence id.
Sample sample_ground_truth(const std::vector<AgentOccurrence>& occurrences, std::size_t perRole, std::uint64_t seed);

/// occurrence -> cluster, and cluster sizes.
struct Clustering {
    std::map<OccurrenceId, std::int64_t> clusterOf;
    std::map<std::int64_t, std::size_t> size;

    static Clustering from(const std::vector<merge::AgentCluster>& clusters);
};

/// Largest share of the agent's occurrences found in one cluster; nullopt
/// when the agent has no occurrence.
std::optional<double> concentration_ratio(const std::vector<OccurrenceId>& agentOccurrences, const Clustering& c);

/// Share of the agent's occurrences that are singleton clusters.
std::optional<double> singleton_ratio(const std::vector<OccurrenceId>& agentOccurrences, const Clustering& c);

struct Histogram {
    std::vector<std::string> labels;
    std::vector<std::size_t> counts;

    std::size_t total() const;
    std::vector<double> percentages() const;
};

/// Cluster sizes binned 1,2,3,4,5,6+.
Histogram cluster_size_distribution(const std::vector<merge::AgentCluster>& clusters);
/// Distinct registry identifiers per cluster, before resolution, binned 0..4,5+.
Histogram distinct_identifier_distribution(const std::vector<merge::AgentCluster>& clusters,
                                           const std::map<OccurrenceId, std::optional<Identifier>>& before);
/// Ratio values binned in tenths: [0,0.1), ..., [0.9,1.0), and exactly 1.
Histogram ratio_distribution(const std::vector<double>& ratios);

struct OutcomeCounts {
    std::array<std::size_t, 4> counts{};  // indexed by MatchOutcome
    std::size_t total() const;
    double percent(MatchOutcome o) const;
};

using Snapshot = std::map<OccurrenceId, std::optional<Identifier>>;

struct StageRow {
    std::string stage;
    std::size_t correct = 0;
    std::size_t incorrect = 0;
    std::size_t missing = 0;
};

/// Correct / incorrect / missing identifiers per stage over the occurrences
/// of `truth`. Entity-level success counts PARTIAL as correct, strict counts
/// it as incorrect.
std::vector<StageRow> stage_accounting(const std::vector<std::pair<std::string, Snapshot>>& stages,
                                       const Truth& truth, bool entityLevel);

struct NoticeCoverage {
    double unmatchedContractsPercent = 0.0;
    double unmatchedAwardsPercent = 0.0;
};

/// Share of contract notices no award notice cites, and of award notices
/// citing no known contract notice. Nullopt when either side is empty.
std::optional<NoticeCoverage> notice_coverage(const std::set<std::string>& contractNoticeIds,
                                              const std::map<std::string, std::string>& awardNoticeRefs);

/// Masked occurrences whose identifier was taken from the declaration, or
/// that got a declared-SIRET agent key: both mean a hidden value leaked.
std::vector<OccurrenceId> masking_leaks(const std::vector<AgentOccurrence>& occurrences,
                                        const std::set<OccurrenceId>& masked);

struct RoleOutcomes {
    OutcomeCounts occurrences;
    OutcomeCounts uniqueAgents;
};

/// Outcome per role over occurrences and over unique agents (distinct true
/// SIRET). A unique agent takes the most frequent outcome of its
/// occurrences, ties resolved FULL > PARTIAL > INCORRECT > NONE.
std::map<Role, RoleOutcomes> outcome_distribution(const std::vector<AgentOccurrence>& occurrences,
                                                  const Snapshot& predicted, const Truth& truth);

/// Clusters holding at least one truth-bearing occurrence, classified by
/// their distinct true SIRETs: one (Full), several sharing a SIREN
/// (Partial), several SIRENs (Incorrect).
OutcomeCounts clustering_outcomes(const std::vector<merge::AgentCluster>& clusters, const Truth& truth);

struct EvaluationReport {
    std::map<Role, RoleOutcomes> identification;
    std::map<Role, RoleOutcomes> afterClustering;
    std::vector<StageRow> stagesStrict;
    std::vector<StageRow> stagesEntity;
    Histogram clusterSizes;
    Histogram distinctIdentifiers;
    OutcomeCounts clusteringQuality;
    Histogram concentration;
    Histogram singleton;
    std::map<std::string, std::size_t> failureStages;
    std::optional<NoticeCoverage> coverage;
    std::size_t truthOccurrences = 0;
    bool masked = false;
    std::size_t maskingLeaks = 0;
};

std::string render_report(const EvaluationReport& report);
/// report.txt plus one CSV per metric under `directory`.
void write_report(const EvaluationReport& report, const std::filesystem::path& directory);

}  // namespace foppa::evaluate
