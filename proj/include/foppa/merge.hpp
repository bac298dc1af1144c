#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "foppa/identify.hpp"
#include "foppa/types.hpp"

namespace foppa::merge {

struct MergeConfig {
    double threshold = 0.85;
    identify::AddressWeights addressWeights;
};

/// First 4 characters of the first name token, "|", department ("??" when
/// absent). Nullopt for an empty name: such occurrences stay singletons.
std::optional<std::string> blocking_key(const AgentOccurrence& occ);

/// 0.5 * name similarity + 0.5 * address score. When no address field is
/// comparable the name similarity alone is used.
double pair_similarity(const AgentOccurrence& a, const AgentOccurrence& b, const identify::AddressWeights& w);

enum class CaseKind { Singleton, ConflictingIds, AllUnidentified, SingleIdentified };
std::string_view to_string(CaseKind kind);
std::optional<CaseKind> parse_case_kind(std::string_view text);

struct AgentCluster {
    std::int64_t clusterId = 0;
    std::vector<OccurrenceId> members;  // ascending
    CaseKind caseKind = CaseKind::Singleton;
    std::optional<Identifier> resolvedIdentifier;
    bool operator==(const AgentCluster&) const = default;
};

/// Transitive closure of pairs with pair_similarity >= threshold inside
/// equal blocking keys. Members are positions in `occurrences`; clusters are
/// ordered by their smallest member and carry no resolution yet.
std::vector<std::vector<std::size_t>> cluster_occurrences(const std::vector<AgentOccurrence>& occurrences,
                                                          const MergeConfig& config, int jobs = 1);

/// Hands out internal codes U000001, U000002, ...
class InternalCodeCounter {
public:
    explicit InternalCodeCounter(std::uint64_t next = 1) : next_(next) {}
    Identifier next() { return Identifier::internal_code(next_++); }

private:
    std::uint64_t next_;
};

/// Count of present fields among name, street, zipcode, city.
int field_completeness(const AgentOccurrence& occ);

struct Resolution {
    CaseKind caseKind = CaseKind::Singleton;
    Identifier identifier = Identifier::internal_code(0);
};

/// Case analysis of one cluster. Registry identifiers (SIRET/SIREN) are
/// compared by value; the majority wins, then the one carried by the most
/// field-complete member, then the smallest. Unidentified clusters draw a
/// fresh internal code from `codes`.
Resolution resolve_cluster(const std::vector<const AgentOccurrence*>& members, InternalCodeCounter& codes);

struct CanonicalAgent {
    Identifier agentId = Identifier::internal_code(0);
    std::vector<std::string> names;  // sorted, distinct
    std::string street;
    std::string zipcode;
    std::string city;
    std::string department;
    std::string country;
    std::vector<OccurrenceId> memberOccurrenceIds;  // ascending
    bool operator==(const CanonicalAgent&) const = default;
};

/// Field-wise majority over present values; ties go to the value held by the
/// most field-complete member, then to the smallest value.
CanonicalAgent merge_records(const Identifier& agentId, const std::vector<const AgentOccurrence*>& members);

struct MergeResult {
    std::vector<AgentCluster> clusters;
    std::vector<CanonicalAgent> agents;  // sorted by agentId
    std::map<OccurrenceId, Identifier> occurrenceAgent;
};

/// Clusters, resolves every cluster, writes the resolved identifier back
/// into the occurrences (source Cluster / Internal when it changed) and
/// builds one canonical agent per distinct identifier.
MergeResult merge_occurrences(std::vector<AgentOccurrence>& occurrences, const MergeConfig& config, int jobs = 1);

/// Canonical agents from occurrences that already carry final identifiers.
std::vector<CanonicalAgent> build_agents(const std::vector<AgentOccurrence>& occurrences);

}  // namespace foppa::merge
