#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "foppa/normalize.hpp"
#include "foppa/registry.hpp"
#include "foppa/types.hpp"

namespace foppa::identify {

struct AddressWeights {
    double street = 0.40;
    double zipcode = 0.35;
    double city = 0.25;
};

struct MatchConfig {
    double nameThreshold = 0.80;
    AddressWeights addressWeights;
    double minScore = 0.30;
    int activityPrefixLength = 2;
    /// Search the whole registry when neither department nor activity can
    /// restrict the candidates.
    bool allowUnblocked = false;
};

enum PresenceBit : std::uint8_t { kStreet = 1, kZipcode = 2, kCity = 4 };

struct AddressScore {
    double score = 0.0;
    std::uint8_t presenceMask = 0;
};

/// Weighted mean of per-field similarities over the fields present on both
/// sides (weights of the others are redistributed). Zipcodes score 1 when
/// equal, 0.5 in the same department, 0 otherwise; street and city use
/// name_similarity. No comparable field gives 0 with an empty mask.
AddressScore address_score(const normalize::Address& a, const normalize::Address& b, const AddressWeights& w);

/// What one occurrence brings to the registry search.
struct MatchQuery {
    std::string name;
    normalize::Address address;
    std::string department;
    std::optional<Date> date;
    /// Compatible activity prefixes; nullopt when the lot's activity cannot
    /// be mapped (the activity filter is then skipped).
    std::optional<std::set<std::string>> activityPrefixes;
};

/// Query for one occurrence. Activity prefixes come from the lot's CPV code
/// and only constrain winners.
MatchQuery make_query(const AgentOccurrence& occ, const LotRecord* lot, const registry::ActivityTable* activity);

/// Facility passes the activity filter: its own or its parent's prefix is
/// compatible, or neither carries an activity code.
bool activity_compatible(const registry::Registry& reg, const registry::RegistryFacility& f,
                         const std::set<std::string>& prefixes);

struct BlockResult {
    std::vector<std::uint32_t> facilities;  // ascending
    bool unblockable = false;
};

/// Candidates consistent with department, date and activity; a filter whose
/// datum is absent is skipped. When neither department nor activity is
/// available the query is unblockable and the result is empty unless
/// config.allowUnblocked.
BlockResult candidate_block(const MatchQuery& query, const registry::Registry& reg, const MatchConfig& config);

/// Best similarity between `name` and the facility's names (its parent's
/// legal names when the facility has none).
double facility_name_similarity(std::string_view name, const registry::Registry& reg,
                                const registry::RegistryFacility& f);

struct CandidateScore {
    std::uint32_t facility = 0;
    double nameSimilarity = 0.0;
    double addressScore = 0.0;
    std::uint8_t presenceMask = 0;
    bool operator==(const CandidateScore&) const = default;
};

enum class FailureStage { None, Unblockable, Blocking, Name, Address };
std::string_view to_string(FailureStage stage);
FailureStage parse_failure_stage(std::string_view text);

struct MatchResult {
    std::optional<Identifier> identifier;
    std::optional<CandidateScore> best;
    FailureStage failure = FailureStage::None;
    std::size_t blocked = 0;
    std::size_t afterName = 0;
    std::size_t afterAddress = 0;
    bool operator==(const MatchResult&) const = default;
};

/// Blocking, name filter (>= nameThreshold), address filter (>= minScore
/// unless nothing was comparable), then the candidate maximizing
/// (addressScore, nameSimilarity), smallest SIRET on ties.
MatchResult identify_occurrence(const MatchQuery& query, const registry::Registry& reg, const MatchConfig& config);

/// Identifies many queries, memoizing the date-independent part of the
/// search per distinct description. Output is positionally aligned with the
/// input and does not depend on `jobs`.
std::vector<MatchResult> identify_all(const std::vector<MatchQuery>& queries, const registry::Registry& reg,
                                      const MatchConfig& config, int jobs = 1);

}  // namespace foppa::identify
