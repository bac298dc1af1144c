#pragma once

// Hand-built merge fixtures shared by the unit and acceptance suites.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "foppa/merge.hpp"
#include "foppa/types.hpp"
#include "oracles.hpp"

namespace fixtures {

struct PlannedCluster {
    std::vector<std::string> ids;  // per member: "" none, 9 or 14 digits otherwise
    std::vector<bool> complete;    // per member: has a street (empty = all complete)
    foppa::merge::CaseKind expectKind;
    std::string expectId;
};

inline foppa::Identifier make_id(const std::string& v) {
    return v.size() == 9 ? foppa::Identifier::siren_only(v) : foppa::Identifier::full_siret(v);
}

// Twenty clusters covering the four cases and every tie-break. Each has its
// own blocking key; members of one cluster are identical apart from the
// street, so they always cluster together.
inline std::vector<PlannedCluster> twenty_clusters() {
    using K = foppa::merge::CaseKind;
    const std::string s1 = "10000000100011", s2 = "10000000200011", s3 = "10000000300011";
    const std::string s8 = "10000000800011", s9 = "10000000900011", siren = "100000001";
    return {
        {{""}, {}, K::Singleton, "U000001"},
        {{s1}, {}, K::Singleton, s1},
        {{s1, s1, s2}, {}, K::ConflictingIds, s1},
        {{"", ""}, {}, K::AllUnidentified, "U000002"},
        {{s1, "", ""}, {}, K::SingleIdentified, s1},
        {{s2, s1}, {}, K::ConflictingIds, s1},
        {{s2, s1}, {true, false}, K::ConflictingIds, s2},
        {{s1, siren}, {}, K::ConflictingIds, siren},
        {{s3, s3, s3}, {}, K::SingleIdentified, s3},
        {{"", "", ""}, {}, K::AllUnidentified, "U000003"},
        {{s1, s2, s2, ""}, {}, K::ConflictingIds, s2},
        {{""}, {}, K::Singleton, "U000004"},
        {{s3, s2, s1}, {}, K::ConflictingIds, s1},
        {{s1, ""}, {false, true}, K::SingleIdentified, s1},
        {{s3, s3, s1, s1, s2}, {}, K::ConflictingIds, s1},
        {{"", "", "", ""}, {}, K::AllUnidentified, "U000005"},
        {{s9}, {}, K::Singleton, s9},
        {{s9, s8, s8}, {true, false, false}, K::ConflictingIds, s8},
        {{"", s2}, {}, K::SingleIdentified, s2},
        {{"", ""}, {}, K::AllUnidentified, "U000006"},
    };
}

inline std::vector<foppa::AgentOccurrence> occurrences_for(const std::vector<PlannedCluster>& plan) {
    std::vector<foppa::AgentOccurrence> out;
    foppa::OccurrenceId id = 1;
    for (std::size_t k = 0; k < plan.size(); ++k) {
        const auto& c = plan[k];
        for (std::size_t m = 0; m < c.ids.size(); ++m) {
            foppa::AgentOccurrence o;
            o.occurrenceId = id++;
            o.lotId = 1;
            o.role = foppa::Role::Winner;
            o.normalizedName = std::string("Q") + static_cast<char>('A' + k) + "XZ SOCIETE GENERALE DE TEST";
            o.rawName = o.normalizedName;
            const bool complete = c.complete.empty() || c.complete[m];
            if (complete) o.normStreet = "1 RUE DU TEST";
            o.normZipcode = "69001";
            o.normCity = "LYON";
            o.department = "69";
            if (!c.ids[m].empty()) {
                o.identifier = make_id(c.ids[m]);
                o.idSource = foppa::IdSource::Declared;
            }
            out.push_back(o);
        }
    }
    return out;
}

// Occurrences drawn from a small vocabulary so blocks collide and
// near-duplicates chain.
inline std::vector<foppa::AgentOccurrence> random_occurrences(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::vector<std::string> heads = {"MAIRIE", "MAIRE", "SOCIETE", "SOCIAL", "ACME", "ACMEE", ""};
    const std::vector<std::string> tails = {"DE LYON", "DE LYONS", "DU NORD", "BTP", "DES EAUX", "DE LION", ""};
    const std::vector<std::string> streets = {"", "1 RUE A", "1 RUE B", "2 AVENUE C"};
    const std::vector<std::string> zips = {"", "69001", "69002", "75001"};
    const std::vector<std::string> cities = {"", "LYON", "LYONS", "PARIS"};
    std::vector<foppa::AgentOccurrence> out;
    for (std::size_t i = 0; i < n; ++i) {
        foppa::AgentOccurrence o;
        o.occurrenceId = static_cast<foppa::OccurrenceId>(i + 1);
        o.lotId = 1;
        std::string name = heads[rng() % heads.size()];
        const auto& t = tails[rng() % tails.size()];
        if (!t.empty()) name += (name.empty() ? "" : " ") + t;
        o.normalizedName = name;
        o.rawName = name;
        o.normStreet = streets[rng() % streets.size()];
        o.normZipcode = zips[rng() % zips.size()];
        o.normCity = cities[rng() % cities.size()];
        o.department = oracle::department(o.normZipcode);
        if (rng() % 4 == 0) o.identifier = foppa::Identifier::full_siret(std::to_string(10000000000000ull + rng() % 5));
        out.push_back(o);
    }
    return out;
}

// Similarity rule restated: same 4-character head and department, then the
// averaged name/address score (name alone when no address part compares).
inline bool oracle_similar(const foppa::AgentOccurrence& a, const foppa::AgentOccurrence& b, double threshold,
                           const foppa::identify::AddressWeights& w) {
    if (a.normalizedName.empty() || b.normalizedName.empty()) return false;
    auto key = [](const foppa::AgentOccurrence& o) {
        const auto first = oracle::tokens(o.normalizedName).front();
        return first.substr(0, 4) + "|" + (o.department.empty() ? "??" : o.department);
    };
    if (key(a) != key(b)) return false;
    std::uint8_t mask = 0;
    const double addr = oracle::address_score({a.normStreet, a.normZipcode, a.normCity},
                                              {b.normStreet, b.normZipcode, b.normCity}, w, &mask);
    const double name = oracle::name_similarity(a.normalizedName, b.normalizedName);
    const double s = mask == 0 ? name : 0.5 * name + 0.5 * addr;
    return s >= threshold;
}

// A random clustering of random agents: each agent's occurrences are spread
// over a few clusters, some of which are shared with other agents.
struct RandomClustering {
    std::vector<foppa::merge::AgentCluster> clusters;
    std::vector<std::vector<foppa::OccurrenceId>> agents;
};

inline RandomClustering random_clustering(std::mt19937_64& rng) {
    RandomClustering out;
    const std::size_t nAgents = 1 + rng() % 6;
    const std::size_t nClusters = 1 + rng() % 8;
    std::vector<std::vector<foppa::OccurrenceId>> members(nClusters);
    foppa::OccurrenceId next = 1;
    for (std::size_t a = 0; a < nAgents; ++a) {
        std::vector<foppa::OccurrenceId> occ;
        const std::size_t n = 1 + rng() % 6;
        for (std::size_t k = 0; k < n; ++k) {
            occ.push_back(next);
            members[rng() % nClusters].push_back(next);
            ++next;
        }
        out.agents.push_back(occ);
    }
    std::int64_t id = 1;
    for (auto& m : members) {
        if (m.empty()) continue;
        foppa::merge::AgentCluster c;
        c.clusterId = id++;
        std::sort(m.begin(), m.end());
        c.members = m;
        out.clusters.push_back(c);
    }
    return out;
}

}  // namespace fixtures
