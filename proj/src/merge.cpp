#include "foppa/merge.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "foppa/parallel.hpp"
#include "foppa/similarity.hpp"

namespace foppa::merge {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<int> rank_;
};

std::string signature(const AgentOccurrence& o) {
    return o.normalizedName + '\x1f' + o.normStreet + '\x1f' + o.normZipcode + '\x1f' + o.normCity;
}

// Majority value with the documented tie-breaks; `values[i]` belongs to
// `members[i]`, empty values are ignored.
std::string majority(const std::vector<std::string>& values, const std::vector<const AgentOccurrence*>& members) {
    struct Tally {
        int count = 0;
        int bestCompleteness = -1;
    };
    std::map<std::string, Tally> tally;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].empty()) continue;
        auto& t = tally[values[i]];
        ++t.count;
        t.bestCompleteness = std::max(t.bestCompleteness, field_completeness(*members[i]));
    }
    const std::string* best = nullptr;
    Tally bestTally;
    for (const auto& [value, t] : tally) {  // ascending, so ties keep the smallest
        if (!best || t.count > bestTally.count ||
            (t.count == bestTally.count && t.bestCompleteness > bestTally.bestCompleteness)) {
            best = &value;
            bestTally = t;
        }
    }
    return best ? *best : std::string{};
}

}  // namespace

std::optional<std::string> blocking_key(const AgentOccurrence& occ) {
    const auto& name = occ.normalizedName;
    if (name.empty()) return std::nullopt;
    const auto firstToken = name.substr(0, name.find(' '));
    return firstToken.substr(0, 4) + "|" + (occ.department.empty() ? std::string("??") : occ.department);
}

double pair_similarity(const AgentOccurrence& a, const AgentOccurrence& b, const identify::AddressWeights& w) {
    const double name = similarity::name_similarity(a.normalizedName, b.normalizedName);
    const auto addr = identify::address_score({a.normStreet, a.normZipcode, a.normCity},
                                              {b.normStreet, b.normZipcode, b.normCity}, w);
    if (addr.presenceMask == 0) return name;
    return 0.5 * name + 0.5 * addr.score;
}

std::string_view to_string(CaseKind kind) {
    switch (kind) {
    case CaseKind::Singleton: return "SINGLETON";
    case CaseKind::ConflictingIds: return "CONFLICTING_IDS";
    case CaseKind::AllUnidentified: return "ALL_UNIDENTIFIED";
    case CaseKind::SingleIdentified: return "SINGLE_IDENTIFIED";
    }
    return "";
}

std::optional<CaseKind> parse_case_kind(std::string_view text) {
    if (text == "SINGLETON") return CaseKind::Singleton;
    if (text == "CONFLICTING_IDS") return CaseKind::ConflictingIds;
    if (text == "ALL_UNIDENTIFIED") return CaseKind::AllUnidentified;
    if (text == "SINGLE_IDENTIFIED") return CaseKind::SingleIdentified;
    return std::nullopt;
}

std::vector<std::vector<std::size_t>> cluster_occurrences(const std::vector<AgentOccurrence>& occurrences,
                                                          const MergeConfig& config, int jobs) {
    const std::size_t n = occurrences.size();
    UnionFind uf(n);

    // Blocks of distinct signatures; identical descriptions are united
    // directly since their similarity is 1.
    std::map<std::string, std::vector<std::size_t>> blocks;  // key -> representative positions
    std::unordered_map<std::string, std::size_t> sigRep;
    for (std::size_t i = 0; i < n; ++i) {
        auto key = blocking_key(occurrences[i]);
        if (!key) continue;
        auto [it, inserted] = sigRep.emplace(*key + '\x1e' + signature(occurrences[i]), i);
        if (inserted)
            blocks[*key].push_back(i);
        else
            uf.unite(it->second, i);
    }

    std::vector<const std::vector<std::size_t>*> blockList;
    for (const auto& [key, members] : blocks)
        if (members.size() > 1) blockList.push_back(&members);

    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> links(blockList.size());
    parallel_for(blockList.size(), jobs, [&](std::size_t b) {
        const auto& m = *blockList[b];
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = i + 1; j < m.size(); ++j)
                if (pair_similarity(occurrences[m[i]], occurrences[m[j]], config.addressWeights) >= config.threshold)
                    links[b].emplace_back(m[i], m[j]);
    });
    for (const auto& l : links)
        for (auto [a, b] : l) uf.unite(a, b);

    std::map<std::size_t, std::vector<std::size_t>> byRoot;
    for (std::size_t i = 0; i < n; ++i) byRoot[uf.find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> clusters;
    clusters.reserve(byRoot.size());
    for (auto& [root, members] : byRoot) clusters.push_back(std::move(members));
    std::sort(clusters.begin(), clusters.end(), [&](const auto& a, const auto& b) {
        return occurrences[a.front()].occurrenceId < occurrences[b.front()].occurrenceId;
    });
    return clusters;
}

int field_completeness(const AgentOccurrence& occ) {
    return !occ.normalizedName.empty() + !occ.normStreet.empty() + !occ.normZipcode.empty() + !occ.normCity.empty();
}

Resolution resolve_cluster(const std::vector<const AgentOccurrence*>& members, InternalCodeCounter& codes) {
    if (members.empty()) throw std::invalid_argument("resolve_cluster: empty cluster");
    std::vector<std::string> ids;
    std::set<std::string> distinct;
    std::map<std::string, Identifier> byValue;
    for (const auto* m : members) {
        if (m->identifier && m->identifier->is_registry_id()) {
            ids.push_back(m->identifier->value());
            distinct.insert(m->identifier->value());
            byValue.emplace(m->identifier->value(), *m->identifier);
        } else {
            ids.emplace_back();
        }
    }

    Resolution r;
    if (members.size() == 1)
        r.caseKind = CaseKind::Singleton;
    else if (distinct.empty())
        r.caseKind = CaseKind::AllUnidentified;
    else if (distinct.size() == 1)
        r.caseKind = CaseKind::SingleIdentified;
    else
        r.caseKind = CaseKind::ConflictingIds;

    if (distinct.empty())
        r.identifier = codes.next();
    else
        r.identifier = byValue.at(majority(ids, members));
    return r;
}

CanonicalAgent merge_records(const Identifier& agentId, const std::vector<const AgentOccurrence*>& members) {
    CanonicalAgent agent;
    agent.agentId = agentId;
    std::vector<std::string> street, zip, city, dept, country;
    std::set<std::string> names;
    for (const auto* m : members) {
        street.push_back(m->normStreet);
        zip.push_back(m->normZipcode);
        city.push_back(m->normCity);
        dept.push_back(m->department);
        country.push_back(m->country);
        if (!m->normalizedName.empty()) names.insert(m->normalizedName);
        agent.memberOccurrenceIds.push_back(m->occurrenceId);
    }
    if (names.empty())
        for (const auto* m : members)
            if (!m->rawName.empty()) names.insert(m->rawName);
    agent.names.assign(names.begin(), names.end());
    agent.street = majority(street, members);
    agent.zipcode = majority(zip, members);
    agent.city = majority(city, members);
    agent.department = majority(dept, members);
    agent.country = majority(country, members);
    std::sort(agent.memberOccurrenceIds.begin(), agent.memberOccurrenceIds.end());
    return agent;
}

std::vector<CanonicalAgent> build_agents(const std::vector<AgentOccurrence>& occurrences) {
    std::map<Identifier, std::vector<const AgentOccurrence*>> groups;
    for (const auto& o : occurrences) {
        if (!o.identifier) throw InvariantViolation("occurrence " + std::to_string(o.occurrenceId) + " has no agent");
        groups[*o.identifier].push_back(&o);
    }
    std::vector<CanonicalAgent> agents;
    agents.reserve(groups.size());
    for (const auto& [id, members] : groups) agents.push_back(merge_records(id, members));
    return agents;
}

MergeResult merge_occurrences(std::vector<AgentOccurrence>& occurrences, const MergeConfig& config, int jobs) {
    MergeResult result;
    const auto clusters = cluster_occurrences(occurrences, config, jobs);

    // Serial pass in cluster order (smallest occurrence id first) so internal
    // codes are stable across runs.
    InternalCodeCounter codes;
    std::vector<Resolution> resolutions;
    resolutions.reserve(clusters.size());
    for (const auto& c : clusters) {
        std::vector<const AgentOccurrence*> members;
        for (auto i : c) members.push_back(&occurrences[i]);
        resolutions.push_back(resolve_cluster(members, codes));
    }

    for (std::size_t k = 0; k < clusters.size(); ++k) {
        AgentCluster cluster;
        cluster.clusterId = static_cast<std::int64_t>(k + 1);
        cluster.caseKind = resolutions[k].caseKind;
        cluster.resolvedIdentifier = resolutions[k].identifier;
        for (auto i : clusters[k]) {
            auto& occ = occurrences[i];
            cluster.members.push_back(occ.occurrenceId);
            if (occ.identifier != resolutions[k].identifier) {
                occ.identifier = resolutions[k].identifier;
                occ.idSource = resolutions[k].identifier.is_registry_id() ? IdSource::Cluster : IdSource::Internal;
            }
        }
        std::sort(cluster.members.begin(), cluster.members.end());
        result.clusters.push_back(std::move(cluster));
    }

    result.agents = build_agents(occurrences);
    for (const auto& o : occurrences) result.occurrenceAgent.emplace(o.occurrenceId, *o.identifier);
    return result;
}

}  // namespace foppa::merge
