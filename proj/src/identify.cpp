#include "foppa/identify.hpp"

#include <algorithm>
#include <unordered_map>

#include "foppa/parallel.hpp"
#include "foppa/similarity.hpp"

namespace foppa::identify {

namespace {

std::set<std::string> truncate_prefixes(const std::set<std::string>& prefixes, int length) {
    std::set<std::string> out;
    for (const auto& p : prefixes)
        if (static_cast<int>(p.size()) >= length) out.insert(p.substr(0, static_cast<std::size_t>(length)));
    return out;
}

bool passes_filters(const MatchQuery& q, const registry::Registry& reg, const registry::RegistryFacility& f,
                    const std::set<std::string>* prefixes, bool useDate) {
    if (!q.department.empty() && f.department != q.department) return false;
    if (useDate && q.date && !registry::temporally_valid(f, *q.date)) return false;
    if (prefixes && !activity_compatible(reg, f, *prefixes)) return false;
    return true;
}

// Candidates from blocking without the date filter; the date is applied
// per occurrence so that the expensive scoring can be shared.
BlockResult block_without_date(const MatchQuery& q, const registry::Registry& reg, const MatchConfig& config,
                               const std::set<std::string>* prefixes) {
    BlockResult out;
    const bool haveDept = !q.department.empty();
    if (!haveDept && !prefixes) {
        out.unblockable = true;
        if (!config.allowUnblocked) return out;
    }
    std::vector<std::uint32_t> pool;
    if (haveDept) {
        pool = reg.by_department(q.department);
    } else if (prefixes) {
        for (const auto& p : *prefixes) {
            const auto& l = reg.by_activity(p);
            pool.insert(pool.end(), l.begin(), l.end());
        }
        const auto& none = reg.by_activity("");
        pool.insert(pool.end(), none.begin(), none.end());
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    } else {
        pool.resize(reg.facilities().size());
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<std::uint32_t>(i);
    }
    for (auto idx : pool)
        if (passes_filters(q, reg, reg.facilities()[idx], prefixes, false)) out.facilities.push_back(idx);
    return out;
}

bool better(const CandidateScore& a, const CandidateScore& b, const registry::Registry& reg) {
    if (a.addressScore != b.addressScore) return a.addressScore > b.addressScore;
    if (a.nameSimilarity != b.nameSimilarity) return a.nameSimilarity > b.nameSimilarity;
    return reg.facilities()[a.facility].siret < reg.facilities()[b.facility].siret;
}

struct Scored {
    CandidateScore score;
    bool passName = false;
    bool passAddress = false;
};

Scored score_candidate(const MatchQuery& q, const registry::Registry& reg, std::uint32_t idx,
                       const MatchConfig& config) {
    const auto& f = reg.facilities()[idx];
    Scored s;
    s.score.facility = idx;
    s.score.nameSimilarity = facility_name_similarity(q.name, reg, f);
    s.passName = s.score.nameSimilarity >= config.nameThreshold;
    if (s.passName) {
        const auto addr = address_score(q.address, normalize::Address{f.street, f.zipcode, f.city},
                                        config.addressWeights);
        s.score.addressScore = addr.score;
        s.score.presenceMask = addr.presenceMask;
        s.passAddress = addr.presenceMask == 0 || addr.score >= config.minScore;
    }
    return s;
}

struct DescriptionResult {
    bool unblockable = false;
    std::vector<std::uint32_t> block;  // date-free block
    std::vector<Scored> scored;        // name-passing candidates only
};

DescriptionResult search_description(const MatchQuery& q, const registry::Registry& reg, const MatchConfig& config) {
    std::optional<std::set<std::string>> prefixes;
    if (q.activityPrefixes) prefixes = truncate_prefixes(*q.activityPrefixes, config.activityPrefixLength);
    auto block = block_without_date(q, reg, config, prefixes ? &*prefixes : nullptr);
    DescriptionResult out;
    out.unblockable = block.unblockable;
    out.block = std::move(block.facilities);
    if (q.name.empty()) return out;
    for (auto idx : out.block) {
        auto s = score_candidate(q, reg, idx, config);
        if (s.passName) out.scored.push_back(s);
    }
    return out;
}

MatchResult finish(const DescriptionResult& d, const std::optional<Date>& date, const registry::Registry& reg,
                   const MatchConfig& config) {
    MatchResult r;
    auto valid = [&](std::uint32_t idx) { return !date || registry::temporally_valid(reg.facilities()[idx], *date); };
    for (auto idx : d.block)
        if (valid(idx)) ++r.blocked;
    if (r.blocked == 0) {
        r.failure = d.unblockable && !config.allowUnblocked ? FailureStage::Unblockable : FailureStage::Blocking;
        return r;
    }
    const Scored* best = nullptr;
    for (const auto& s : d.scored) {
        if (!valid(s.score.facility)) continue;
        ++r.afterName;
        if (!s.passAddress) continue;
        ++r.afterAddress;
        if (!best || better(s.score, best->score, reg)) best = &s;
    }
    if (r.afterName == 0) {
        r.failure = FailureStage::Name;
        return r;
    }
    if (!best) {
        r.failure = FailureStage::Address;
        return r;
    }
    r.best = best->score;
    r.identifier = Identifier::full_siret(reg.facilities()[best->score.facility].siret);
    return r;
}

std::string description_key(const MatchQuery& q) {
    std::string k;
    auto add = [&](const std::string& s) {
        k += s;
        k += '\x1f';
    };
    add(q.name);
    add(q.address.street);
    add(q.address.zipcode);
    add(q.address.city);
    add(q.department);
    if (q.activityPrefixes) {
        k += 'A';
        for (const auto& p : *q.activityPrefixes) add(p);
    } else {
        k += '-';
    }
    return k;
}

}  // namespace

AddressScore address_score(const normalize::Address& a, const normalize::Address& b, const AddressWeights& w) {
    AddressScore out;
    double num = 0.0;
    double den = 0.0;
    if (!a.street.empty() && !b.street.empty()) {
        out.presenceMask |= kStreet;
        num += w.street * similarity::name_similarity(a.street, b.street);
        den += w.street;
    }
    if (!a.zipcode.empty() && !b.zipcode.empty()) {
        out.presenceMask |= kZipcode;
        double z = 0.0;
        if (a.zipcode == b.zipcode) {
            z = 1.0;
        } else {
            const auto da = normalize::department_of(a.zipcode);
            const auto db = normalize::department_of(b.zipcode);
            if (da && db && *da == *db) z = 0.5;
        }
        num += w.zipcode * z;
        den += w.zipcode;
    }
    if (!a.city.empty() && !b.city.empty()) {
        out.presenceMask |= kCity;
        num += w.city * similarity::name_similarity(a.city, b.city);
        den += w.city;
    }
    out.score = den > 0.0 ? num / den : 0.0;
    return out;
}

MatchQuery make_query(const AgentOccurrence& occ, const LotRecord* lot, const registry::ActivityTable* activity) {
    MatchQuery q;
    q.name = occ.normalizedName;
    q.address = {occ.normStreet, occ.normZipcode, occ.normCity};
    q.department = occ.department;
    if (lot) {
        q.date = lot->reference_date();
        // The contract's classification describes what the winner supplies,
        // not the buyer's own activity.
        if (occ.role == Role::Winner && activity && !activity->empty() && !lot->activityCode.empty())
            if (const auto* set = activity->compatible(lot->activityCode)) q.activityPrefixes = *set;
    }
    return q;
}

bool activity_compatible(const registry::Registry& reg, const registry::RegistryFacility& f,
                         const std::set<std::string>& prefixes) {
    const int len = reg.activity_prefix_length();
    const auto own = registry::activity_prefix(f.activityCode, len);
    const auto* e = reg.entity_of(f);
    const auto parent = e ? registry::activity_prefix(e->activityCode, len) : std::string{};
    if (own.empty() && parent.empty()) return true;
    return (!own.empty() && prefixes.count(own)) || (!parent.empty() && prefixes.count(parent));
}

BlockResult candidate_block(const MatchQuery& query, const registry::Registry& reg, const MatchConfig& config) {
    std::optional<std::set<std::string>> prefixes;
    if (query.activityPrefixes) prefixes = truncate_prefixes(*query.activityPrefixes, config.activityPrefixLength);
    auto block = block_without_date(query, reg, config, prefixes ? &*prefixes : nullptr);
    if (query.date) {
        std::erase_if(block.facilities,
                      [&](std::uint32_t idx) { return !registry::temporally_valid(reg.facilities()[idx], *query.date); });
    }
    return block;
}

double facility_name_similarity(std::string_view name, const registry::Registry& reg,
                                const registry::RegistryFacility& f) {
    const auto* e = reg.entity_of(f);
    const auto& names = !f.names.empty() || !e ? f.names : e->legalNames;
    double best = 0.0;
    for (const auto& n : names) {
        best = std::max(best, similarity::name_similarity(name, n));
        if (best >= 1.0) break;
    }
    return best;
}

std::string_view to_string(FailureStage stage) {
    switch (stage) {
    case FailureStage::None: return "";
    case FailureStage::Unblockable: return "unblockable";
    case FailureStage::Blocking: return "blocking";
    case FailureStage::Name: return "name";
    case FailureStage::Address: return "address";
    }
    return "";
}

FailureStage parse_failure_stage(std::string_view text) {
    if (text == "unblockable") return FailureStage::Unblockable;
    if (text == "blocking") return FailureStage::Blocking;
    if (text == "name") return FailureStage::Name;
    if (text == "address") return FailureStage::Address;
    return FailureStage::None;
}

MatchResult identify_occurrence(const MatchQuery& query, const registry::Registry& reg, const MatchConfig& config) {
    return finish(search_description(query, reg, config), query.date, reg, config);
}

std::vector<MatchResult> identify_all(const std::vector<MatchQuery>& queries, const registry::Registry& reg,
                                      const MatchConfig& config, int jobs) {
    std::unordered_map<std::string, std::size_t> keyIndex;
    std::vector<std::size_t> queryToKey(queries.size());
    std::vector<std::size_t> representative;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        auto [it, inserted] = keyIndex.emplace(description_key(queries[i]), representative.size());
        if (inserted) representative.push_back(i);
        queryToKey[i] = it->second;
    }

    std::vector<DescriptionResult> descriptions(representative.size());
    parallel_for(representative.size(), jobs, [&](std::size_t k) {
        descriptions[k] = search_description(queries[representative[k]], reg, config);
    });

    std::vector<MatchResult> results(queries.size());
    parallel_for(queries.size(), jobs, [&](std::size_t i) {
        results[i] = finish(descriptions[queryToKey[i]], queries[i].date, reg, config);
    });
    return results;
}

}  // namespace foppa::identify
