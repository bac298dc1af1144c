#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "foppa/merge.hpp"

using namespace foppa;
using namespace foppa::merge;

namespace {

AgentOccurrence named(OccurrenceId id, std::string name, std::string dept = "69") {
    AgentOccurrence o;
    o.occurrenceId = id;
    o.normalizedName = std::move(name);
    o.rawName = o.normalizedName;
    o.department = std::move(dept);
    return o;
}

std::vector<const AgentOccurrence*> ptrs(const std::vector<AgentOccurrence>& v) {
    std::vector<const AgentOccurrence*> out;
    for (const auto& o : v) out.push_back(&o);
    return out;
}

}  // namespace

TEST_SUITE("merge") {
    TEST_CASE("blocking_key") {
        CHECK(blocking_key(named(1, "MAIRIE DE LYON")) == "MAIR|69");
        CHECK(blocking_key(named(1, "MAIRIE DE LYON", "")) == "MAIR|??");
        CHECK(blocking_key(named(1, "BTP")) == "BTP|69");
        CHECK_FALSE(blocking_key(named(1, "")));
    }

    TEST_CASE("pair_similarity") {
        auto a = named(1, "MAIRIE DE LYON");
        a.normStreet = "1 RUE A";
        a.normZipcode = "69001";
        a.normCity = "LYON";
        CHECK(pair_similarity(a, a, {}) == doctest::Approx(1.0));
        auto b = a;
        b.normStreet = "ZZZZ";
        b.normZipcode = "13001";
        b.normCity = "QQQQQ";
        CHECK(pair_similarity(a, b, {}) == doctest::Approx(0.5));
        CHECK(pair_similarity(a, b, {}) == pair_similarity(b, a, {}));
    }

    TEST_CASE("closure examples") {
        std::vector<AgentOccurrence> v = {named(1, "ACME SA"), named(2, "ACME SA"), named(3, "ACME SA")};
        CHECK(cluster_occurrences(v, {}) == std::vector<std::vector<std::size_t>>{{0, 1, 2}});

        // A~B and B~C at 0.85 without A~C.
        std::vector<AgentOccurrence> chain = {named(1, "ABCDEFGHIJ"), named(2, "ABCDEFGHIX"), named(3, "ABCDEFGHYX")};
        CHECK(pair_similarity(chain[0], chain[2], {}) < 0.85);
        CHECK(cluster_occurrences(chain, {}) == std::vector<std::vector<std::size_t>>{{0, 1, 2}});

        std::vector<AgentOccurrence> empty = {named(1, ""), named(2, "")};
        CHECK(cluster_occurrences(empty, {}).size() == 2);
    }

    TEST_CASE("partition equals the all-pairs closure") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto occ = fixtures::random_occurrences(306, seed);
            const MergeConfig cfg;
            const auto got = cluster_occurrences(occ, cfg, 3);
            const auto want = oracle::closure(occ.size(), [&](std::size_t i, std::size_t j) {
                return fixtures::oracle_similar(occ[i], occ[j], cfg.threshold, cfg.addressWeights);
            });
            CHECK(got == want);
            std::size_t total = 0;
            for (const auto& c : got) total += c.size();
            CHECK(total == occ.size());
        }
    }

    TEST_CASE("resolve_cluster examples") {
        const auto s1 = Identifier::full_siret("10000000100011");
        const auto s2 = Identifier::full_siret("10000000200011");
        auto with = [](std::optional<Identifier> id) {
            AgentOccurrence o = named(1, "X");
            o.identifier = id;
            return o;
        };
        InternalCodeCounter codes;
        std::vector<AgentOccurrence> m = {with(s1), with(s1), with(s2)};
        auto r = resolve_cluster(ptrs(m), codes);
        CHECK(r.caseKind == CaseKind::ConflictingIds);
        CHECK(r.identifier == s1);

        m = {with(std::nullopt), with(std::nullopt)};
        r = resolve_cluster(ptrs(m), codes);
        CHECK(r.caseKind == CaseKind::AllUnidentified);
        CHECK(r.identifier.render() == "U000001");

        m = {with(s1), with(std::nullopt), with(std::nullopt)};
        r = resolve_cluster(ptrs(m), codes);
        CHECK(r.caseKind == CaseKind::SingleIdentified);
        CHECK(r.identifier == s1);
    }

    TEST_CASE("twenty planned clusters resolve as planned") {
        const auto plan = fixtures::twenty_clusters();
        auto occ = fixtures::occurrences_for(plan);
        const auto result = merge_occurrences(occ, {});
        REQUIRE(result.clusters.size() == plan.size());
        for (std::size_t k = 0; k < plan.size(); ++k) {
            CAPTURE(k);
            CHECK(result.clusters[k].members.size() == plan[k].ids.size());
            CHECK(result.clusters[k].caseKind == plan[k].expectKind);
            CHECK(result.clusters[k].resolvedIdentifier->render() == plan[k].expectId);
        }
    }

    TEST_CASE("resolution never invents a registry identifier") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto occ = fixtures::random_occurrences(200, seed);
            std::map<OccurrenceId, std::optional<Identifier>> before;
            for (const auto& o : occ) before[o.occurrenceId] = o.identifier;
            const auto r = merge_occurrences(occ, {});
            std::set<std::string> internal;
            for (const auto& c : r.clusters) {
                std::set<Identifier> carried;
                for (auto m : c.members)
                    if (before[m]) carried.insert(*before[m]);
                if (c.resolvedIdentifier->is_registry_id())
                    CHECK(carried.count(*c.resolvedIdentifier));
                else
                    CHECK(carried.empty());
                if (!c.resolvedIdentifier->is_registry_id())
                    CHECK(internal.insert(c.resolvedIdentifier->render()).second);
            }
            CHECK(r.occurrenceAgent.size() == occ.size());
            std::size_t members = 0;
            for (const auto& a : r.agents) members += a.memberOccurrenceIds.size();
            CHECK(members == occ.size());
        }
    }

    TEST_CASE("merge_records examples") {
        auto a = named(1, "MAIRIE DE LYON");
        a.normCity = "LYON";
        auto b = named(2, "VILLE DE LYON");
        b.normCity = "LYON";
        auto c = named(3, "MAIRIE DE LYON");
        const std::vector<AgentOccurrence> v = {a, b, c};
        const auto agent = merge_records(Identifier::internal_code(1), ptrs(v));
        CHECK(agent.city == "LYON");
        CHECK(agent.names == std::vector<std::string>{"MAIRIE DE LYON", "VILLE DE LYON"});
        CHECK(agent.memberOccurrenceIds == std::vector<OccurrenceId>{1, 2, 3});

        auto p = named(4, "X");
        p.normCity = "PARIS";
        auto l = named(5, "X");
        l.normCity = "LYON";
        const std::vector<AgentOccurrence> tie = {p, l};
        CHECK(merge_records(Identifier::internal_code(1), ptrs(tie)).city == "LYON");
    }

    TEST_CASE("merge_records ignores member order") {
        auto occ = fixtures::random_occurrences(12, 77);
        std::mt19937_64 rng(1);
        const auto ref = merge_records(Identifier::internal_code(9), ptrs(occ));
        for (int i = 0; i < 50; ++i) {
            std::shuffle(occ.begin(), occ.end(), rng);
            CHECK(merge_records(Identifier::internal_code(9), ptrs(occ)) == ref);
        }
    }

    TEST_CASE("merge output does not depend on jobs") {
        auto a = fixtures::random_occurrences(400, 5);
        auto b = a;
        const auto ra = merge_occurrences(a, {}, 1);
        const auto rb = merge_occurrences(b, {}, 6);
        CHECK(ra.clusters == rb.clusters);
        CHECK(ra.agents == rb.agents);
        CHECK(a == b);
    }
}
