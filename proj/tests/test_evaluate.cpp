#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "foppa/evaluate.hpp"
#include "support.hpp"

using namespace foppa;
using namespace foppa::evaluate;

namespace {

merge::AgentCluster cluster(std::int64_t id, std::vector<OccurrenceId> members) {
    merge::AgentCluster c;
    c.clusterId = id;
    c.members = std::move(members);
    return c;
}

const Identifier kS = Identifier::full_siret("12345678900013");
const Identifier kSibling = Identifier::full_siret("12345678900021");
const Identifier kOther = Identifier::full_siret("99999999900013");

}  // namespace

TEST_SUITE("evaluate") {
    TEST_CASE("classify_outcome") {
        CHECK(classify_outcome(kS, kS) == MatchOutcome::Full);
        CHECK(classify_outcome(kSibling, kS) == MatchOutcome::Partial);
        CHECK(classify_outcome(Identifier::siren_only("123456789"), kS) == MatchOutcome::Partial);
        CHECK(classify_outcome(kOther, kS) == MatchOutcome::Incorrect);
        CHECK(classify_outcome(std::nullopt, kS) == MatchOutcome::None);
        CHECK(classify_outcome(Identifier::internal_code(3), kS) == MatchOutcome::None);
    }

    TEST_CASE("concentration_ratio and singleton_ratio worked examples") {
        auto c = Clustering::from({cluster(1, {1, 2, 3, 4})});
        CHECK(concentration_ratio({1, 2, 3, 4}, c) == 1.0);
        CHECK(singleton_ratio({1, 2, 3, 4}, c) == 0.0);

        c = Clustering::from({cluster(1, {1, 2}), cluster(2, {3}), cluster(3, {4})});
        CHECK(concentration_ratio({1, 2, 3, 4}, c) == 0.5);

        c = Clustering::from({cluster(1, {1}), cluster(2, {2, 3, 4})});
        CHECK(singleton_ratio({1, 2, 3, 4}, c) == 0.25);

        c = Clustering::from({cluster(1, {1}), cluster(2, {2}), cluster(3, {3})});
        CHECK(singleton_ratio({1, 2, 3}, c) == 1.0);

        c = Clustering::from({cluster(1, {7})});
        CHECK(concentration_ratio({7}, c) == 1.0);
        CHECK(singleton_ratio({7}, c) == 1.0);
        CHECK_FALSE(concentration_ratio({}, c));
        CHECK_FALSE(singleton_ratio({}, c));
    }

    TEST_CASE("ratio characterizations on random clusterings") {
        std::mt19937_64 rng(21);
        for (int i = 0; i < 300; ++i) {
            const auto rc = fixtures::random_clustering(rng);
            const auto c = Clustering::from(rc.clusters);
            for (const auto& agent : rc.agents) {
                std::set<std::int64_t> used;
                bool allSingletons = true;
                for (auto o : agent) {
                    used.insert(c.clusterOf.at(o));
                    allSingletons = allSingletons && c.size.at(c.clusterOf.at(o)) == 1;
                }
                CHECK((*concentration_ratio(agent, c) == 1.0) == (used.size() == 1));
                CHECK((*singleton_ratio(agent, c) == 1.0) == allSingletons);
            }
        }
    }

    TEST_CASE("histograms") {
        std::vector<merge::AgentCluster> singles;
        for (int i = 1; i <= 5; ++i) singles.push_back(cluster(i, {i}));
        auto h = cluster_size_distribution(singles);
        CHECK(h.labels == std::vector<std::string>{"1", "2", "3", "4", "5", "6+"});
        CHECK(h.percentages()[0] == 100.0);

        const auto plan = fixtures::twenty_clusters();
        const auto occ = fixtures::occurrences_for(plan);
        std::vector<merge::AgentCluster> clusters;
        std::map<OccurrenceId, std::optional<Identifier>> before;
        std::size_t next = 0;
        for (std::size_t k = 0; k < plan.size(); ++k) {
            auto c = cluster(static_cast<std::int64_t>(k + 1), {});
            for (std::size_t m = 0; m < plan[k].ids.size(); ++m, ++next) {
                c.members.push_back(occ[next].occurrenceId);
                before[occ[next].occurrenceId] = occ[next].identifier;
            }
            clusters.push_back(c);
        }
        // Hand count over the planned fixture.
        CHECK(cluster_size_distribution(clusters).counts == std::vector<std::size_t>{4, 7, 6, 2, 1, 0});
        CHECK(distinct_identifier_distribution(clusters, before).counts ==
              std::vector<std::size_t>{6, 6, 6, 2, 0, 0});
        CHECK(cluster_size_distribution(clusters).total() == clusters.size());

        const auto r = ratio_distribution({0.0, 0.3, 0.25, 0.999, 1.0, 0.5});
        CHECK(r.counts == std::vector<std::size_t>{1, 0, 1, 1, 0, 1, 0, 0, 0, 1, 1});
        double sum = 0;
        for (double p : r.percentages()) sum += p;
        CHECK(sum == doctest::Approx(100.0).epsilon(1e-4));
    }

    TEST_CASE("stage accounting partitions the truth set") {
        const Truth truth = {{1, kS}, {2, kS}, {3, kOther}, {4, kOther}};
        const Snapshot sep = {{1, kS}};
        const Snapshot idf = {{1, kS}, {2, kSibling}, {3, kS}, {4, Identifier::internal_code(1)}};
        const auto strict = stage_accounting({{"a", sep}, {"b", idf}}, truth, false);
        CHECK(strict[0].correct == 1);
        CHECK(strict[0].incorrect == 0);
        CHECK(strict[0].missing == 3);
        CHECK(strict[1].correct == 1);
        CHECK(strict[1].incorrect == 2);
        CHECK(strict[1].missing == 1);
        const auto entity = stage_accounting({{"b", idf}}, truth, true);
        CHECK(entity[0].correct == 2);
        for (const auto& r : strict) CHECK(r.correct + r.incorrect + r.missing == truth.size());
    }

    TEST_CASE("notice coverage") {
        const std::set<std::string> contracts = {"C1", "C2"};
        CHECK(notice_coverage(contracts, {{"A1", "C1"}, {"A2", "C2"}})->unmatchedContractsPercent == 0.0);
        CHECK(notice_coverage(contracts, {{"A1", "C1"}, {"A2", "C2"}})->unmatchedAwardsPercent == 0.0);

        std::set<std::string> ten;
        std::map<std::string, std::string> awards;
        for (int i = 0; i < 10; ++i) ten.insert("C" + std::to_string(i));
        for (int i = 0; i < 6; ++i) awards["A" + std::to_string(i)] = "C" + std::to_string(i);
        awards["A6"] = "";
        awards["A7"] = "UNKNOWN";
        const auto cov = notice_coverage(ten, awards);
        CHECK(cov->unmatchedContractsPercent == doctest::Approx(40.0));
        CHECK(cov->unmatchedAwardsPercent == doctest::Approx(25.0));
        CHECK_FALSE(notice_coverage({}, awards));
        CHECK_FALSE(notice_coverage(ten, {}));
    }

    TEST_CASE("sampling") {
        std::vector<AgentOccurrence> occ;
        for (int i = 1; i <= 400; ++i) {
            AgentOccurrence o;
            o.occurrenceId = i;
            o.role = i % 2 ? Role::Buyer : Role::Winner;
            o.rawName = "AGENT " + std::to_string(i % 300);
            o.city = i % 7 ? "Lyon" : "";
            occ.push_back(o);
        }
        const auto a = sample_ground_truth(occ, 50, 9);
        const auto b = sample_ground_truth(occ, 50, 9);
        CHECK(a.occurrences == b.occurrences);
        CHECK(a.occurrences.size() == 100);
        CHECK(a.shortfall.empty());
        for (auto id : a.occurrences) CHECK(!occ[static_cast<std::size_t>(id - 1)].city.empty());
        CHECK(sample_ground_truth(occ, 50, 10).occurrences != a.occurrences);

        const auto all = sample_ground_truth(occ, 1000, 9);
        CHECK(all.shortfall.at(Role::Buyer) > 0);
        CHECK(all.occurrences.size() < 400);
    }

    TEST_CASE("masking leaks") {
        AgentOccurrence clean;
        clean.occurrenceId = 1;
        AgentOccurrence declared = clean;
        declared.occurrenceId = 2;
        declared.idSource = IdSource::Declared;
        AgentOccurrence keyed = clean;
        keyed.occurrenceId = 3;
        keyed.agentKey = "S:12345678900013";
        const auto leaks = masking_leaks({clean, declared, keyed}, {1, 2, 3});
        CHECK(leaks == std::vector<OccurrenceId>{2, 3});
        CHECK(masking_leaks({declared}, {}).empty());
    }

    TEST_CASE("outcome distribution over occurrences and unique agents") {
        std::vector<AgentOccurrence> occ;
        for (int i = 1; i <= 4; ++i) {
            AgentOccurrence o;
            o.occurrenceId = i;
            o.role = Role::Winner;
            occ.push_back(o);
        }
        const Truth truth = {{1, kS}, {2, kS}, {3, kS}, {4, kOther}};
        const Snapshot pred = {{1, kS}, {2, kSibling}, {3, kSibling}, {4, kOther}};
        const auto d = outcome_distribution(occ, pred, truth).at(Role::Winner);
        CHECK(d.occurrences.counts[0] == 2);
        CHECK(d.occurrences.counts[1] == 2);
        CHECK(d.uniqueAgents.total() == 2);
        CHECK(d.uniqueAgents.counts[static_cast<std::size_t>(MatchOutcome::Partial)] == 1);
        CHECK(d.uniqueAgents.counts[static_cast<std::size_t>(MatchOutcome::Full)] == 1);
        double sum = 0;
        for (auto o : {MatchOutcome::Full, MatchOutcome::Partial, MatchOutcome::Incorrect, MatchOutcome::None})
            sum += d.occurrences.percent(o);
        CHECK(sum == doctest::Approx(100.0));
    }

    TEST_CASE("clustering outcomes") {
        const Truth truth = {{1, kS}, {2, kS}, {3, kSibling}, {4, kS}, {5, kOther}};
        const auto q = clustering_outcomes({cluster(1, {1, 2}), cluster(2, {3, 4}), cluster(3, {5, 6}),
                                            cluster(4, {4, 5}), cluster(5, {7})},
                                           truth);
        CHECK(q.counts[0] == 2);  // {1,2}, {5,6}
        CHECK(q.counts[1] == 1);  // {3,4}
        CHECK(q.counts[2] == 1);  // {4,5}
        CHECK(q.total() == 4);
    }

    TEST_CASE("truth file loads") {
        testing::TempDir dir("truth");
        testing::spit(dir / "truth.csv", "occurrenceId,siret,name\n3,12345678900013,X\n5,123 456 789 00021,Y\n");
        const auto t = load_truth(dir / "truth.csv");
        CHECK(t.size() == 2);
        CHECK(t.at(5) == kSibling);
    }
}
