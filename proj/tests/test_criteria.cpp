#include <doctest.h>

#include <random>

#include "foppa/criteria.hpp"
#include "oracles.hpp"

using namespace foppa;
using namespace foppa::criteria;

namespace {

Weight w(std::int64_t v) { return Weight::from_integer(v); }

std::vector<std::int64_t> hundredths(const std::vector<Weight>& ws) {
    std::vector<std::int64_t> out;
    for (const auto& x : ws) {
        CHECK(x.micros % 10000 == 0);
        out.push_back(x.micros / 10000);
    }
    return out;
}

}  // namespace

TEST_SUITE("criteria") {
    TEST_CASE("clean_weight_field") {
        CHECK(clean_weight_field("60 --- 40", {"---"}) == std::vector<Weight>{w(60), w(40)});
        CHECK(clean_weight_field("Pondération: 55%", {"---"}) == std::vector<Weight>{w(55)});
        CHECK(clean_weight_field("n/a", {"---"}).empty());
        CHECK(clean_weight_field("60---40", {"---"}) == std::vector<Weight>{w(60), w(40)});
        CHECK(clean_weight_field("12,5", {}) == std::vector<Weight>{Weight{12500000}});
    }

    TEST_CASE("split_criteria") {
        auto r = split_criteria("Prix --- Délai", "60 --- 40", {"---"});
        CHECK(r.criteria == std::vector<RawCriterion>{{"Prix", w(60)}, {"Délai", w(40)}});
        CHECK_FALSE(r.countMismatch);

        r = split_criteria("Prix", "", {"---"});
        CHECK(r.criteria == std::vector<RawCriterion>{{"Prix", std::nullopt}});

        r = split_criteria("A --- B", "1 --- 2 --- 3", {"---"});
        CHECK(r.criteria == std::vector<RawCriterion>{{"A", std::nullopt}, {"B", std::nullopt}});
        CHECK(r.countMismatch);
    }

    TEST_CASE("unmix_names_weights") {
        CHECK(unmix_names_weights("Prix: 60; Qualité: 40") ==
              std::vector<RawCriterion>{{"Prix", w(60)}, {"Qualité", w(40)}});
        CHECK(unmix_names_weights("Prix") == std::vector<RawCriterion>{{"Prix", std::nullopt}});
        CHECK(unmix_names_weights("Valeur technique (60 points), prix (40 points)") ==
              std::vector<RawCriterion>{{"Valeur technique", w(60)}, {"prix", w(40)}});
        CHECK(unmix_names_weights("60% prix; 40 % délai") ==
              std::vector<RawCriterion>{{"prix", w(60)}, {"délai", w(40)}});
    }

    TEST_CASE("normalize_weights examples") {
        auto n = normalize_weights({w(60), w(40)});
        CHECK(n.normalized);
        CHECK(hundredths(n.weights) == std::vector<std::int64_t>{6000, 4000});
        CHECK(hundredths(normalize_weights({w(1), w(1)}).weights) == std::vector<std::int64_t>{5000, 5000});
        CHECK(hundredths(normalize_weights({w(30), w(20), w(10)}).weights) ==
              std::vector<std::int64_t>{5000, 3333, 1667});
        // Three thirds round down; the residual cent goes to the first.
        CHECK(hundredths(normalize_weights({w(1), w(1), w(1)}).weights) ==
              std::vector<std::int64_t>{3334, 3333, 3333});
    }

    TEST_CASE("un-normalizable weights keep their raw values") {
        auto zero = normalize_weights({w(0), w(0)});
        CHECK_FALSE(zero.normalized);
        CHECK(zero.weights == std::vector<Weight>{w(0), w(0)});
        auto neg = normalize_weights({w(5), Weight{-1}});
        CHECK_FALSE(neg.normalized);
        CHECK(neg.weights[1] == Weight{-1});
        CHECK_FALSE(normalize_weights({}).normalized);
    }

    TEST_CASE("normalize_weights agrees with the oracle and is scale invariant") {
        std::mt19937_64 rng(17);
        for (int i = 0; i < 2000; ++i) {
            const auto n = 1 + rng() % 8;
            std::vector<Weight> ws;
            std::vector<std::int64_t> raw;
            for (std::size_t k = 0; k < n; ++k) {
                raw.push_back(1 + static_cast<std::int64_t>(rng() % 100'000'000));
                ws.push_back(Weight{raw.back()});
            }
            const auto out = normalize_weights(ws);
            REQUIRE(out.normalized);
            const auto h = hundredths(out.weights);
            CHECK(h == oracle::normalized_hundredths(raw));
            std::int64_t sum = 0;
            for (auto v : h) sum += v;
            CHECK(sum == 10000);

            const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 50);
            std::vector<Weight> scaled;
            for (auto r : raw) scaled.push_back(Weight{r * k});
            CHECK(normalize_weights(scaled).weights == out.weights);
        }
    }

    TEST_CASE("classify_criterion") {
        const auto lex = Lexicon::french_default();
        CHECK(classify_criterion("Prix", lex) == CriterionClass::Price);
        CHECK(classify_criterion("Délai de livraison", lex) == CriterionClass::Deadline);
        CHECK(classify_criterion("Zzz inconnu", lex) == CriterionClass::Others);
        CHECK(classify_criterion("Valeur technique", lex) == CriterionClass::Technical);
        CHECK(classify_criterion("Performances en matière de protection de l'environnement", lex) ==
              CriterionClass::Environmental);
        CHECK(classify_criterion("Insertion professionnelle", lex) == CriterionClass::Social);
        // Priority: price beats technical.
        CHECK(classify_criterion("Qualité / prix", lex) == CriterionClass::Price);
        CHECK(classify_criterion("", lex) == CriterionClass::Others);
    }

    TEST_CASE("classify_criterion is total and deterministic") {
        const auto lex = Lexicon::french_default();
        std::mt19937_64 rng(3);
        const std::string alphabet = "abcdeéèpPRIXdélai ()-,.0123";
        for (int i = 0; i < 500; ++i) {
            std::string s;
            for (int k = 0; k < 12; ++k) s += alphabet[rng() % alphabet.size()];
            CHECK(classify_criterion(s, lex) == classify_criterion(s, lex));
        }
    }

    TEST_CASE("extract_price_weight") {
        using CC = ClassifiedCriterion;
        auto r = extract_price_weight("60", {CC{"Qualité", CriterionClass::Technical, w(40)}});
        REQUIRE(r.criteria.size() == 2);
        CHECK(r.criteria[0].cls == CriterionClass::Price);
        CHECK(r.criteria[0].weight == w(60));
        CHECK(r.criteria[1].cls == CriterionClass::Technical);
        CHECK_FALSE(r.conflict);

        r = extract_price_weight(
            "", {CC{"Prix", CriterionClass::Price, w(70)}, CC{"Délai", CriterionClass::Deadline, w(30)}});
        CHECK(r.criteria.size() == 2);
        CHECK(r.criteria[0].weight == w(70));

        r = extract_price_weight("60", {CC{"Prix", CriterionClass::Price, w(50)}});
        REQUIRE(r.criteria.size() == 1);
        CHECK(r.criteria[0].weight == w(60));
        CHECK(r.conflict);
    }

    TEST_CASE("process_lot keeps at most one price and sums to 100") {
        const auto lex = Lexicon::french_default();
        auto lot = process_lot(7, "Prix --- Qualité technique --- Prix des fournitures", "30 --- 40 --- 30", "",
                               {"---"}, lex);
        int prices = 0;
        std::int64_t sum = 0;
        for (const auto& c : lot.criteria) {
            CHECK(c.lotId == 7);
            prices += c.criterionClass == CriterionClass::Price;
            CHECK(c.weightIsNormalized);
            sum += c.weight->micros;
        }
        CHECK(prices == 1);
        CHECK(sum == 100 * Weight::kScale);
        CHECK(lot.criteria[0].weight == w(60));

        auto mixed = process_lot(1, "Prix: 6; Délai: 4", "", "", {"---"}, lex);
        REQUIRE(mixed.criteria.size() == 2);
        CHECK(mixed.criteria[0].weight == w(60));
        CHECK(mixed.criteria[1].criterionClass == CriterionClass::Deadline);

        auto unweighted = process_lot(1, "Prix --- Délai", "", "", {"---"}, lex);
        for (const auto& c : unweighted.criteria) {
            CHECK_FALSE(c.weight);
            CHECK_FALSE(c.weightIsNormalized);
        }
        CHECK(unweighted.criteria[1].ordinal == 2);
    }
}
