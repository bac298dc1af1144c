#include <doctest.h>

#include <random>

#include "foppa/normalize.hpp"
#include "foppa/registry.hpp"
#include "support.hpp"

using namespace foppa;
using namespace foppa::normalize;

namespace {

AgentOccurrence occ(OccurrenceId id, std::string name, std::string siret) {
    AgentOccurrence o;
    o.occurrenceId = id;
    o.rawName = std::move(name);
    o.declaredSiret = std::move(siret);
    return o;
}

}  // namespace

TEST_SUITE("normalize") {
    TEST_CASE("normalize_name examples") {
        CHECK(normalize_name("MAIRIE DE LYON") == "MAIRIE DE LYON");
        CHECK(normalize_name("Sté. Dupont (siège social)") == "STE DUPONT");
        CHECK(normalize_name("Mairie de Brié-et-Angonnes") == "MAIRIE DE BRIE ET ANGONNES");
        CHECK(normalize_name("Dupont & Fils") == "DUPONT ET FILS");
        CHECK(normalize_name("A (b (c) d) E") == "A E");
        CHECK(normalize_name("  ") == "");
    }

    TEST_CASE("normalize_name is idempotent and stays in [A-Z0-9 ]") {
        std::mt19937_64 rng(11);
        const std::vector<std::string> pieces = {"é", "È", "œ", "ß", "(", ")", "((", "&", "-", ".", ",", "'",
                                                 " ", "  ", "a", "Z", "0", "9", "ç", "\xc3", "\t", "ø"};
        for (int i = 0; i < 2000; ++i) {
            std::string s;
            const auto n = rng() % 20;
            for (std::size_t k = 0; k < n; ++k) s += pieces[rng() % pieces.size()];
            const auto once = normalize_name(s);
            CHECK(normalize_name(once) == once);
            for (char c : once) CHECK(((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == ' '));
        }
    }

    TEST_CASE("normalize_address examples") {
        CHECK(normalize_address("", "", "PARIS CEDEX 08").city == "PARIS");
        CHECK(normalize_address("", "F-75008", "").zipcode == "75008");
        CHECK(normalize_address("", "ABC", "").zipcode.empty());
        const auto a = normalize_address("12 rue de la Paix BP 45", "69003 Cedex", "Lyon 3");
        CHECK(a.street == "12 RUE DE LA PAIX");
        CHECK(a.zipcode == "69003");
        CHECK(a.city == "LYON");
    }

    TEST_CASE("fill_zipcode only on a unique mapping") {
        PostalTable t;
        t.add("Lyon", "69001");
        t.add("Saint-Denis", "93200");
        t.add("Saint-Denis", "97400");
        CHECK(fill_zipcode("LYON", t) == "69001");
        CHECK_FALSE(fill_zipcode("SAINT DENIS", t));
        CHECK_FALSE(fill_zipcode("PARIS", t));
    }

    TEST_CASE("fill never overwrites a present zipcode") {
        PostalTable t;
        t.add("LYON", "69001");
        std::vector<AgentOccurrence> v = {occ(1, "A", ""), occ(2, "B", "")};
        v[0].city = "Lyon";
        v[0].zipcode = "69009";
        v[1].city = "Lyon";
        const auto stats = normalize_occurrences(v, t);
        CHECK(v[0].normZipcode == "69009");
        CHECK_FALSE(v[0].zipcodeFilled);
        CHECK(v[1].normZipcode == "69001");
        CHECK(v[1].zipcodeFilled);
        CHECK(v[1].department == "69");
        CHECK(stats.zipcodesFilled == 1);
    }

    TEST_CASE("department_of") {
        CHECK(department_of("75008") == "75");
        CHECK(department_of("97400") == "974");
        CHECK(department_of("98800") == "988");
        CHECK(department_of("20000") == "20");
        CHECK(department_of("20290") == "20");
        CHECK_FALSE(department_of("7500"));
        CHECK_FALSE(department_of("7500A"));
    }

    TEST_CASE("merge_by_declared_siret") {
        std::vector<AgentOccurrence> v = {occ(1, "ALPHA", "12345678900013"), occ(2, "ALPHA SA", "12345678900013"),
                                          occ(3, "BETA", "98765432100019"), occ(4, "GAMMA", "1234"),
                                          occ(5, "DELTA", "123 456 789"), occ(6, "EPS", "")};
        NormalizeStats stats;
        merge_by_declared_siret(v, &stats);
        CHECK(v[0].agentKey == v[1].agentKey);
        CHECK_FALSE(v[0].agentKey.empty());
        CHECK(v[0].agentKey != v[2].agentKey);
        CHECK(v[0].identifier == Identifier::full_siret("12345678900013"));
        CHECK(v[0].idSource == IdSource::Declared);
        CHECK(v[3].agentKey.empty());
        CHECK_FALSE(v[3].identifier);
        CHECK(v[4].identifier == Identifier::siren_only("123456789"));
        CHECK(v[4].agentKey.empty());
        CHECK_FALSE(v[5].identifier);
        CHECK(stats.invalidDeclaredSirets == 1);
    }

    TEST_CASE("agent keys are an equivalence by SIRET") {
        std::mt19937_64 rng(2);
        const std::vector<std::string> sirets = {"11111111100011", "22222222200022", "33333333300033", "", "12"};
        std::vector<AgentOccurrence> v;
        for (int i = 0; i < 200; ++i) v.push_back(occ(i + 1, "X", sirets[rng() % sirets.size()]));
        merge_by_declared_siret(v);
        for (const auto& a : v)
            for (const auto& b : v) {
                const bool valid = a.declaredSiret.size() == 14 && b.declaredSiret.size() == 14;
                if (valid) CHECK((a.agentKey == b.agentKey) == (a.declaredSiret == b.declaredSiret));
            }
    }
}

TEST_SUITE("registry") {
    using namespace foppa::registry;

    TEST_CASE("validate_siret") {
        CHECK(validate_siret("123 456 789 00013") == Identifier::full_siret("12345678900013"));
        CHECK(validate_siret("123456789") == Identifier::siren_only("123456789"));
        CHECK_FALSE(validate_siret("12AB"));
        CHECK_FALSE(validate_siret(""));
    }

    TEST_CASE("split_siret") {
        CHECK(split_siret(Identifier::full_siret("12345678900013")) ==
              std::pair<std::string, std::string>{"123456789", "00013"});
        CHECK(split_siret(Identifier::full_siret("00000000000001")) ==
              std::pair<std::string, std::string>{"000000000", "00001"});
        std::mt19937_64 rng(4);
        for (int i = 0; i < 200; ++i) {
            std::string s;
            for (int k = 0; k < 14; ++k) s += static_cast<char>('0' + rng() % 10);
            const auto id = Identifier::full_siret(s);
            auto [siren, nic] = split_siret(id);
            CHECK(siren + nic == s);
            CHECK(validate_siret(id.render()) == id);
        }
    }

    TEST_CASE("temporally_valid") {
        RegistryFacility f;
        f.openDate = Date{2008, 1, 1};
        CHECK(temporally_valid(f, {2015, 1, 1}));
        f.closeDate = Date{2012, 1, 1};
        CHECK_FALSE(temporally_valid(f, {2015, 1, 1}));
        RegistryFacility open;
        CHECK(temporally_valid(open, {2015, 1, 1}));
    }

    TEST_CASE("load: counts, orphans and indexes") {
        testing::TempDir dir("registry");
        testing::spit(dir / "entities.csv",
                      "siren,denomination,former_names,creation_date,closure_date,activity\n"
                      "123456789,Mairie de Lyon,Ville de Lyon,1990-01-01,,84.11Z\n"
                      "987654321,Acme SARL,,2001-05-05,,43.21A\n");
        testing::spit(dir / "facilities.csv",
                      "siret,names,street,zipcode,city,activity,open_date,close_date\n"
                      "12345678900013,,1 place de la Comédie,69001,Lyon,,,\n"
                      "98765432100019,Acme Paris,5 rue X,75008,Paris,43.21A,2005-01-01,\n"
                      "55555555500055,Ghost,,75001,Paris,,,\n");
        const auto reg = Registry::load(dir / "entities.csv", dir / "facilities.csv");
        CHECK(reg.entities().size() == 2);
        REQUIRE(reg.facilities().size() == 3);
        CHECK(reg.orphan_count() == 1);
        CHECK(reg.facilities()[2].orphan);
        CHECK(reg.facilities()[0].parentSiren == "123456789");
        CHECK(reg.facilities()[0].nic == "00013");
        CHECK(reg.entities()[0].legalNames == std::vector<std::string>{"MAIRIE DE LYON", "VILLE DE LYON"});

        for (const std::string dept : {"69", "75", "13"}) {
            std::vector<std::uint32_t> scan;
            for (std::uint32_t i = 0; i < reg.facilities().size(); ++i)
                if (reg.facilities()[i].department == dept) scan.push_back(i);
            CHECK(reg.by_department(dept) == scan);
        }
        for (std::uint32_t i = 0; i < reg.facilities().size(); ++i) {
            const auto& f = reg.facilities()[i];
            const auto& d = reg.by_department(f.department);
            CHECK(std::find(d.begin(), d.end(), i) != d.end());
            CHECK(reg.find_siret(f.siret) == i);
        }
        const auto& lyon = reg.by_name_token("LYON");
        CHECK(std::find(lyon.begin(), lyon.end(), 0u) != lyon.end());
        const auto& act = reg.by_activity("43");
        CHECK(act == std::vector<std::uint32_t>{1});
        const auto& pub = reg.by_activity("84");
        CHECK(pub == std::vector<std::uint32_t>{0});
    }

    TEST_CASE("bad facility SIRET is an input error") {
        Registry reg;
        RegistryFacility f;
        f.siret = "123";
        CHECK_THROWS_AS(reg.add_facility(f), InputError);
    }

    TEST_CASE("activity table uses the longest prefix") {
        ActivityTable t;
        t.add("45", "41");
        t.add("4523", "42");
        REQUIRE(t.compatible("45230000-8"));
        CHECK(*t.compatible("45230000-8") == std::set<std::string>{"42"});
        CHECK(*t.compatible("45100000") == std::set<std::string>{"41"});
        CHECK_FALSE(t.compatible("99000000"));
        CHECK(activity_prefix("43.21A", 2) == "43");
        CHECK(activity_prefix("4", 2).empty());
    }
}
