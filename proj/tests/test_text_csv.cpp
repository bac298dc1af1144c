#include <doctest.h>

#include <random>
#include <sstream>

#include "foppa/csv.hpp"
#include "foppa/text.hpp"
#include "foppa/types.hpp"

using namespace foppa;

TEST_SUITE("text") {
    TEST_CASE("fold maps Latin letters to upper-case ASCII") {
        CHECK(text::fold_upper_ascii("Brié-et-Angonnes") == "BRIE ET ANGONNES");
        CHECK(text::fold_upper_ascii("Œuvre ŒIL") == "OEUVRE OEIL");
        CHECK(text::fold_upper_ascii("Straße") == "STRASSE");
        CHECK(text::fold_upper_ascii("a\xff" "b") == "A B");  // invalid byte
    }

    TEST_CASE("scaled decimals accept both decimal marks and space grouping") {
        CHECK(text::parse_scaled_decimal("12 000,50", 2) == 1200050);
        CHECK(text::parse_scaled_decimal("12\xc2\xa0" "000.5", 2) == 1200050);
        CHECK(text::parse_scaled_decimal("0,125", 2) == 13);
        CHECK(text::parse_scaled_decimal("60", 6) == 60000000);
        CHECK_FALSE(text::parse_scaled_decimal("-3", 2));
        CHECK_FALSE(text::parse_scaled_decimal("abc", 2));
        CHECK_FALSE(text::parse_scaled_decimal("", 2));
    }

    TEST_CASE("format_scaled renders fixed decimals") {
        CHECK(text::format_scaled(1200050, 2, 2) == "12000.50");
        CHECK(text::format_scaled(5, 2, 2) == "0.05");
        CHECK(text::format_scaled(33333333, 6, 2) == "33.33");
    }

    TEST_CASE("doubles round-trip through their text form") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 1000; ++i) {
            const double v = u(rng);
            CHECK(text::parse_double(text::format_double(v)) == v);
        }
    }
}

TEST_SUITE("types") {
    TEST_CASE("dates parse in the accepted layouts") {
        CHECK(Date::parse("2015-03-04") == Date{2015, 3, 4});
        CHECK(Date::parse("2015-03-04T10:00:00") == Date{2015, 3, 4});
        CHECK(Date::parse("04/03/2015") == Date{2015, 3, 4});
        CHECK(Date::parse("04/03/15") == Date{2015, 3, 4});
        CHECK_FALSE(Date::parse("2015-02-30"));
        CHECK_FALSE(Date::parse("yesterday"));
        CHECK(Date{2015, 3, 4}.to_string() == "2015-03-04");
    }

    TEST_CASE("identifiers render and parse back") {
        const auto s = Identifier::full_siret("12345678900013");
        CHECK(s.siren() == "123456789");
        CHECK(Identifier::parse(s.render()) == s);
        const auto u = Identifier::internal_code(1);
        CHECK(u.render() == "U000001");
        CHECK(Identifier::parse("U000001") == u);
        CHECK_FALSE(u.is_registry_id());
        CHECK(u.siren().empty());
        CHECK_THROWS_AS(Identifier::full_siret("1234"), std::invalid_argument);
        CHECK_THROWS_AS(Identifier::parse("1234"), std::invalid_argument);
    }

    TEST_CASE("internal codes never look like registry identifiers") {
        for (std::uint64_t seq : {1ull, 999999ull, 12345678ull, 1234567890123ull}) {
            const auto code = Identifier::internal_code(seq).render();
            CHECK(code.front() == 'U');
            CHECK_FALSE(text::is_ascii_digits(code));
        }
    }

    TEST_CASE("weights print with at least two decimals") {
        CHECK(Weight::from_integer(60).to_string() == "60.00");
        CHECK(Weight::from_hundredths(3333).to_string() == "33.33");
        CHECK(Weight{12345678}.to_string() == "12.345678");
    }
}

TEST_SUITE("csv") {
    TEST_CASE("one well-formed line gives one row") {
        std::istringstream in("a,b\n1,2\n");
        const auto t = csv::read(in);
        CHECK(t.header == std::vector<std::string>{"a", "b"});
        REQUIRE(t.rows.size() == 1);
        CHECK(t.skipped.empty());
    }

    TEST_CASE("a stray quote skips only its line") {
        std::istringstream in("a,b\n1,2\n3,x\"y\n\"unterminated,4\n5,6\n");
        const auto t = csv::read(in);
        CHECK(t.rows.size() == 2);
        CHECK(t.skipped.size() == 2);
        CHECK(t.rowLines == std::vector<std::size_t>{2, 5});
    }

    TEST_CASE("wrong field count is malformed") {
        std::istringstream in("a,b\n1,2,3\n4,5\n");
        const auto t = csv::read(in);
        CHECK(t.rows.size() == 1);
        CHECK(t.skipped.size() == 1);
    }

    TEST_CASE("byte-order mark is ignored") {
        std::istringstream in("\xef\xbb\xbf" "a,b\n1,2\n");
        CHECK(csv::read(in).header[0] == "a");
    }

    TEST_CASE("writer output reads back, newlines included, in multiline mode") {
        std::mt19937_64 rng(9);
        const std::string alphabet = "ab,\"\n\r ;é";
        std::vector<std::vector<std::string>> rows;
        for (int r = 0; r < 200; ++r) {
            std::vector<std::string> row;
            for (int c = 0; c < 3; ++c) {
                std::string f;
                const auto len = rng() % 8;
                for (std::size_t k = 0; k < len; ++k) f += alphabet[rng() % alphabet.size()];
                row.push_back(f);
            }
            rows.push_back(row);
        }
        std::ostringstream out;
        csv::Writer w(out);
        w.row({"x", "y", "z"});
        for (const auto& r : rows) w.row(r);
        std::istringstream in(out.str());
        const auto t = csv::read(in, csv::Dialect{',', true});
        CHECK(t.skipped.empty());
        CHECK(t.rows == rows);
    }

    TEST_CASE("quoting only when needed") {
        CHECK(csv::quote_field("plain") == "plain");
        CHECK(csv::quote_field("a,b") == "\"a,b\"");
        CHECK(csv::quote_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    }
}
