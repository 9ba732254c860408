#include <doctest.h>

#include "topicforge/common/csv.hpp"
#include "topicforge/common/dates.hpp"
#include "topicforge/common/error.hpp"
#include "topicforge/common/hash.hpp"
#include "topicforge/common/rng.hpp"

using namespace topicforge;

TEST_SUITE("common") {

TEST_CASE("csv reader handles quoting, embedded newlines and CRLF") {
    const auto rows = csv::parse("a,b\r\n\"x,1\",\"line\nbreak\"\r\n\"say \"\"hi\"\"\",\n");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].fields == std::vector<std::string>{"x,1", "line\nbreak"});
    CHECK(rows[2].fields == std::vector<std::string>{"say \"hi\"", ""});
    CHECK(rows[2].line == 4);
}

TEST_CASE("csv quote round-trips through the parser") {
    const std::vector<std::string> fields = {"plain", "with,comma", "with \"quote\"", "multi\nline", ""};
    const auto rows = csv::parse(csv::join(fields) + "\n");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].fields == fields);
}

TEST_CASE("format_double is shortest round-trip") {
    for (double v : {0.1, 164.25, -1e-300, 1.0 / 3.0, 12345678.0}) {
        CHECK(*csv::parse_double(csv::format_double(v)) == v);
    }
    CHECK(csv::format_double(0.1) == "0.1");
    CHECK_FALSE(csv::parse_double("12x").has_value());
}

TEST_CASE("header lookup reports the missing column") {
    const auto rows = csv::parse("Date,Open\n");
    csv::Header h(rows[0]);
    CHECK(h.find("Open") == 1u);
    CHECK_THROWS_AS(h.require("Close"), InputError);
}

TEST_CASE("dates parse, print and know weekdays") {
    const auto d = Date::parse("2021-10-02");
    REQUIRE(d);
    CHECK(d->str() == "2021-10-02");
    CHECK(d->weekday() == 5);
    CHECK(Date::from_ymd(1970, 1, 1).days == 0);
    CHECK_FALSE(Date::parse("2021-02-30").has_value());
}

TEST_CASE("timestamps normalize offsets to UTC") {
    const auto t = Timestamp::parse("2022-09-29 22:40:47+00:00");
    REQUIRE(t);
    CHECK(t->str() == "2022-09-29 22:40:47+00:00");
    CHECK(Timestamp::parse("2022-09-29T22:40:47Z") == t);
    CHECK(Timestamp::parse("2022-09-30 00:40:47+02:00") == t);
    CHECK_FALSE(Timestamp::parse("2022-09-29 25:40:47+00:00").has_value());
}

TEST_CASE("sha256 matches the published test vector") {
    CHECK(hash::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(hash::fnv1a("") == 0xcbf29ce484222325ULL);
}

TEST_CASE("rng is reproducible and in range") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(a.below(7) == b.below(7));
    }
    double sum = 0, sq = 0;
    Rng n(1);
    const int count = 20000;
    for (int i = 0; i < count; ++i) {
        const double z = n.normal();
        sum += z;
        sq += z * z;
    }
    CHECK(std::fabs(sum / count) < 0.05);
    CHECK(std::fabs(sq / count - 1.0) < 0.05);
}

}
