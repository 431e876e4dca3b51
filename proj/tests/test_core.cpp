#include <catch2/catch_amalgamated.hpp>

#include "lakeice/core.hpp"

using namespace lakeice;

TEST_CASE("winter season spans Sep 1 to May 31") {
    WinterSeason w{2016};
    CHECK(w.first_day() == Date{2016, 9, 1});
    CHECK(w.last_day() == Date{2017, 5, 31});
    CHECK(w.length() == 273);
    CHECK(w.id() == "2016-17");
    // leap day inside the 2015-16 season
    CHECK(WinterSeason{2015}.length() == 274);
    CHECK(WinterSeason{2009}.id() == "2009-10");
    CHECK(WinterSeason{1999}.id() == "1999-00");
}

TEST_CASE("day_of_winter") {
    WinterSeason w{2016};
    CHECK(w.day_of(Date{2016, 9, 1}).value == 0);
    // hand calendar walk: 29 remaining Sep days + Oct 31 + Nov 30 + Dec 31
    CHECK(w.day_of(Date{2016, 12, 31}).value == 121);
    CHECK_THROWS_AS(w.day_of(Date{2017, 6, 1}), std::invalid_argument);
    CHECK_THROWS_AS(w.day_of(Date{2016, 8, 31}), std::invalid_argument);
}

TEST_CASE("day index round-trips through date_of for whole seasons") {
    for (int year : {2015, 2016}) {
        WinterSeason w{year};
        for (int i = 0; i < w.length(); ++i) {
            CHECK(w.day_of(w.date_of(DayIndex{i})).value == i);
        }
        CHECK_THROWS_AS(w.date_of(DayIndex{w.length()}), std::invalid_argument);
        CHECK_THROWS_AS(w.date_of(DayIndex{-1}), std::invalid_argument);
    }
}

TEST_CASE("season_of maps dates to their winter") {
    CHECK(season_of(Date{2016, 9, 1}).start_year() == 2016);
    CHECK(season_of(Date{2016, 12, 31}).start_year() == 2016);
    CHECK(season_of(Date{2017, 1, 1}).start_year() == 2016);
    CHECK(season_of(Date{2017, 5, 31}).start_year() == 2016);
    CHECK_THROWS_AS(season_of(Date{2017, 7, 15}), std::invalid_argument);
}

TEST_CASE("season id parsing") {
    CHECK(parse_season("2016-17").start_year() == 2016);
    CHECK(parse_season("2016-2017").start_year() == 2016);
    CHECK(parse_season("2009-10").start_year() == 2009);
    CHECK(parse_season("1999-00").start_year() == 1999);
    CHECK_THROWS_AS(parse_season("2016-18"), std::invalid_argument);
    CHECK_THROWS_AS(parse_season("2016"), std::invalid_argument);
    CHECK_THROWS_AS(parse_season("2016-7"), std::invalid_argument);
}

TEST_CASE("date parsing and formatting") {
    CHECK(parse_date("2016-09-01") == Date{2016, 9, 1});
    CHECK(to_iso(Date{2016, 9, 1}) == "2016-09-01");
    CHECK_THROWS_AS(parse_date("2016-13-01"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("2017-02-29"), std::invalid_argument);
    CHECK_THROWS_AS(parse_date("2016/09/01"), std::invalid_argument);
    CHECK(parse_date("2016-02-29") == Date{2016, 2, 29});
}

TEST_CASE("huber norm") {
    HuberParams p;  // phi = 1.35
    CHECK(huber(0.0, p) == 0.0);
    CHECK(huber(1.35, p) == Catch::Approx(1.8225).margin(1e-15));
    CHECK(huber(3.0, p) == Catch::Approx(6.2775).margin(1e-15));
    CHECK_THROWS_AS(huber(1.0, HuberParams{0.0}), std::invalid_argument);
}

TEST_CASE("huber is even and the branches agree at the joint") {
    HuberParams p{1.35};
    for (double z : {0.0, 0.1, 0.5, 1.0, 1.35, 1.4, 2.0, 10.0, 123.4}) {
        CHECK(huber(z, p) == huber(-z, p));
    }
    // continuity: quadratic and linear branch at |z| = phi
    double quadratic = p.phi * p.phi;
    double linear = 2.0 * p.phi * p.phi - p.phi * p.phi;
    CHECK(std::abs(quadratic - linear) < 1e-12);
    // monotone in |z|
    double prev = -1.0;
    for (double z = 0.0; z <= 5.0; z += 0.01) {
        double h = huber(z, p);
        CHECK(h >= prev);
        prev = h;
    }
}
