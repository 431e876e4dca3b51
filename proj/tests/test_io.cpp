#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lakeice/io.hpp"

using namespace lakeice;

TEST_CASE("samples CSV parses a valid row") {
    std::string text =
        "lake_id,date,pixel_id,cloudy,label,b1,b2\n"
        "sils,2016-12-31,7,0,frozen,0.25,0.5\n";
    auto samples = parse_samples_csv_text(text);
    REQUIRE(samples.size() == 1);
    CHECK(samples[0].lake_id == "sils");
    CHECK(samples[0].date == Date{2016, 12, 31});
    CHECK(samples[0].pixel_id == 7);
    CHECK_FALSE(samples[0].cloudy);
    CHECK(samples[0].label == Label::frozen);
    CHECK(samples[0].bands == std::vector<double>{0.25, 0.5});
}

TEST_CASE("samples CSV rejects malformed input with line numbers") {
    std::string header = "lake_id,date,pixel_id,cloudy,label,b1\n";
    CHECK_THROWS_WITH(parse_samples_csv_text(header + "sils,2016-12-31,7,0,ice,0.5\n"),
                      Catch::Matchers::ContainsSubstring("line 2") &&
                          Catch::Matchers::ContainsSubstring("ice"));
    CHECK_THROWS_WITH(parse_samples_csv_text(header + "sils,2016-12-31,7,0,frozen\n"),
                      Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(parse_samples_csv_text(header + "sils,2016-12-31,7,2,frozen,0.5\n"),
                      Catch::Matchers::ContainsSubstring("cloudy"));
    CHECK_THROWS_WITH(parse_samples_csv_text(header + "sils,2016-12-31,7,0,frozen,abc\n"),
                      Catch::Matchers::ContainsSubstring("b1"));
    CHECK_THROWS_AS(parse_samples_csv_text("lake,when\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_samples_csv_text(""), std::invalid_argument);
}

TEST_CASE("samples survive a 10k row round trip") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> band(0.0, 1.0);
    std::vector<PixelSample> samples;
    samples.reserve(10000);
    for (int i = 0; i < 10000; ++i) {
        PixelSample s;
        s.lake_id = i % 2 ? "sils" : "silvaplana";
        s.date = add_days(Date{2016, 9, 1}, i % 270);
        s.pixel_id = i % 33;
        s.cloudy = i % 5 == 0;
        s.label = i % 3 == 0 ? Label::frozen : i % 3 == 1 ? Label::non_frozen : Label::unlabeled;
        s.bands = {band(rng), band(rng), band(rng)};
        samples.push_back(std::move(s));
    }
    std::string text = write_samples_csv_text(samples, 3);
    CHECK(parse_samples_csv_text(text) == samples);
    // canonical files round-trip bit-identically
    CHECK(write_samples_csv_text(parse_samples_csv_text(text), 3) == text);
}

TEST_CASE("meteo CSV parses complete and partial rows") {
    std::string text =
        "station_id,date,tmean_c,precip_mm,sunshine_h,wind_kmh\n"
        "SIA,2016-12-01,-3.5,2,6.5,12\n"
        "SIA,2016-12-02,-4,,,9\n";
    ClimateSeries series = parse_meteo_csv_text(text);
    CHECK(series.station_id == "SIA");
    REQUIRE(series.daily.size() == 2);
    const auto& full = series.daily.at(Date{2016, 12, 1});
    CHECK(full.tmean_c == -3.5);
    CHECK(full.precip_mm == 2.0);
    CHECK(full.sunshine_h == 6.5);
    CHECK(full.wind_kmh == 12.0);
    const auto& partial = series.daily.at(Date{2016, 12, 2});
    CHECK(partial.tmean_c == -4.0);
    CHECK_FALSE(partial.precip_mm.has_value());
    CHECK_FALSE(partial.sunshine_h.has_value());
    CHECK(partial.wind_kmh == 9.0);
}

TEST_CASE("meteo CSV rejects duplicates and mixed stations") {
    std::string header = "station_id,date,tmean_c,precip_mm,sunshine_h,wind_kmh\n";
    CHECK_THROWS_WITH(
        parse_meteo_csv_text(header + "SIA,2016-12-01,1,,,\nSIA,2016-12-01,2,,,\n"),
        Catch::Matchers::ContainsSubstring("duplicate date"));
    CHECK_THROWS_WITH(parse_meteo_csv_text(header + "SIA,2016-12-01,1,,,\nSAM,2016-12-02,2,,,\n"),
                      Catch::Matchers::ContainsSubstring("mixed station"));
    CHECK_THROWS_AS(parse_meteo_csv_text("bad header\n"), std::invalid_argument);
}

TEST_CASE("meteo round-trips a synthetic year") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> t(-20.0, 25.0);
    ClimateSeries series;
    series.station_id = "SYN1";
    for (int i = 0; i < 365; ++i) {
        DailyWeather w;
        w.tmean_c = t(rng);
        if (i % 7 != 0) w.precip_mm = std::abs(t(rng)) / 3.0;
        if (i % 11 != 0) w.sunshine_h = std::abs(t(rng)) / 4.0;
        if (i % 13 != 0) w.wind_kmh = std::abs(t(rng));
        series.daily[add_days(Date{2016, 1, 1}, i)] = w;
    }
    std::string text = write_meteo_csv_text(series);
    ClimateSeries back = parse_meteo_csv_text(text);
    CHECK(back.station_id == series.station_id);
    REQUIRE(back.daily.size() == series.daily.size());
    for (const auto& [date, w] : series.daily) {
        const auto& b = back.daily.at(date);
        CHECK(b.tmean_c == w.tmean_c);
        CHECK(b.precip_mm == w.precip_mm);
        CHECK(b.sunshine_h == w.sunshine_h);
        CHECK(b.wind_kmh == w.wind_kmh);
    }
    CHECK(write_meteo_csv_text(back) == text);
}

TEST_CASE("outline file parsing") {
    LakeOutline outline = parse_outline_text("0.5 0.5\n4.5 0.5\n4.5 3.5\n0.5 3.5\n");
    REQUIRE(outline.vertices.size() == 4);
    CHECK(outline.vertices[2].x == 4.5);
    CHECK(outline.vertices[2].y == 3.5);
    CHECK_THROWS_AS(parse_outline_text("0 0\n1 1\n"), std::invalid_argument);
    CHECK_THROWS_WITH(parse_outline_text("0 0\n1 1 2\n2 0\n"),
                      Catch::Matchers::ContainsSubstring("line 2"));
    std::string text = write_outline_text(outline);
    auto back = parse_outline_text(text);
    CHECK(back.vertices.size() == 4);
    CHECK(write_outline_text(back) == text);
}
