#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lakeice/timeline.hpp"

using namespace lakeice;

namespace {

WinterTimeline make_timeline(std::vector<std::pair<int, double>> day_nf) {
    WinterTimeline tl;
    tl.lake_id = "sils";
    tl.season = WinterSeason{2016};
    for (auto [day, nf] : day_nf) tl.points.push_back({DayIndex{day}, nf, 1.0, 20});
    return tl;
}

}  // namespace

TEST_CASE("frozen percent") {
    std::vector<Label> all_frozen(4, Label::frozen);
    CHECK(frozen_percent(all_frozen) == 100.0);
    std::vector<Label> none(7, Label::non_frozen);
    CHECK(frozen_percent(none) == 0.0);
    std::vector<Label> mixed(25, Label::non_frozen);
    for (int i = 0; i < 17; ++i) mixed[std::size_t(i)] = Label::frozen;
    CHECK(frozen_percent(mixed) == 68.0);
    CHECK_THROWS_AS(frozen_percent({}), std::invalid_argument);
}

TEST_CASE("build_timeline admits acquisitions at the 30% boundary inclusively") {
    WinterSeason season{2016};
    std::vector<DailyClassification> acqs;
    acqs.push_back({Date{2016, 11, 1}, 0.29, {Label::frozen, Label::frozen}});
    acqs.push_back({Date{2016, 11, 2}, 0.30, {Label::frozen, Label::non_frozen}});
    acqs.push_back({Date{2016, 11, 3}, 0.95, {Label::non_frozen, Label::non_frozen}});
    WinterTimeline tl = build_timeline("sils", acqs, season);
    REQUIRE(tl.points.size() == 2);
    CHECK(tl.points[0].day == season.day_of(Date{2016, 11, 2}));
    CHECK(tl.points[0].nf_percent == 50.0);
    CHECK(tl.points[0].n_pixels == 2);
    CHECK(tl.points[1].nf_percent == 100.0);
}

TEST_CASE("build_timeline rejects duplicate dates and off-season dates") {
    WinterSeason season{2016};
    std::vector<DailyClassification> dup;
    dup.push_back({Date{2016, 11, 1}, 1.0, {Label::frozen}});
    dup.push_back({Date{2016, 11, 1}, 1.0, {Label::frozen}});
    CHECK_THROWS_WITH(build_timeline("sils", dup, season),
                      Catch::Matchers::ContainsSubstring("duplicate"));
    std::vector<DailyClassification> off;
    off.push_back({Date{2016, 7, 1}, 1.0, {Label::frozen}});
    CHECK_THROWS_AS(build_timeline("sils", off, season), std::invalid_argument);
}

TEST_CASE("admitted set equals a brute-force filter on a random winter") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> cf(0.0, 1.0);
    WinterSeason season{2016};
    std::vector<DailyClassification> acqs;
    std::vector<Date> expected;
    for (int d = 0; d < season.length(); d += 1 + int(rng() % 3)) {
        DailyClassification acq;
        acq.date = season.date_of(DayIndex{d});
        acq.cloud_free = cf(rng);
        acq.predictions = {rng() % 2 ? Label::frozen : Label::non_frozen};
        if (acq.cloud_free >= 0.30) expected.push_back(acq.date);
        acqs.push_back(std::move(acq));
    }
    WinterTimeline tl = build_timeline("sils", acqs, season);
    REQUIRE(tl.points.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(season.date_of(tl.points[i].day) == expected[i]);
}

TEST_CASE("smoothing leaves single points and constants unchanged") {
    WinterTimeline single = make_timeline({{10, 42.5}});
    CHECK(gaussian_smooth(single).points[0].nf_percent == 42.5);

    WinterTimeline constant = make_timeline({{10, 33.0}, {11, 33.0}, {12, 33.0}, {14, 33.0}});
    for (const auto& pt : gaussian_smooth(constant).points)
        CHECK(pt.nf_percent == Catch::Approx(33.0).margin(1e-12));
}

TEST_CASE("three-day spike smooths to the direct kernel formula") {
    WinterTimeline tl = make_timeline({{20, 0.0}, {21, 100.0}, {22, 0.0}});
    WinterTimeline sm = gaussian_smooth(tl);  // sigma 0.6, window 3
    double w = std::exp(-1.0 / (2.0 * 0.6 * 0.6));
    CHECK(sm.points[1].nf_percent == Catch::Approx(100.0 / (1.0 + 2.0 * w)).margin(1e-12));
    CHECK(sm.points[0].nf_percent == Catch::Approx(100.0 * w / (1.0 + w)).margin(1e-12));
    // days and cloud fields unchanged
    CHECK(sm.points[1].day.value == 21);
    CHECK(sm.points[1].cloud_free == 1.0);
    CHECK(sm.points[1].n_pixels == 20);
}

TEST_CASE("smoothing is mass-bounded and translation-equivariant") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> nf(0.0, 100.0);
    std::vector<std::pair<int, double>> values;
    int day = 5;
    for (int i = 0; i < 60; ++i) {
        values.emplace_back(day, nf(rng));
        day += 1 + int(rng() % 4);
    }
    WinterTimeline tl = make_timeline(values);
    WinterTimeline sm = gaussian_smooth(tl);
    for (std::size_t i = 0; i < tl.points.size(); ++i) {
        double lo = tl.points[i].nf_percent, hi = lo;
        for (const auto& other : tl.points) {
            if (std::abs(other.day - tl.points[i].day) > 1.5) continue;
            lo = std::min(lo, other.nf_percent);
            hi = std::max(hi, other.nf_percent);
        }
        CHECK(sm.points[i].nf_percent >= lo - 1e-12);
        CHECK(sm.points[i].nf_percent <= hi + 1e-12);
    }
    // shifting every day by a constant shifts the output identically
    WinterTimeline shifted = tl;
    for (auto& pt : shifted.points) pt.day.value += 17;
    WinterTimeline sm_shifted = gaussian_smooth(shifted);
    for (std::size_t i = 0; i < tl.points.size(); ++i) {
        CHECK(sm_shifted.points[i].nf_percent == Catch::Approx(sm.points[i].nf_percent).margin(1e-12));
        CHECK(sm_shifted.points[i].day.value == sm.points[i].day.value + 17);
    }
}

TEST_CASE("timeline CSV round-trips") {
    WinterTimeline raw = make_timeline({{0, 100.0}, {121, 27.5}, {122, 1.0 / 3.0}});
    raw.points[1].cloud_free = 0.4375;
    raw.points[2].n_pixels = 7;
    WinterTimeline smooth = gaussian_smooth(raw);
    std::string text = write_timeline_csv_text({raw}, {smooth});
    TimelineFile back = parse_timeline_csv_text(text);
    REQUIRE(back.raw.size() == 1);
    REQUIRE(back.smoothed.size() == 1);
    CHECK(back.raw[0].lake_id == "sils");
    CHECK(back.raw[0].season.start_year() == 2016);
    REQUIRE(back.raw[0].points.size() == 3);
    CHECK(back.raw[0].points[1].nf_percent == 27.5);
    CHECK(back.raw[0].points[1].cloud_free == 0.4375);
    CHECK(back.raw[0].points[2].nf_percent == 1.0 / 3.0);
    CHECK(back.smoothed[0].points.size() == 3);
    CHECK(write_timeline_csv_text(back.raw, back.smoothed) == text);

    CHECK_THROWS_AS(parse_timeline_csv_text("bad\n"), std::invalid_argument);
}
