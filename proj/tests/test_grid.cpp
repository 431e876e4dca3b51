#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "lakeice/grid.hpp"

using namespace lakeice;

namespace {

BandGrid make_grid(int w, int h, double gsd, std::vector<double> values) {
    return BandGrid{w, h, gsd, std::move(values)};
}

// independent winding-number containment; test outlines keep safely clear of
// cell corners so boundary handling never matters here
bool oracle_inside(const LakeOutline& poly, double px, double py) {
    int winding = 0;
    const auto& v = poly.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        if (a.y <= py) {
            if (b.y > py && (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x) > 0) winding++;
        } else {
            if (b.y <= py && (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x) < 0) winding--;
        }
    }
    return winding != 0;
}

std::vector<int> oracle_clean_pixels(const LakeOutline& poly, int w, int h) {
    std::vector<int> ids;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            bool ok = oracle_inside(poly, c, r) && oracle_inside(poly, c + 1, r) &&
                      oracle_inside(poly, c, r + 1) && oracle_inside(poly, c + 1, r + 1) &&
                      oracle_inside(poly, c + 0.5, r + 0.5);
            if (ok) ids.push_back(r * w + c);
        }
    return ids;
}

}  // namespace

TEST_CASE("identity shift returns the grid unchanged") {
    BandGrid g = make_grid(3, 2, 250.0, {1, 2, 3, 4, 5, 6});
    BandGrid out = apply_geolocation_shift(g, 0.0, 0.0);
    CHECK(out.values == g.values);
}

TEST_CASE("half-pixel shift interpolates at the midpoint") {
    BandGrid g = make_grid(2, 2, 250.0, {0, 1, 0, 1});
    BandGrid out = apply_geolocation_shift(g, 0.5, 0.0);
    CHECK(out.at(0, 0) == 0.5);
    CHECK(out.at(0, 1) == 0.5);
    // source column 1.5 is outside; border carries the no-data sentinel
    CHECK(is_no_data(out.at(1, 0)));
    CHECK(is_no_data(out.at(1, 1)));
}

TEST_CASE("sensor shift matches the analytic bilinear formula on a ramp") {
    const int w = 6, h = 5;
    auto ramp = [](double x, double y) { return 3.0 + 0.7 * x - 1.3 * y; };
    BandGrid g = make_grid(w, h, 250.0, std::vector<double>(std::size_t(w) * h));
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) g.at(c, r) = ramp(c, r);
    const double dx = 0.75, dy = 0.85;
    BandGrid out = apply_geolocation_shift(g, dx, dy);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (c + dx > w - 1 || r + dy > h - 1) {
                CHECK(is_no_data(out.at(c, r)));
            } else {
                // bilinear interpolation reproduces a plane exactly
                CHECK(out.at(c, r) == Catch::Approx(ramp(c + dx, r + dy)).margin(1e-12));
            }
        }
}

TEST_CASE("forward then inverse shift restores interior plane values") {
    const int w = 8, h = 8;
    BandGrid g = make_grid(w, h, 250.0, std::vector<double>(std::size_t(w) * h));
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) g.at(c, r) = 10.0 - 0.4 * c + 2.1 * r;
    BandGrid back = apply_geolocation_shift(apply_geolocation_shift(g, 0.75, 0.85), -0.75, -0.85);
    for (int r = 1; r < h - 1; ++r)
        for (int c = 1; c < w - 1; ++c)
            if (!is_no_data(back.at(c, r)))
                CHECK(back.at(c, r) == Catch::Approx(g.at(c, r)).margin(1e-9));
}

TEST_CASE("shift input validation") {
    BandGrid empty;
    CHECK_THROWS_AS(apply_geolocation_shift(empty, 0.1, 0.1), std::invalid_argument);
    BandGrid g = make_grid(2, 2, 250.0, {1, 2, 3, 4});
    CHECK_THROWS_AS(apply_geolocation_shift(g, 2.5, 0.0), std::invalid_argument);
}

TEST_CASE("clean pixels of a centered square outline") {
    BandGrid g = make_grid(5, 5, 250.0, std::vector<double>(25, 1.0));
    LakeOutline sq;
    sq.vertices = {{0.75, 0.75}, {3.25, 0.75}, {3.25, 3.25}, {0.75, 3.25}};
    auto ids = extract_clean_pixels(sq, g);
    CHECK(ids == oracle_clean_pixels(sq, 5, 5));
    CHECK(ids == std::vector<int>{6, 7, 11, 12});  // the 2x2 fully interior block
}

TEST_CASE("outline smaller than one pixel yields no clean pixels") {
    BandGrid g = make_grid(5, 5, 250.0, std::vector<double>(25, 1.0));
    LakeOutline tiny;
    tiny.vertices = {{2.1, 2.1}, {2.6, 2.1}, {2.6, 2.6}, {2.1, 2.6}};
    CHECK(extract_clean_pixels(tiny, g).empty());
}

TEST_CASE("outline covering the whole grid keeps every pixel") {
    BandGrid g = make_grid(5, 5, 250.0, std::vector<double>(25, 1.0));
    LakeOutline big;
    big.vertices = {{-1, -1}, {6, -1}, {6, 6}, {-1, 6}};
    CHECK(extract_clean_pixels(big, g).size() == 25);
}

TEST_CASE("clean pixels are invariant under vertex-order reversal") {
    BandGrid g = make_grid(7, 7, 250.0, std::vector<double>(49, 1.0));
    LakeOutline poly;
    poly.vertices = {{0.6, 1.2}, {5.4, 0.8}, {6.3, 4.4}, {3.1, 6.2}, {0.4, 4.9}};
    LakeOutline reversed = poly;
    std::reverse(reversed.vertices.begin(), reversed.vertices.end());
    auto a = extract_clean_pixels(poly, g);
    CHECK(a == extract_clean_pixels(reversed, g));
    CHECK(a == oracle_clean_pixels(poly, 7, 7));
}

TEST_CASE("degenerate outlines are rejected") {
    BandGrid g = make_grid(5, 5, 250.0, std::vector<double>(25, 1.0));
    LakeOutline two;
    two.vertices = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(extract_clean_pixels(two, g), std::invalid_argument);
    LakeOutline collinear;
    collinear.vertices = {{0, 0}, {2, 2}, {4, 4}};
    CHECK_THROWS_AS(extract_clean_pixels(collinear, g), std::invalid_argument);
    LakeOutline bowtie;
    bowtie.vertices = {{0, 0}, {4, 4}, {4, 0}, {0, 4}};
    CHECK_THROWS_AS(extract_clean_pixels(bowtie, g), std::invalid_argument);
}

TEST_CASE("upsampling a constant grid stays constant") {
    BandGrid g = make_grid(3, 3, 500.0, std::vector<double>(9, 7.5));
    BandGrid out = upsample_band(g, 2);
    CHECK(out.width == 6);
    CHECK(out.height == 6);
    CHECK(out.gsd_m == 250.0);
    for (double v : out.values) CHECK(v == 7.5);
}

TEST_CASE("upsampling a ramp hits the midpoint between source centers") {
    BandGrid g = make_grid(2, 1, 500.0, {0.0, 2.0});
    BandGrid out = upsample_band(g, 2);
    CHECK(out.width == 4);
    CHECK(out.at(0, 0) == 0.0);
    CHECK(out.at(1, 0) == 1.0);
    CHECK(out.at(2, 0) == 2.0);  // input centers reproduce exactly
}

TEST_CASE("upsampling equals the per-point bilinear oracle") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    BandGrid g = make_grid(4, 4, 1000.0, {});
    g.values.resize(16);
    for (auto& v : g.values) v = dist(rng);
    for (int factor : {2, 4}) {
        BandGrid out = upsample_band(g, factor);
        double lo = *std::min_element(g.values.begin(), g.values.end());
        double hi = *std::max_element(g.values.begin(), g.values.end());
        for (int r = 0; r < out.height; ++r)
            for (int c = 0; c < out.width; ++c) {
                double x = std::min(double(c) / factor, 3.0);
                double y = std::min(double(r) / factor, 3.0);
                int x0 = std::min(int(x), 2), y0 = std::min(int(y), 2);
                double fx = x - x0, fy = y - y0;
                double expect = (1 - fx) * (1 - fy) * g.at(x0, y0) +
                                fx * (1 - fy) * g.at(x0 + 1, y0) +
                                (1 - fx) * fy * g.at(x0, y0 + 1) +
                                fx * fy * g.at(x0 + 1, y0 + 1);
                CHECK(out.at(c, r) == Catch::Approx(expect).margin(1e-12));
                CHECK(out.at(c, r) >= lo - 1e-12);
                CHECK(out.at(c, r) <= hi + 1e-12);
            }
    }
    CHECK_THROWS_AS(upsample_band(g, 3), std::invalid_argument);
}

TEST_CASE("cloud-free fraction") {
    CloudMask mask;
    mask.width = 11;
    mask.height = 3;
    mask.cloudy.assign(33, 0);
    std::vector<int> pixels(33);
    for (int i = 0; i < 33; ++i) pixels[std::size_t(i)] = i;

    CHECK(cloud_free_fraction(pixels, mask) == 1.0);
    for (auto& c : mask.cloudy) c = 1;
    CHECK(cloud_free_fraction(pixels, mask) == 0.0);
    // 7 of 33 clear, the smallest usable count on the smallest lake
    for (int i = 0; i < 7; ++i) mask.cloudy[std::size_t(i)] = 0;
    CHECK(cloud_free_fraction(pixels, mask) == Catch::Approx(7.0 / 33.0).margin(1e-15));
    CHECK_THROWS_AS(cloud_free_fraction({}, mask), std::invalid_argument);
}
