#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lakeice {

// Missing / out-of-range raster data. Excluded from all downstream statistics.
inline constexpr double kNoData = std::numeric_limits<double>::quiet_NaN();

inline bool is_no_data(double v) { return std::isnan(v); }

/// One spectral band as a row-major raster.
struct BandGrid {
    int width = 0;
    int height = 0;
    double gsd_m = 0.0;  // ground sampling distance, meters
    std::vector<double> values;

    double at(int col, int row) const { return values[std::size_t(row) * width + col]; }
    double& at(int col, int row) { return values[std::size_t(row) * width + col]; }

    bool empty() const { return width <= 0 || height <= 0; }

    void validate() const {
        if (empty()) throw std::invalid_argument("band grid is empty");
        if (values.size() != std::size_t(width) * std::size_t(height))
            throw std::invalid_argument("band grid value count does not match dimensions");
        if (!(gsd_m > 0.0)) throw std::invalid_argument("band grid gsd must be > 0");
    }
};

/// Per-pixel cloud flags, true = cloudy.
struct CloudMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> cloudy;

    bool at(int col, int row) const { return cloudy[std::size_t(row) * width + col] != 0; }
};

// Lake boundary in grid coordinates: (0,0) is the outer corner of pixel
// (0,0), pixel (c,r) spans [c,c+1] x [r,r+1] and has its center at
// (c+0.5, r+0.5).
struct LakeOutline {
    struct Vertex {
        double x = 0.0;
        double y = 0.0;
    };
    std::vector<Vertex> vertices;
    bool closed = true;
};

namespace geom {

/// Bilinear sample at fractional pixel-center coordinates; (0,0) is the
/// center of pixel (0,0). Out-of-range positions and samples touching
/// no-data neighbors yield kNoData.
inline double sample_bilinear(const BandGrid& g, double xc, double yc) {
    if (!(xc >= 0.0) || !(yc >= 0.0) || xc > g.width - 1 || yc > g.height - 1) return kNoData;
    int x0 = int(xc);
    int y0 = int(yc);
    if (x0 == g.width - 1) x0--;   // exact right edge: use the last full cell
    if (y0 == g.height - 1) y0--;
    if (g.width == 1) x0 = 0;
    if (g.height == 1) y0 = 0;
    double fx = xc - x0;
    double fy = yc - y0;
    int x1 = g.width == 1 ? x0 : x0 + 1;
    int y1 = g.height == 1 ? y0 : y0 + 1;

    double w00 = (1.0 - fx) * (1.0 - fy);
    double w10 = fx * (1.0 - fy);
    double w01 = (1.0 - fx) * fy;
    double w11 = fx * fy;
    double v00 = g.at(x0, y0), v10 = g.at(x1, y0), v01 = g.at(x0, y1), v11 = g.at(x1, y1);
    if ((w00 != 0.0 && is_no_data(v00)) || (w10 != 0.0 && is_no_data(v10)) ||
        (w01 != 0.0 && is_no_data(v01)) || (w11 != 0.0 && is_no_data(v11)))
        return kNoData;
    double acc = 0.0;
    if (w00 != 0.0) acc += w00 * v00;
    if (w10 != 0.0) acc += w10 * v10;
    if (w01 != 0.0) acc += w01 * v01;
    if (w11 != 0.0) acc += w11 * v11;
    return acc;
}

inline bool on_segment(double px, double py, double ax, double ay, double bx, double by) {
    double cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
    if (cross != 0.0) return false;
    return px >= std::min(ax, bx) && px <= std::max(ax, bx) && py >= std::min(ay, by) &&
           py <= std::max(ay, by);
}

/// Strict polygon containment: points on the boundary count as outside.
inline bool strictly_inside(const LakeOutline& poly, double px, double py) {
    const auto& v = poly.vertices;
    std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        if (on_segment(px, py, v[i].x, v[i].y, v[j].x, v[j].y)) return false;
    }
    // even-odd rule with the half-open edge convention
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = (i + 1) % n;
        if ((v[i].y > py) != (v[j].y > py)) {
            double xint = v[i].x + (py - v[i].y) / (v[j].y - v[i].y) * (v[j].x - v[i].x);
            if (px < xint) inside = !inside;
        }
    }
    return inside;
}

inline double signed_area(const LakeOutline& poly) {
    const auto& v = poly.vertices;
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t j = (i + 1) % v.size();
        a += v[i].x * v[j].y - v[j].x * v[i].y;
    }
    return 0.5 * a;
}

inline bool proper_intersect(const LakeOutline::Vertex& a, const LakeOutline::Vertex& b,
                             const LakeOutline::Vertex& c, const LakeOutline::Vertex& d) {
    auto orient = [](const LakeOutline::Vertex& p, const LakeOutline::Vertex& q,
                     const LakeOutline::Vertex& r) {
        double v = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        return v > 0.0 ? 1 : v < 0.0 ? -1 : 0;
    };
    int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4;
}

inline void validate_outline(const LakeOutline& poly) {
    std::size_t n = poly.vertices.size();
    if (n < 3) throw std::invalid_argument("lake outline needs at least 3 vertices");
    if (signed_area(poly) == 0.0) throw std::invalid_argument("lake outline has zero area");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // adjacent edges share a vertex
            if (proper_intersect(poly.vertices[i], poly.vertices[(i + 1) % n], poly.vertices[j],
                                 poly.vertices[(j + 1) % n]))
                throw std::invalid_argument("lake outline is self-intersecting");
        }
    }
}

}  // namespace geom

/// Resamples the grid at (x+dx, y+dy) with bilinear interpolation. Pixels
/// whose source position falls outside the grid become kNoData.
inline BandGrid apply_geolocation_shift(const BandGrid& grid, double dx, double dy) {
    grid.validate();
    if (std::abs(dx) >= grid.width || std::abs(dy) >= grid.height)
        throw std::invalid_argument("geolocation shift exceeds grid dimensions");
    BandGrid out{grid.width, grid.height, grid.gsd_m,
                 std::vector<double>(grid.values.size(), kNoData)};
    for (int r = 0; r < grid.height; ++r)
        for (int c = 0; c < grid.width; ++c)
            out.at(c, r) = geom::sample_bilinear(grid, c + dx, r + dy);
    return out;
}

// A pixel is clean when its four cell corners and its center lie strictly
// inside the outline, so mixed shoreline pixels never qualify.
inline std::vector<int> extract_clean_pixels(const LakeOutline& outline, const BandGrid& grid) {
    grid.validate();
    geom::validate_outline(outline);
    std::vector<int> ids;
    for (int r = 0; r < grid.height; ++r) {
        for (int c = 0; c < grid.width; ++c) {
            double x0 = c, y0 = r, x1 = c + 1.0, y1 = r + 1.0;
            bool clean = geom::strictly_inside(outline, x0, y0) &&
                         geom::strictly_inside(outline, x1, y0) &&
                         geom::strictly_inside(outline, x0, y1) &&
                         geom::strictly_inside(outline, x1, y1) &&
                         geom::strictly_inside(outline, c + 0.5, r + 0.5);
            if (clean) ids.push_back(r * grid.width + c);
        }
    }
    return ids;  // row-major scan keeps ids ascending
}

/// Upsamples by an integer factor. Output position (C,R) samples the input
/// at (C/f, R/f), so every input sample center is reproduced exactly; the
/// trailing border replicates the last row/column.
inline BandGrid upsample_band(const BandGrid& grid, int factor) {
    grid.validate();
    if (factor != 2 && factor != 4)
        throw std::invalid_argument("upsample factor must be 2 or 4, got " +
                                    std::to_string(factor));
    BandGrid out{grid.width * factor, grid.height * factor, grid.gsd_m / factor, {}};
    out.values.resize(std::size_t(out.width) * out.height);
    for (int r = 0; r < out.height; ++r) {
        double yc = std::min(double(r) / factor, double(grid.height - 1));
        for (int c = 0; c < out.width; ++c) {
            double xc = std::min(double(c) / factor, double(grid.width - 1));
            out.at(c, r) = geom::sample_bilinear(grid, xc, yc);
        }
    }
    return out;
}

/// Fraction of clean pixels not flagged cloudy.
inline double cloud_free_fraction(const std::vector<int>& clean_pixels, const CloudMask& mask) {
    if (clean_pixels.empty()) throw std::invalid_argument("clean pixel set is empty");
    std::size_t clear_count = 0;
    for (int id : clean_pixels) {
        int col = id % mask.width;
        int row = id / mask.width;
        if (row < 0 || row >= mask.height)
            throw std::invalid_argument("pixel id " + std::to_string(id) + " outside cloud mask");
        if (!mask.at(col, row)) clear_count++;
    }
    return double(clear_count) / double(clean_pixels.size());
}

}  // namespace lakeice
