#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lakeice/climate.hpp"
#include "lakeice/core.hpp"
#include "lakeice/csv.hpp"
#include "lakeice/grid.hpp"

namespace lakeice {

enum class Label { frozen, non_frozen, unlabeled };

inline std::string to_string(Label l) {
    switch (l) {
        case Label::frozen: return "frozen";
        case Label::non_frozen: return "non_frozen";
        default: return "unlabeled";
    }
}

inline Label parse_label(std::string_view token, int line_no) {
    if (token == "frozen") return Label::frozen;
    if (token == "non_frozen") return Label::non_frozen;
    if (token == "unlabeled") return Label::unlabeled;
    throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown label '" +
                                std::string(token) + "'");
}

/// One clean pixel on one acquisition date.
struct PixelSample {
    std::string lake_id;
    Date date;
    int pixel_id = 0;
    bool cloudy = false;
    Label label = Label::unlabeled;
    std::vector<double> bands;

    friend bool operator==(const PixelSample&, const PixelSample&) = default;
};

// Samples CSV: header `lake_id,date,pixel_id,cloudy,label,b1,...,bK` with a
// fixed band count K per file. The lake_id must not contain commas.

inline std::vector<PixelSample> parse_samples_csv_text(std::string_view text) {
    auto rows = csv::lines(text);
    if (rows.empty()) throw std::invalid_argument("samples CSV is empty");
    auto header = csv::split(rows[0]);
    if (header.size() < 6 || header[0] != "lake_id" || header[1] != "date" ||
        header[2] != "pixel_id" || header[3] != "cloudy" || header[4] != "label")
        throw std::invalid_argument(
            "line 1: bad samples header, expected lake_id,date,pixel_id,cloudy,label,b1,...");
    std::size_t n_bands = header.size() - 5;
    for (std::size_t k = 0; k < n_bands; ++k)
        if (header[5 + k] != "b" + std::to_string(k + 1))
            throw std::invalid_argument("line 1: band column " + std::to_string(k + 1) +
                                        " must be named b" + std::to_string(k + 1));

    std::vector<PixelSample> out;
    out.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        int line_no = int(i) + 1;
        if (rows[i].empty()) continue;
        auto fields = csv::split(rows[i]);
        if (fields.size() != header.size())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
        PixelSample s;
        s.lake_id = std::string(fields[0]);
        if (s.lake_id.empty())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": empty lake_id");
        try {
            s.date = parse_date(fields[1]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
        }
        s.pixel_id = int(csv::parse_int(fields[2], line_no, "pixel_id"));
        if (fields[3] == "0")
            s.cloudy = false;
        else if (fields[3] == "1")
            s.cloudy = true;
        else
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": cloudy must be 0 or 1, got '" + std::string(fields[3]) +
                                        "'");
        s.label = parse_label(fields[4], line_no);
        s.bands.resize(n_bands);
        for (std::size_t k = 0; k < n_bands; ++k)
            s.bands[k] = csv::parse_double(fields[5 + k], line_no, "band b" + std::to_string(k + 1));
        out.push_back(std::move(s));
    }
    return out;
}

inline std::string write_samples_csv_text(const std::vector<PixelSample>& samples,
                                          std::size_t n_bands) {
    std::string out = "lake_id,date,pixel_id,cloudy,label";
    for (std::size_t k = 1; k <= n_bands; ++k) out += ",b" + std::to_string(k);
    out += "\n";
    for (const auto& s : samples) {
        if (s.bands.size() != n_bands)
            throw std::invalid_argument("sample band count " + std::to_string(s.bands.size()) +
                                        " does not match file band count " +
                                        std::to_string(n_bands));
        out += s.lake_id;
        out += ',';
        out += to_iso(s.date);
        out += ',';
        out += std::to_string(s.pixel_id);
        out += ',';
        out += s.cloudy ? '1' : '0';
        out += ',';
        out += to_string(s.label);
        for (double b : s.bands) {
            out += ',';
            out += csv::format_double(b);
        }
        out += '\n';
    }
    return out;
}

inline std::vector<PixelSample> parse_samples_csv(const std::filesystem::path& path) {
    return parse_samples_csv_text(read_text_file(path));
}

inline void write_samples_csv(const std::filesystem::path& path,
                              const std::vector<PixelSample>& samples, std::size_t n_bands) {
    write_text_file(path, write_samples_csv_text(samples, n_bands));
}

// Meteo CSV: header `station_id,date,tmean_c,precip_mm,sunshine_h,wind_kmh`;
// an empty field means the measurement is missing for that day.

inline ClimateSeries parse_meteo_csv_text(std::string_view text) {
    auto rows = csv::lines(text);
    if (rows.empty()) throw std::invalid_argument("meteo CSV is empty");
    if (rows[0] != "station_id,date,tmean_c,precip_mm,sunshine_h,wind_kmh")
        throw std::invalid_argument(
            "line 1: bad meteo header, expected "
            "station_id,date,tmean_c,precip_mm,sunshine_h,wind_kmh");
    ClimateSeries series;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        int line_no = int(i) + 1;
        if (rows[i].empty()) continue;
        auto fields = csv::split(rows[i]);
        if (fields.size() != 6)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected 6 fields, got " +
                                        std::to_string(fields.size()));
        std::string station(fields[0]);
        if (station.empty())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": empty station_id");
        if (series.station_id.empty())
            series.station_id = station;
        else if (series.station_id != station)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": mixed station ids '" + series.station_id + "' and '" +
                                        station + "'");
        Date date;
        try {
            date = parse_date(fields[1]);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (series.daily.count(date))
            throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate date " +
                                        to_iso(date));
        DailyWeather w;
        auto opt = [&](std::string_view f, std::string_view what) -> std::optional<double> {
            if (f.empty()) return std::nullopt;
            return csv::parse_double(f, line_no, what);
        };
        w.tmean_c = opt(fields[2], "tmean_c");
        w.precip_mm = opt(fields[3], "precip_mm");
        w.sunshine_h = opt(fields[4], "sunshine_h");
        w.wind_kmh = opt(fields[5], "wind_kmh");
        series.daily[date] = w;
    }
    return series;
}

inline std::string write_meteo_csv_text(const ClimateSeries& series) {
    std::string out = "station_id,date,tmean_c,precip_mm,sunshine_h,wind_kmh\n";
    auto field = [](const std::optional<double>& v) {
        return v ? csv::format_double(*v) : std::string{};
    };
    for (const auto& [date, w] : series.daily) {
        out += series.station_id;
        out += ',';
        out += to_iso(date);
        out += ',';
        out += field(w.tmean_c);
        out += ',';
        out += field(w.precip_mm);
        out += ',';
        out += field(w.sunshine_h);
        out += ',';
        out += field(w.wind_kmh);
        out += '\n';
    }
    return out;
}

inline ClimateSeries parse_meteo_csv(const std::filesystem::path& path) {
    return parse_meteo_csv_text(read_text_file(path));
}

inline void write_meteo_csv(const std::filesystem::path& path, const ClimateSeries& series) {
    write_text_file(path, write_meteo_csv_text(series));
}

// Outline file: one `x y` vertex per line, grid-pixel units.

inline LakeOutline parse_outline_text(std::string_view text) {
    LakeOutline outline;
    int line_no = 0;
    for (auto line : csv::lines(text)) {
        line_no++;
        if (line.empty()) continue;
        std::size_t sep = line.find(' ');
        if (sep == std::string_view::npos || line.find(' ', sep + 1) != std::string_view::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected 'x y' vertex");
        outline.vertices.push_back({csv::parse_double(line.substr(0, sep), line_no, "x"),
                                    csv::parse_double(line.substr(sep + 1), line_no, "y")});
    }
    if (outline.vertices.size() < 3)
        throw std::invalid_argument("outline file has fewer than 3 vertices");
    return outline;
}

inline LakeOutline parse_outline(const std::filesystem::path& path) {
    return parse_outline_text(read_text_file(path));
}

inline std::string write_outline_text(const LakeOutline& outline) {
    std::string out;
    for (const auto& v : outline.vertices)
        out += csv::format_double(v.x) + " " + csv::format_double(v.y) + "\n";
    return out;
}

}  // namespace lakeice
