#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "lakeice/core.hpp"
#include "lakeice/csv.hpp"
#include "lakeice/io.hpp"

namespace lakeice {

inline constexpr double kMinCloudFree = 0.30;
inline constexpr double kSmoothSigmaDays = 0.6;
inline constexpr double kSmoothWindowDays = 3.0;

/// One admitted acquisition.
struct TimelinePoint {
    DayIndex day;
    double nf_percent = 0.0;   // non-frozen % of the non-cloudy clean pixels
    double cloud_free = 1.0;   // fraction of clean pixels that are cloud-free
    int n_pixels = 0;          // non-cloudy clean pixels used
};

struct WinterTimeline {
    std::string lake_id;
    WinterSeason season{0};
    std::vector<TimelinePoint> points;  // strictly increasing day
};

/// Percentage of pixels classified frozen.
inline double frozen_percent(std::span<const Label> predictions) {
    if (predictions.empty())
        throw std::invalid_argument("frozen_percent needs at least one usable pixel");
    std::size_t frozen = 0;
    for (Label l : predictions) {
        if (l == Label::unlabeled)
            throw std::invalid_argument("frozen_percent got an unlabeled prediction");
        if (l == Label::frozen) frozen++;
    }
    return 100.0 * double(frozen) / double(predictions.size());
}

/// One classified acquisition before admission filtering.
struct DailyClassification {
    Date date;
    double cloud_free = 1.0;
    std::vector<Label> predictions;  // one per non-cloudy clean pixel
};

/// Keeps the acquisitions with cloud_free >= min_cloud_free (inclusive) and
/// turns them into a day-ascending timeline. One label per day: duplicate
/// dates are an error.
inline WinterTimeline build_timeline(std::string lake_id,
                                     std::vector<DailyClassification> acquisitions,
                                     const WinterSeason& season,
                                     double min_cloud_free = kMinCloudFree) {
    WinterTimeline tl;
    tl.lake_id = std::move(lake_id);
    tl.season = season;
    std::sort(acquisitions.begin(), acquisitions.end(),
              [](const DailyClassification& a, const DailyClassification& b) { return a.date < b.date; });
    for (std::size_t i = 0; i < acquisitions.size(); ++i) {
        const auto& acq = acquisitions[i];
        if (i > 0 && acq.date == acquisitions[i - 1].date)
            throw std::invalid_argument("duplicate acquisition date " + to_iso(acq.date) +
                                        " for lake " + tl.lake_id);
        DayIndex day = season.day_of(acq.date);  // throws when out of season
        if (acq.cloud_free < min_cloud_free) continue;
        TimelinePoint pt;
        pt.day = day;
        pt.nf_percent = 100.0 - frozen_percent(acq.predictions);
        pt.cloud_free = acq.cloud_free;
        pt.n_pixels = int(acq.predictions.size());
        tl.points.push_back(pt);
    }
    return tl;
}

// Gaussian smoothing on the irregular admitted-day grid: each value becomes
// the kernel-weighted mean of the points within window_days/2 of it. Cloud
// gaps are not interpolated; isolated points pass through unchanged.
inline WinterTimeline gaussian_smooth(const WinterTimeline& tl, double sigma_days = kSmoothSigmaDays,
                                      double window_days = kSmoothWindowDays) {
    if (!(sigma_days > 0.0)) throw std::invalid_argument("smoothing sigma must be > 0");
    for (std::size_t i = 1; i < tl.points.size(); ++i)
        if (tl.points[i].day <= tl.points[i - 1].day)
            throw std::invalid_argument("timeline days must be strictly increasing");
    WinterTimeline out = tl;
    double half_window = window_days / 2.0;
    for (std::size_t i = 0; i < tl.points.size(); ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < tl.points.size(); ++j) {
            double dd = double(tl.points[j].day - tl.points[i].day);
            if (std::abs(dd) > half_window) continue;
            double w = std::exp(-dd * dd / (2.0 * sigma_days * sigma_days));
            num += w * tl.points[j].nf_percent;
            den += w;
        }
        out.points[i].nf_percent = num / den;  // den >= 1 (self weight)
    }
    return out;
}

// Timeline CSV: `lake_id,winter,date,day_index,nf_percent,cloud_free,
// n_pixels,smoothed`, one row per admitted acquisition, raw rows
// (smoothed=0) before smoothed rows (smoothed=1) per lake-winter.

inline std::string write_timeline_csv_text(const std::vector<WinterTimeline>& raw,
                                           const std::vector<WinterTimeline>& smoothed) {
    if (raw.size() != smoothed.size())
        throw std::invalid_argument("raw/smoothed timeline counts differ");
    std::string out = "lake_id,winter,date,day_index,nf_percent,cloud_free,n_pixels,smoothed\n";
    auto emit = [&out](const WinterTimeline& tl, char flag) {
        for (const auto& pt : tl.points) {
            out += tl.lake_id;
            out += ',';
            out += tl.season.id();
            out += ',';
            out += to_iso(tl.season.date_of(pt.day));
            out += ',';
            out += std::to_string(pt.day.value);
            out += ',';
            out += csv::format_double(pt.nf_percent);
            out += ',';
            out += csv::format_double(pt.cloud_free);
            out += ',';
            out += std::to_string(pt.n_pixels);
            out += ',';
            out += flag;
            out += '\n';
        }
    };
    for (std::size_t i = 0; i < raw.size(); ++i) {
        emit(raw[i], '0');
        emit(smoothed[i], '1');
    }
    return out;
}

struct TimelineFile {
    std::vector<WinterTimeline> raw;
    std::vector<WinterTimeline> smoothed;
};

inline TimelineFile parse_timeline_csv_text(std::string_view text) {
    auto rows = csv::lines(text);
    if (rows.empty()) throw std::invalid_argument("timeline CSV is empty");
    if (rows[0] != "lake_id,winter,date,day_index,nf_percent,cloud_free,n_pixels,smoothed")
        throw std::invalid_argument("line 1: bad timeline header");
    std::map<std::pair<std::string, int>, std::pair<WinterTimeline, WinterTimeline>> groups;
    std::vector<std::pair<std::string, int>> order;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        int line_no = int(i) + 1;
        if (rows[i].empty()) continue;
        auto f = csv::split(rows[i]);
        if (f.size() != 8)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected 8 fields, got " + std::to_string(f.size()));
        std::string lake(f[0]);
        WinterSeason season = parse_season(f[1]);
        Date date = parse_date(f[2]);
        TimelinePoint pt;
        pt.day = DayIndex{int(csv::parse_int(f[3], line_no, "day_index"))};
        if (season.day_of(date) != pt.day)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": day_index does not match date");
        pt.nf_percent = csv::parse_double(f[4], line_no, "nf_percent");
        pt.cloud_free = csv::parse_double(f[5], line_no, "cloud_free");
        pt.n_pixels = int(csv::parse_int(f[6], line_no, "n_pixels"));
        bool smoothed_row;
        if (f[7] == "0")
            smoothed_row = false;
        else if (f[7] == "1")
            smoothed_row = true;
        else
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": smoothed must be 0 or 1");
        auto key = std::make_pair(lake, season.start_year());
        auto it = groups.find(key);
        if (it == groups.end()) {
            WinterTimeline empty{lake, season, {}};
            it = groups.emplace(key, std::make_pair(empty, empty)).first;
            order.push_back(key);
        }
        (smoothed_row ? it->second.second : it->second.first).points.push_back(pt);
    }
    TimelineFile out;
    for (const auto& key : order) {
        auto& [raw_tl, smooth_tl] = groups.at(key);
        auto check = [](const WinterTimeline& tl) {
            for (std::size_t i = 1; i < tl.points.size(); ++i)
                if (tl.points[i].day <= tl.points[i - 1].day)
                    throw std::invalid_argument("timeline rows for " + tl.lake_id + " winter " +
                                                tl.season.id() + " are not day-ascending");
        };
        check(raw_tl);
        check(smooth_tl);
        out.raw.push_back(std::move(raw_tl));
        out.smoothed.push_back(std::move(smooth_tl));
    }
    return out;
}

inline TimelineFile parse_timeline_csv(const std::filesystem::path& path) {
    return parse_timeline_csv_text(read_text_file(path));
}

inline void write_timeline_csv(const std::filesystem::path& path,
                               const std::vector<WinterTimeline>& raw,
                               const std::vector<WinterTimeline>& smoothed) {
    write_text_file(path, write_timeline_csv_text(raw, smoothed));
}

}  // namespace lakeice
