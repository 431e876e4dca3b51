#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lakeice/core.hpp"

namespace lakeice {

/// One station-day of measurements; any field may be missing.
struct DailyWeather {
    std::optional<double> tmean_c;
    std::optional<double> precip_mm;
    std::optional<double> sunshine_h;
    std::optional<double> wind_kmh;
};

struct ClimateSeries {
    std::string station_id;
    std::map<Date, DailyWeather> daily;
};

enum class AggregateWindow { full, s2d, j2m };
enum class WeatherField { tmean, precip, sunshine, wind };
enum class AggregateKind { sum, mean };

inline std::string to_string(AggregateWindow w) {
    switch (w) {
        case AggregateWindow::full: return "full";
        case AggregateWindow::s2d: return "s2d";
        default: return "j2m";
    }
}

namespace detail {

inline std::pair<Date, Date> window_bounds(const WinterSeason& season, AggregateWindow w) {
    switch (w) {
        case AggregateWindow::s2d:
            return {season.first_day(), Date{season.start_year(), 12, 31}};
        case AggregateWindow::j2m:
            return {Date{season.start_year() + 1, 1, 1}, season.last_day()};
        default:
            return {season.first_day(), season.last_day()};
    }
}

inline std::optional<double> field_value(const DailyWeather& d, WeatherField f) {
    switch (f) {
        case WeatherField::tmean: return d.tmean_c;
        case WeatherField::precip: return d.precip_mm;
        case WeatherField::sunshine: return d.sunshine_h;
        default: return d.wind_kmh;
    }
}

}  // namespace detail

/// Sum or mean of the available values of one field inside a window.
/// Missing days are skipped, never imputed.
inline double seasonal_aggregate(const ClimateSeries& series, const WinterSeason& season,
                                 AggregateWindow window, WeatherField field, AggregateKind kind,
                                 int* n_days = nullptr) {
    auto [lo, hi] = detail::window_bounds(season, window);
    double acc = 0.0;
    int n = 0;
    for (auto it = series.daily.lower_bound(lo); it != series.daily.end() && it->first <= hi; ++it) {
        auto v = detail::field_value(it->second, field);
        if (!v) continue;
        acc += *v;
        n++;
    }
    if (n_days) *n_days = n;
    if (n == 0)
        throw std::invalid_argument("no data for field in window " + to_string(window) +
                                    " of winter " + season.id());
    return kind == AggregateKind::sum ? acc : acc / n;
}

/// Mean winter temperature: mean of available daily means over Sep 1 - May 31.
inline double mwt(const ClimateSeries& series, const WinterSeason& season) {
    return seasonal_aggregate(series, season, AggregateWindow::full, WeatherField::tmean,
                              AggregateKind::mean);
}

/// Accumulated freezing degree-days: magnitude of the summed sub-zero daily
/// mean temperatures, so colder winters score higher.
inline double afdd(const ClimateSeries& series, const WinterSeason& season) {
    auto [lo, hi] = detail::window_bounds(season, AggregateWindow::full);
    double acc = 0.0;
    int n = 0;
    for (auto it = series.daily.lower_bound(lo); it != series.daily.end() && it->first <= hi; ++it) {
        if (!it->second.tmean_c) continue;
        n++;
        if (*it->second.tmean_c < 0.0) acc -= *it->second.tmean_c;
    }
    if (n == 0) throw std::invalid_argument("no temperature data in winter " + season.id());
    return acc;
}

/// Indicator bundle for one winter, cached for the correlation table.
struct WinterIndicators {
    int start_year = 0;
    double mwt_c = 0.0;
    double afdd_c = 0.0;
    std::optional<double> sunshine_total_h, sunshine_s2d_h, sunshine_j2m_h;
    std::optional<double> precip_total_mm, precip_s2d_mm, precip_j2m_mm;
    std::optional<double> wind_mean_kmh, wind_s2d_kmh, wind_j2m_kmh;
};

inline WinterIndicators compute_indicators(const ClimateSeries& series, const WinterSeason& season) {
    WinterIndicators out;
    out.start_year = season.start_year();
    out.mwt_c = mwt(series, season);
    out.afdd_c = afdd(series, season);
    auto maybe = [&](AggregateWindow w, WeatherField f, AggregateKind k) -> std::optional<double> {
        try {
            return seasonal_aggregate(series, season, w, f, k);
        } catch (const std::invalid_argument&) {
            return std::nullopt;
        }
    };
    out.sunshine_total_h = maybe(AggregateWindow::full, WeatherField::sunshine, AggregateKind::sum);
    out.sunshine_s2d_h = maybe(AggregateWindow::s2d, WeatherField::sunshine, AggregateKind::sum);
    out.sunshine_j2m_h = maybe(AggregateWindow::j2m, WeatherField::sunshine, AggregateKind::sum);
    out.precip_total_mm = maybe(AggregateWindow::full, WeatherField::precip, AggregateKind::sum);
    out.precip_s2d_mm = maybe(AggregateWindow::s2d, WeatherField::precip, AggregateKind::sum);
    out.precip_j2m_mm = maybe(AggregateWindow::j2m, WeatherField::precip, AggregateKind::sum);
    out.wind_mean_kmh = maybe(AggregateWindow::full, WeatherField::wind, AggregateKind::mean);
    out.wind_s2d_kmh = maybe(AggregateWindow::s2d, WeatherField::wind, AggregateKind::mean);
    out.wind_j2m_kmh = maybe(AggregateWindow::j2m, WeatherField::wind, AggregateKind::mean);
    return out;
}

/// Centered, normalized Pearson correlation coefficient.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson series lengths differ");
    std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("pearson needs at least 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson undefined for constant series");
    return sxy / std::sqrt(sxx * syy);
}

struct TrendResult {
    std::string event;
    double slope_d_per_a = 0.0;
    double intercept = 0.0;
    int n_winters = 0;
};

/// Ordinary least squares of a per-winter value against the winter start
/// year; slope comes out in days per annum.
inline TrendResult linear_trend(const std::vector<std::pair<int, double>>& by_start_year,
                                const std::string& event = "") {
    int n = int(by_start_year.size());
    if (n < 2) throw std::invalid_argument("linear trend needs at least 2 winters");
    double mx = 0.0, my = 0.0;
    for (auto& [year, v] : by_start_year) {
        mx += year;
        my += v;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (auto& [year, v] : by_start_year) {
        sxy += (year - mx) * (v - my);
        sxx += (year - mx) * (year - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear trend needs at least 2 distinct winters");
    TrendResult r;
    r.event = event;
    r.slope_d_per_a = sxy / sxx;
    r.intercept = my - r.slope_d_per_a * mx;
    r.n_winters = n;
    return r;
}

/// Per-winter event values as day-of-winter indices (durations in days).
/// Absent events are skipped by the correlation machinery.
struct EventValues {
    int start_year = 0;
    std::optional<double> fus, fue, bus, bue, icd, cfd;
};

struct CorrelationEntry {
    std::string event;      // FUS, FUE, BUS, BUE, ICD, CFD
    std::string indicator;  // mwt, afdd, sunshine, precip, wind
    AggregateWindow window = AggregateWindow::full;
    int n = 0;
    std::optional<double> r;  // absent when the pair is unavailable
};

// Pairing plan: freeze-up events against Sep-Dec aggregates, break-up events
// against Jan-May aggregates, durations against full-winter aggregates; MWT
// and AFDD are always full-winter quantities.
inline std::vector<CorrelationEntry> correlate_events(const std::vector<EventValues>& events,
                                                      const std::vector<WinterIndicators>& indicators) {
    std::map<int, const WinterIndicators*> by_year;
    for (const auto& ind : indicators) by_year[ind.start_year] = &ind;

    struct EventSpec {
        const char* name;
        std::optional<double> EventValues::* field;
        AggregateWindow window;
    };
    const EventSpec event_specs[] = {
        {"FUS", &EventValues::fus, AggregateWindow::s2d},
        {"FUE", &EventValues::fue, AggregateWindow::s2d},
        {"BUS", &EventValues::bus, AggregateWindow::j2m},
        {"BUE", &EventValues::bue, AggregateWindow::j2m},
        {"ICD", &EventValues::icd, AggregateWindow::full},
        {"CFD", &EventValues::cfd, AggregateWindow::full},
    };

    auto indicator_value = [](const WinterIndicators& ind, const std::string& name,
                              AggregateWindow w) -> std::optional<double> {
        if (name == "mwt") return ind.mwt_c;
        if (name == "afdd") return ind.afdd_c;
        if (name == "sunshine")
            return w == AggregateWindow::s2d ? ind.sunshine_s2d_h
                 : w == AggregateWindow::j2m ? ind.sunshine_j2m_h
                                             : ind.sunshine_total_h;
        if (name == "precip")
            return w == AggregateWindow::s2d ? ind.precip_s2d_mm
                 : w == AggregateWindow::j2m ? ind.precip_j2m_mm
                                             : ind.precip_total_mm;
        return w == AggregateWindow::s2d ? ind.wind_s2d_kmh
             : w == AggregateWindow::j2m ? ind.wind_j2m_kmh
                                         : ind.wind_mean_kmh;
    };

    std::vector<CorrelationEntry> table;
    for (const auto& spec : event_specs) {
        for (const char* ind_name : {"mwt", "afdd", "sunshine", "precip", "wind"}) {
            bool windowed = std::string(ind_name) != "mwt" && std::string(ind_name) != "afdd";
            CorrelationEntry entry;
            entry.event = spec.name;
            entry.indicator = ind_name;
            entry.window = windowed ? spec.window : AggregateWindow::full;
            std::vector<double> xs, ys;
            for (const auto& ev : events) {
                auto it = by_year.find(ev.start_year);
                if (it == by_year.end()) continue;
                auto x = ev.*spec.field;
                auto y = indicator_value(*it->second, ind_name, entry.window);
                if (!x || !y) continue;
                xs.push_back(*x);
                ys.push_back(*y);
            }
            entry.n = int(xs.size());
            if (xs.size() >= 2) {
                try {
                    entry.r = pearson(ys, xs);
                } catch (const std::invalid_argument&) {
                    // constant series: leave the pair unavailable
                }
            }
            table.push_back(entry);
        }
    }
    return table;
}

/// Per-day frozen-percentage series, keyed by date.
using DailySeries = std::map<Date, double>;

/// Mean absolute difference over the days present in both series within one
/// winter.
inline double mad_compare(const DailySeries& a, const DailySeries& b, const WinterSeason& season) {
    double acc = 0.0;
    int n = 0;
    for (auto it = a.lower_bound(season.first_day());
         it != a.end() && it->first <= season.last_day(); ++it) {
        auto jt = b.find(it->first);
        if (jt == b.end()) continue;
        acc += std::abs(it->second - jt->second);
        n++;
    }
    if (n == 0) throw std::invalid_argument("no common days in winter " + season.id());
    return acc / n;
}

struct MadSummary {
    std::vector<std::pair<int, double>> per_winter;  // start_year -> MAD
    double mean = 0.0;
    double stddev = 0.0;  // sample std across winters, 0 when n < 2
};

inline MadSummary mad_compare_winters(const DailySeries& a, const DailySeries& b,
                                      const std::vector<WinterSeason>& seasons) {
    MadSummary s;
    for (const auto& season : seasons) {
        try {
            s.per_winter.emplace_back(season.start_year(), mad_compare(a, b, season));
        } catch (const std::invalid_argument&) {
            // winter without common days contributes nothing
        }
    }
    if (s.per_winter.empty()) throw std::invalid_argument("no common days in any winter");
    for (auto& [year, v] : s.per_winter) s.mean += v;
    s.mean /= double(s.per_winter.size());
    if (s.per_winter.size() > 1) {
        double acc = 0.0;
        for (auto& [year, v] : s.per_winter) acc += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(acc / double(s.per_winter.size() - 1));
    }
    return s;
}

}  // namespace lakeice
