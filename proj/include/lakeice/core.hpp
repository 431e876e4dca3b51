#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lakeice {

// Calendar date, whole days only. Acquisition timestamps within a day are
// out of scope for the pipeline.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    friend constexpr auto operator<=>(const Date&, const Date&) = default;
};

namespace detail {

inline std::chrono::year_month_day to_ymd(const Date& d) {
    return std::chrono::year_month_day{std::chrono::year{d.year},
                                       std::chrono::month{static_cast<unsigned>(d.month)},
                                       std::chrono::day{static_cast<unsigned>(d.day)}};
}

}  // namespace detail

inline bool is_valid(const Date& d) { return detail::to_ymd(d).ok(); }

/// Days since 1970-01-01.
inline int to_serial(const Date& d) {
    return std::chrono::sys_days{detail::to_ymd(d)}.time_since_epoch().count();
}

inline Date from_serial(int serial) {
    std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{serial}}};
    return Date{int(ymd.year()), int(unsigned(ymd.month())), int(unsigned(ymd.day()))};
}

inline Date add_days(const Date& d, int n) { return from_serial(to_serial(d) + n); }

inline std::string to_iso(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

/// Parses strict ISO-8601 `YYYY-MM-DD`.
inline Date parse_date(std::string_view text) {
    auto fail = [&] {
        throw std::invalid_argument("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') fail();
    for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (text[i] < '0' || text[i] > '9') fail();
    auto num = [&](size_t pos, size_t len) {
        int v = 0;
        for (size_t i = pos; i < pos + len; ++i) v = v * 10 + (text[i] - '0');
        return v;
    };
    Date d{num(0, 4), num(5, 2), num(8, 2)};
    if (!is_valid(d)) fail();
    return d;
}

/// Offset in days from Sep 1 of a winter season; 0 = Sep 1.
struct DayIndex {
    int value = 0;

    friend constexpr auto operator<=>(const DayIndex&, const DayIndex&) = default;
    friend constexpr int operator-(DayIndex a, DayIndex b) { return a.value - b.value; }
};

// One observation season: Sep 1 of start_year through May 31 of the next
// year. Day indices count from Sep 1; leap days fall inside naturally.
class WinterSeason {
public:
    explicit WinterSeason(int start_year) : start_year_(start_year) {}

    int start_year() const { return start_year_; }
    Date first_day() const { return Date{start_year_, 9, 1}; }
    Date last_day() const { return Date{start_year_ + 1, 5, 31}; }
    int length() const { return to_serial(last_day()) - to_serial(first_day()) + 1; }

    /// Season label, e.g. "2016-17".
    std::string id() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", start_year_, (start_year_ + 1) % 100);
        return buf;
    }

    bool contains(const Date& d) const { return d >= first_day() && d <= last_day(); }

    DayIndex day_of(const Date& d) const {
        if (!contains(d))
            throw std::invalid_argument("date " + to_iso(d) + " outside winter season " + id());
        return DayIndex{to_serial(d) - to_serial(first_day())};
    }

    Date date_of(DayIndex idx) const {
        if (idx.value < 0 || idx.value >= length())
            throw std::invalid_argument("day index " + std::to_string(idx.value) +
                                        " outside winter season " + id());
        return add_days(first_day(), idx.value);
    }

    friend bool operator==(const WinterSeason& a, const WinterSeason& b) {
        return a.start_year_ == b.start_year_;
    }
    friend bool operator<(const WinterSeason& a, const WinterSeason& b) {
        return a.start_year_ < b.start_year_;
    }

private:
    int start_year_;
};

/// Season a date belongs to: Sep-Dec map to the starting year, Jan-May to the
/// preceding one. Jun-Aug dates are out of season.
inline WinterSeason season_of(const Date& d) {
    if (d.month >= 9) return WinterSeason{d.year};
    if (d.month <= 5) return WinterSeason{d.year - 1};
    throw std::invalid_argument("date " + to_iso(d) + " falls outside any winter season");
}

/// Accepts "2016-17" and "2016-2017".
inline WinterSeason parse_season(std::string_view id) {
    auto fail = [&] {
        throw std::invalid_argument("invalid winter id '" + std::string(id) +
                                    "', expected YYYY-YY or YYYY-YYYY");
    };
    auto dash = id.find('-');
    if (dash == std::string_view::npos) fail();
    std::string_view a = id.substr(0, dash), b = id.substr(dash + 1);
    if (a.size() != 4 || (b.size() != 2 && b.size() != 4)) fail();
    for (char c : a)
        if (c < '0' || c > '9') fail();
    for (char c : b)
        if (c < '0' || c > '9') fail();
    int start = std::stoi(std::string(a));
    int end = std::stoi(std::string(b));
    if (b.size() == 2 ? end != (start + 1) % 100 : end != start + 1) fail();
    return WinterSeason{start};
}

struct HuberParams {
    double phi = 1.35;
};

/// Huber norm: z^2 inside |z| <= phi, linear continuation 2*phi*|z| - phi^2
/// outside. Both branches meet with matching value and slope at |z| = phi.
inline double huber(double z, HuberParams params = {}) {
    if (!(params.phi > 0.0)) throw std::invalid_argument("huber shape parameter must be > 0");
    double a = z < 0 ? -z : z;
    if (a <= params.phi) return z * z;
    return 2.0 * params.phi * a - params.phi * params.phi;
}

}  // namespace lakeice
