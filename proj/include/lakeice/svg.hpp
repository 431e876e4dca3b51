#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "lakeice/phenology.hpp"
#include "lakeice/timeline.hpp"

namespace lakeice {

// Deterministic SVG timeline plot: raw points, smoothed curve, the fitted
// piece-wise linear model and vertical event markers. Byte output depends
// only on the inputs, so plots can be golden-file tested.

namespace svg_detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace svg_detail

inline std::string render_svg_timeline(const WinterTimeline& raw, const WinterTimeline& smoothed,
                                       const PhenologyRecord& record) {
    if (raw.points.empty()) throw std::invalid_argument("cannot render an empty timeline");
    const double width = 900, height = 420;
    const double left = 60, right = 20, top = 40, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const int season_len = raw.season.length();
    auto x_of = [&](double day) { return left + plot_w * day / double(season_len - 1); };
    auto y_of = [&](double nf) { return top + plot_h * (100.0 - nf) / 100.0; };
    using svg_detail::num;

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
         num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
         "\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" +
         raw.lake_id + " " + raw.season.id() + "</text>\n";

    // frame and horizontal gridlines every 25 nf-percent
    s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) +
         "\" height=\"" + num(plot_h) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int nf = 0; nf <= 100; nf += 25) {
        double y = y_of(nf);
        s += "<line x1=\"" + num(left) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left + plot_w) +
             "\" y2=\"" + num(y) + "\" stroke=\"#ddd\"/>\n";
        s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" +
             std::to_string(nf) + "</text>\n";
    }
    // month ticks
    static const char* kMonthNames[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                        "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    for (int t = 0; t < season_len; ++t) {
        Date d = raw.season.date_of(DayIndex{t});
        if (d.day != 1) continue;
        double x = x_of(t);
        s += "<line x1=\"" + num(x) + "\" y1=\"" + num(top) + "\" x2=\"" + num(x) + "\" y2=\"" +
             num(top + plot_h) + "\" stroke=\"#eee\"/>\n";
        s += "<text x=\"" + num(x) + "\" y=\"" + num(top + plot_h + 16) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" +
             kMonthNames[d.month - 1] + "</text>\n";
    }
    s += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 10) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
         "non-frozen %</text>\n";

    // fitted model over the full season
    std::optional<DatePair> freeze, breakup;
    if (record.fus && record.fue) freeze = DatePair{*record.fus, *record.fue};
    if (record.bus && record.bue) breakup = DatePair{*record.bus, *record.bue};
    if (freeze || breakup) {
        std::string pts;
        for (int t = 0; t < season_len; ++t) {
            double nf = model_nf_general(DayIndex{t}, freeze, breakup);
            pts += num(x_of(t)) + "," + num(y_of(nf)) + " ";
        }
        if (!pts.empty()) pts.pop_back();
        s += "<polyline points=\"" + pts +
             "\" fill=\"none\" stroke=\"#00b2b2\" stroke-width=\"2\"/>\n";
    }

    // smoothed curve across admitted acquisitions
    if (smoothed.points.size() > 1) {
        std::string pts;
        for (const auto& pt : smoothed.points)
            pts += num(x_of(pt.day.value)) + "," + num(y_of(pt.nf_percent)) + " ";
        pts.pop_back();
        s += "<polyline points=\"" + pts +
             "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    }

    // raw points
    for (const auto& pt : raw.points)
        s += "<circle cx=\"" + num(x_of(pt.day.value)) + "\" cy=\"" + num(y_of(pt.nf_percent)) +
             "\" r=\"2.5\" fill=\"#666\"/>\n";

    // event markers
    auto marker = [&](const std::optional<DayIndex>& day, const char* name) {
        if (!day) return;
        double x = x_of(day->value);
        s += "<line class=\"event-marker\" x1=\"" + num(x) + "\" y1=\"" + num(top) + "\" x2=\"" +
             num(x) + "\" y2=\"" + num(top + plot_h) +
             "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
        s += "<text x=\"" + num(x + 3) + "\" y=\"" + num(top + 12) +
             "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">" + name +
             "</text>\n";
    };
    marker(record.fus, "FUS");
    marker(record.fue, "FUE");
    marker(record.bus, "BUS");
    marker(record.bue, "BUE");

    s += "</svg>\n";
    return s;
}

}  // namespace lakeice
