#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lakeice/climate.hpp"
#include "lakeice/core.hpp"
#include "lakeice/timeline.hpp"

namespace lakeice {

enum class LipEvent { fus, fue, bus, bue };

inline std::string to_string(LipEvent e) {
    switch (e) {
        case LipEvent::fus: return "FUS";
        case LipEvent::fue: return "FUE";
        case LipEvent::bus: return "BUS";
        default: return "BUE";
    }
}

inline LipEvent parse_lip_event(std::string_view token) {
    if (token == "FUS" || token == "fus") return LipEvent::fus;
    if (token == "FUE" || token == "fue") return LipEvent::fue;
    if (token == "BUS" || token == "bus") return LipEvent::bus;
    if (token == "BUE" || token == "bue") return LipEvent::bue;
    throw std::invalid_argument("unknown LIP event '" + std::string(token) + "'");
}

// Candidate days per event. A day qualifies when its (smoothed) percentage
// crosses the event threshold relative to the previous admitted day:
//   FUS: frozen% >= 30, previous < 30      FUE: frozen% >= 70, previous < 70
//   BUS: nf%     >= 30, previous < 30      BUE: nf%     >= 70, previous < 70
// The first point of a timeline has no previous day and never qualifies.
struct EventCandidates {
    std::vector<DayIndex> fus, fue, bus, bue;

    std::array<int, 4> counts() const {
        return {int(fus.size()), int(fue.size()), int(bus.size()), int(bue.size())};
    }
};

inline EventCandidates extract_candidates(const WinterTimeline& tl) {
    EventCandidates c;
    for (std::size_t i = 1; i < tl.points.size(); ++i) {
        double nf = tl.points[i].nf_percent;
        double nf_prev = tl.points[i - 1].nf_percent;
        double frz = 100.0 - nf;
        double frz_prev = 100.0 - nf_prev;
        DayIndex day = tl.points[i].day;
        if (frz >= 30.0 && frz_prev < 30.0) c.fus.push_back(day);
        if (frz >= 70.0 && frz_prev < 70.0) c.fue.push_back(day);
        if (nf >= 30.0 && nf_prev < 30.0) c.bus.push_back(day);
        if (nf >= 70.0 && nf_prev < 70.0) c.bue.push_back(day);
    }
    return c;
}

using DatePair = std::pair<DayIndex, DayIndex>;  // (start, end) of one transition

// Piece-wise linear "U with wings" non-frozen percentage. 100% wings outside
// the freeze season, linear ramps across freeze-up and break-up, 0% plateau
// while fully frozen. A coincident start/end makes the transition a step at
// that day. Either pair may be absent, which extends the adjacent plateau.
inline double model_nf_general(DayIndex t, const std::optional<DatePair>& freeze,
                               const std::optional<DatePair>& breakup) {
    if (freeze && freeze->second < freeze->first)
        throw std::invalid_argument("freeze-up dates out of order");
    if (breakup && breakup->second < breakup->first)
        throw std::invalid_argument("break-up dates out of order");
    if (freeze && breakup && breakup->first < freeze->second)
        throw std::invalid_argument("break-up before freeze-up end");
    if (breakup) {
        if (t >= breakup->second) return 100.0;
        if (t > breakup->first)
            return 100.0 * double(t - breakup->first) / double(breakup->second - breakup->first);
    }
    if (freeze) {
        if (t >= freeze->second) return 0.0;
        if (t > freeze->first)
            return 100.0 * double(freeze->second - t) / double(freeze->second - freeze->first);
        return 100.0;
    }
    return breakup ? 0.0 : 100.0;
}

inline double model_nf(DayIndex t, DayIndex fus, DayIndex fue, DayIndex bus, DayIndex bue) {
    return model_nf_general(t, DatePair{fus, fue}, DatePair{bus, bue});
}

/// Prior means are calendar days reused across seasons; sigma in days.
struct MonthDay {
    int month = 1;
    int day = 1;
};

struct PriorConfig {
    MonthDay mu_fus{12, 31};
    MonthDay mu_fue{1, 3};
    MonthDay mu_bus{4, 27};
    MonthDay mu_bue{4, 30};
    double sigma_days = 30.0;

    std::array<double, 4> resolve(const WinterSeason& season) const {
        if (!(sigma_days > 0.0)) throw std::invalid_argument("prior sigma must be > 0");
        auto idx = [&](const MonthDay& md) {
            int year = md.month >= 9 ? season.start_year() : season.start_year() + 1;
            return double(season.day_of(Date{year, md.month, md.day}).value);
        };
        std::array<double, 4> mu{idx(mu_fus), idx(mu_fue), idx(mu_bus), idx(mu_bue)};
        if (!(mu[0] <= mu[1] && mu[1] <= mu[2] && mu[2] <= mu[3]))
            throw std::invalid_argument("prior means must be in FUS<=FUE<=BUS<=BUE order");
        return mu;
    }
};

/// Product of the four unnormalized Gaussian prior factors. Normalization
/// constants cancel in the argmin and are omitted.
inline double prior_weight(const std::array<DayIndex, 4>& dates, const WinterSeason& season,
                           const PriorConfig& cfg) {
    auto mu = cfg.resolve(season);
    double p = 1.0;
    for (int e = 0; e < 4; ++e) {
        double z = (double(dates[std::size_t(e)].value) - mu[std::size_t(e)]) / cfg.sigma_days;
        p *= std::exp(-0.5 * z * z);
    }
    return p;
}

namespace phen_detail {

/// Prior over a subset of events (half fits use only their own factors).
inline double partial_prior(const std::optional<DatePair>& freeze,
                            const std::optional<DatePair>& breakup,
                            const std::array<double, 4>& mu, double sigma) {
    double p = 1.0;
    auto factor = [&](double day, double mean) {
        double z = (day - mean) / sigma;
        p *= std::exp(-0.5 * z * z);
    };
    if (freeze) {
        factor(double(freeze->first.value), mu[0]);
        factor(double(freeze->second.value), mu[1]);
    }
    if (breakup) {
        factor(double(breakup->first.value), mu[2]);
        factor(double(breakup->second.value), mu[3]);
    }
    return p;
}

inline double loss_general(const WinterTimeline& tl, const std::optional<DatePair>& freeze,
                           const std::optional<DatePair>& breakup, const std::array<double, 4>& mu,
                           double sigma, HuberParams huber_params) {
    double sum = 0.0;
    for (const auto& pt : tl.points)
        sum += huber(pt.nf_percent - model_nf_general(pt.day, freeze, breakup), huber_params);
    return sum / partial_prior(freeze, breakup, mu, sigma);
}

}  // namespace phen_detail

/// Loss of Eq-style fit: (1/P) * sum of Huber residuals between the admitted
/// (smoothed) nf percentages and the model curve. Residuals are in
/// percentage points.
inline double fit_loss(const WinterTimeline& tl, const std::array<DayIndex, 4>& dates,
                       const PriorConfig& cfg, HuberParams huber_params = {}) {
    auto mu = cfg.resolve(tl.season);
    if (!(dates[0] <= dates[1] && dates[1] <= dates[2] && dates[2] <= dates[3]))
        throw std::invalid_argument("fit dates must be in FUS<=FUE<=BUS<=BUE order");
    return phen_detail::loss_general(tl, DatePair{dates[0], dates[1]}, DatePair{dates[2], dates[3]},
                                     mu, cfg.sigma_days, huber_params);
}

inline constexpr int kMaxTransitionDays = 14;  // freeze-up and break-up each last <= two weeks

struct PhenologyRecord {
    std::string lake_id;
    WinterSeason season{0};
    std::optional<DayIndex> fus, fue, bus, bue;
    std::optional<int> icd_days, cfd_days;
    std::optional<double> fit_loss;
    bool corrected = false;
    std::string override_note;
    std::array<int, 4> candidate_counts{0, 0, 0, 0};
    // pre-override values of any replaced events, by event name
    std::vector<std::pair<std::string, int>> original_events;

    bool complete() const { return fus && fue && bus && bue; }
};

/// ICD = BUE - FUS, CFD = BUS - FUE; each absent when a constituent is.
inline void derive_durations(PhenologyRecord& rec) {
    rec.icd_days.reset();
    rec.cfd_days.reset();
    if (rec.fus && rec.bue) rec.icd_days = *rec.bue - *rec.fus;
    if (rec.fue && rec.bus) rec.cfd_days = *rec.bus - *rec.fue;
}

// Exhaustive search over candidate tuples obeying the event order
// FUS<=FUE<=BUS<=BUE and the two-week duration caps; the loss-minimizing
// tuple wins, ties go to the lexicographically earliest. When only one
// transition has candidates, that pair is fitted alone against the matching
// half model; when a transition has none, its events stay absent.
inline PhenologyRecord fit_phenology(const WinterTimeline& tl, const PriorConfig& cfg = {},
                                     HuberParams huber_params = {}) {
    if (tl.points.empty()) throw std::invalid_argument("cannot fit an empty timeline");
    PhenologyRecord rec;
    rec.lake_id = tl.lake_id;
    rec.season = tl.season;
    auto mu = cfg.resolve(tl.season);
    EventCandidates cand = extract_candidates(tl);
    rec.candidate_counts = cand.counts();

    auto feasible_pairs = [](const std::vector<DayIndex>& starts,
                             const std::vector<DayIndex>& ends) {
        std::vector<DatePair> pairs;
        for (DayIndex s : starts)
            for (DayIndex e : ends)
                if (s <= e && e - s <= kMaxTransitionDays) pairs.emplace_back(s, e);
        return pairs;
    };
    auto freeze_pairs = feasible_pairs(cand.fus, cand.fue);
    auto breakup_pairs = feasible_pairs(cand.bus, cand.bue);

    double best = std::numeric_limits<double>::infinity();
    if (!freeze_pairs.empty() && !breakup_pairs.empty()) {
        // joint fit; tuples enumerate in lexicographic (fus,fue,bus,bue)
        // order, so strict improvement keeps the earliest of tied tuples
        for (const auto& fp : freeze_pairs) {
            for (const auto& bp : breakup_pairs) {
                if (bp.first < fp.second) continue;  // FUE must not pass BUS
                double loss =
                    phen_detail::loss_general(tl, fp, bp, mu, cfg.sigma_days, huber_params);
                if (loss < best) {
                    best = loss;
                    rec.fus = fp.first;
                    rec.fue = fp.second;
                    rec.bus = bp.first;
                    rec.bue = bp.second;
                    rec.fit_loss = loss;
                }
            }
        }
        // a jointly infeasible candidate set (break-up strictly before
        // freeze-up) leaves the winter unresolved rather than half-fitted
    } else if (!freeze_pairs.empty()) {
        for (const auto& fp : freeze_pairs) {
            double loss =
                phen_detail::loss_general(tl, fp, std::nullopt, mu, cfg.sigma_days, huber_params);
            if (loss < best) {
                best = loss;
                rec.fus = fp.first;
                rec.fue = fp.second;
                rec.fit_loss = loss;
            }
        }
    } else if (!breakup_pairs.empty()) {
        for (const auto& bp : breakup_pairs) {
            double loss =
                phen_detail::loss_general(tl, std::nullopt, bp, mu, cfg.sigma_days, huber_params);
            if (loss < best) {
                best = loss;
                rec.bus = bp.first;
                rec.bue = bp.second;
                rec.fit_loss = loss;
            }
        }
    }
    derive_durations(rec);
    return rec;
}

/// Replaces events with manually verified dates. The result must still obey
/// the ordering and duration invariants; originals are retained.
inline PhenologyRecord apply_overrides(const PhenologyRecord& rec,
                                       const std::vector<std::pair<LipEvent, DayIndex>>& overrides,
                                       const std::string& note) {
    if (overrides.empty()) return rec;
    PhenologyRecord out = rec;
    for (const auto& [event, day] : overrides) {
        auto& slot = event == LipEvent::fus   ? out.fus
                     : event == LipEvent::fue ? out.fue
                     : event == LipEvent::bus ? out.bus
                                              : out.bue;
        if (slot) out.original_events.emplace_back(to_string(event), slot->value);
        slot = day;
    }
    auto check_order = [&](const std::optional<DayIndex>& a, const std::optional<DayIndex>& b,
                           const char* what) {
        if (a && b && *b < *a)
            throw std::invalid_argument(std::string("override violates ") + what + " order for " +
                                        out.lake_id + " winter " + out.season.id());
    };
    check_order(out.fus, out.fue, "FUS<=FUE");
    check_order(out.fue, out.bus, "FUE<=BUS");
    check_order(out.bus, out.bue, "BUS<=BUE");
    if (out.fus && out.fue && *out.fue - *out.fus > kMaxTransitionDays)
        throw std::invalid_argument("override makes freeze-up longer than two weeks");
    if (out.bus && out.bue && *out.bue - *out.bus > kMaxTransitionDays)
        throw std::invalid_argument("override makes break-up longer than two weeks");
    for (const auto& [event, day] : overrides)
        if (day.value < 0 || day.value >= out.season.length())
            throw std::invalid_argument("override date outside winter " + out.season.id());
    out.corrected = true;
    out.override_note = note;
    derive_durations(out);
    return out;
}

/// Event values for the correlation machinery, as day indices / duration days.
inline EventValues event_values(const PhenologyRecord& rec) {
    EventValues ev;
    ev.start_year = rec.season.start_year();
    auto lift = [](const std::optional<DayIndex>& d) -> std::optional<double> {
        if (!d) return std::nullopt;
        return double(d->value);
    };
    ev.fus = lift(rec.fus);
    ev.fue = lift(rec.fue);
    ev.bus = lift(rec.bus);
    ev.bue = lift(rec.bue);
    if (rec.icd_days) ev.icd = double(*rec.icd_days);
    if (rec.cfd_days) ev.cfd = double(*rec.cfd_days);
    return ev;
}

// Phenology JSON: one object per lake-winter.

inline nlohmann::json phenology_to_json(const PhenologyRecord& rec) {
    nlohmann::json j;
    j["lake_id"] = rec.lake_id;
    j["winter"] = rec.season.id();
    auto date_or_null = [&](const std::optional<DayIndex>& d) -> nlohmann::json {
        if (!d) return nullptr;
        return to_iso(rec.season.date_of(*d));
    };
    j["fus"] = date_or_null(rec.fus);
    j["fue"] = date_or_null(rec.fue);
    j["bus"] = date_or_null(rec.bus);
    j["bue"] = date_or_null(rec.bue);
    j["icd_days"] = rec.icd_days ? nlohmann::json(*rec.icd_days) : nlohmann::json(nullptr);
    j["cfd_days"] = rec.cfd_days ? nlohmann::json(*rec.cfd_days) : nlohmann::json(nullptr);
    j["fit_loss"] = rec.fit_loss ? nlohmann::json(*rec.fit_loss) : nlohmann::json(nullptr);
    j["corrected"] = rec.corrected;
    j["override_note"] = rec.override_note;
    j["candidates_counts"] = {{"fus", rec.candidate_counts[0]},
                              {"fue", rec.candidate_counts[1]},
                              {"bus", rec.candidate_counts[2]},
                              {"bue", rec.candidate_counts[3]}};
    if (!rec.original_events.empty()) {
        nlohmann::json orig = nlohmann::json::object();
        for (const auto& [name, day] : rec.original_events)
            orig[name] = to_iso(rec.season.date_of(DayIndex{day}));
        j["original_events"] = orig;
    }
    return j;
}

inline PhenologyRecord phenology_from_json(const nlohmann::json& j) {
    PhenologyRecord rec;
    try {
        rec.lake_id = j.at("lake_id").get<std::string>();
        rec.season = parse_season(j.at("winter").get<std::string>());
        auto day_of = [&](const char* key) -> std::optional<DayIndex> {
            const auto& v = j.at(key);
            if (v.is_null()) return std::nullopt;
            return rec.season.day_of(parse_date(v.get<std::string>()));
        };
        rec.fus = day_of("fus");
        rec.fue = day_of("fue");
        rec.bus = day_of("bus");
        rec.bue = day_of("bue");
        if (!j.at("icd_days").is_null()) rec.icd_days = j.at("icd_days").get<int>();
        if (!j.at("cfd_days").is_null()) rec.cfd_days = j.at("cfd_days").get<int>();
        if (!j.at("fit_loss").is_null()) rec.fit_loss = j.at("fit_loss").get<double>();
        rec.corrected = j.at("corrected").get<bool>();
        rec.override_note = j.at("override_note").get<std::string>();
        const auto& counts = j.at("candidates_counts");
        rec.candidate_counts = {counts.at("fus").get<int>(), counts.at("fue").get<int>(),
                                counts.at("bus").get<int>(), counts.at("bue").get<int>()};
        if (j.contains("original_events"))
            for (const auto& [name, date] : j.at("original_events").items())
                rec.original_events.emplace_back(
                    name, rec.season.day_of(parse_date(date.get<std::string>())).value);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid phenology JSON: ") + e.what());
    }
    return rec;
}

inline std::string write_phenology_json_text(const std::vector<PhenologyRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : records) arr.push_back(phenology_to_json(rec));
    return arr.dump(2) + "\n";
}

inline std::vector<PhenologyRecord> parse_phenology_json_text(const std::string& text) {
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid phenology JSON: ") + e.what());
    }
    if (!arr.is_array()) throw std::invalid_argument("phenology JSON must be an array");
    std::vector<PhenologyRecord> out;
    for (const auto& j : arr) out.push_back(phenology_from_json(j));
    return out;
}

inline void write_phenology_json(const std::filesystem::path& path,
                                 const std::vector<PhenologyRecord>& records) {
    write_text_file(path, write_phenology_json_text(records));
}

inline std::vector<PhenologyRecord> parse_phenology_json(const std::filesystem::path& path) {
    return parse_phenology_json_text(read_text_file(path));
}

}  // namespace lakeice
