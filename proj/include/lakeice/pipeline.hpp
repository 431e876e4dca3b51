#pragma once

#include <algorithm>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lakeice/classify.hpp"
#include "lakeice/climate.hpp"
#include "lakeice/core.hpp"
#include "lakeice/csv.hpp"
#include "lakeice/io.hpp"
#include "lakeice/phenology.hpp"
#include "lakeice/svg.hpp"
#include "lakeice/synth.hpp"
#include "lakeice/timeline.hpp"

namespace lakeice {

inline constexpr const char* kToolName = "lakeice";
inline constexpr const char* kToolVersion = "0.1.0";

// Resolved settings for one CLI invocation. File-based keys load from a
// key=value config file; command-line flags override file values. Paths left
// empty default to the conventional product names inside out_dir.
struct PipelineConfig {
    std::string out_dir = "out";
    std::string samples, meteo, model, predictions, timelines, phenology, truth, overrides;
    std::string compare_a, compare_b;

    double cost = 0.1;
    std::uint64_t seed = 0;

    double min_cloud_free = kMinCloudFree;
    double smooth_sigma_days = kSmoothSigmaDays;
    double smooth_window_days = kSmoothWindowDays;

    PriorConfig prior;
    double huber_phi = 1.35;

    synth::SynthConfig synth_cfg;
};

namespace pipeline_detail {

inline MonthDay parse_month_day(std::string_view text) {
    auto dash = text.find('-');
    if (dash == std::string_view::npos)
        throw std::invalid_argument("expected MM-DD, got '" + std::string(text) + "'");
    MonthDay md{int(csv::parse_int(text.substr(0, dash), 0, "month")),
                int(csv::parse_int(text.substr(dash + 1), 0, "day"))};
    if (md.month < 1 || md.month > 12 || md.day < 1 || md.day > 31)
        throw std::invalid_argument("invalid month-day '" + std::string(text) + "'");
    return md;
}

inline std::string format_month_day(const MonthDay& md) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d-%02d", md.month, md.day);
    return buf;
}

inline std::vector<synth::SynthLake> parse_lakes(std::string_view text) {
    std::vector<synth::SynthLake> lakes;
    for (auto part : csv::split(text)) {
        auto colon = part.find(':');
        if (colon == std::string_view::npos)
            throw std::invalid_argument("lakes entry '" + std::string(part) +
                                        "' must be name:pixels");
        lakes.push_back({std::string(part.substr(0, colon)),
                         int(csv::parse_int(part.substr(colon + 1), 0, "pixel count"))});
    }
    return lakes;
}

/// "2000-2019" inclusive range or a comma list of start years.
inline std::vector<int> parse_winters(std::string_view text) {
    std::vector<int> years;
    auto dash = text.find('-');
    if (dash != std::string_view::npos && text.find(',') == std::string_view::npos) {
        int lo = int(csv::parse_int(text.substr(0, dash), 0, "winter range start"));
        int hi = int(csv::parse_int(text.substr(dash + 1), 0, "winter range end"));
        if (hi < lo) throw std::invalid_argument("winter range end before start");
        for (int y = lo; y <= hi; ++y) years.push_back(y);
    } else {
        for (auto part : csv::split(text))
            years.push_back(int(csv::parse_int(part, 0, "winter start year")));
    }
    return years;
}

}  // namespace pipeline_detail

/// Applies one key=value setting; unknown keys are rejected.
inline void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
    using pipeline_detail::parse_month_day;
    auto num = [&] { return csv::parse_double(value, 0, key); };
    auto str = [&] { return std::string(value); };
    if (key == "out_dir") cfg.out_dir = str();
    else if (key == "samples") cfg.samples = str();
    else if (key == "meteo") cfg.meteo = str();
    else if (key == "model") cfg.model = str();
    else if (key == "predictions") cfg.predictions = str();
    else if (key == "timelines") cfg.timelines = str();
    else if (key == "phenology") cfg.phenology = str();
    else if (key == "truth") cfg.truth = str();
    else if (key == "overrides") cfg.overrides = str();
    else if (key == "cost") cfg.cost = num();
    else if (key == "seed") cfg.seed = std::uint64_t(csv::parse_int(value, 0, "seed"));
    else if (key == "min_cloud_free") cfg.min_cloud_free = num();
    else if (key == "smooth_sigma_days") cfg.smooth_sigma_days = num();
    else if (key == "smooth_window_days") cfg.smooth_window_days = num();
    else if (key == "huber_phi") cfg.huber_phi = num();
    else if (key == "prior_sigma_days") cfg.prior.sigma_days = num();
    else if (key == "prior_mu_fus") cfg.prior.mu_fus = parse_month_day(value);
    else if (key == "prior_mu_fue") cfg.prior.mu_fue = parse_month_day(value);
    else if (key == "prior_mu_bus") cfg.prior.mu_bus = parse_month_day(value);
    else if (key == "prior_mu_bue") cfg.prior.mu_bue = parse_month_day(value);
    else if (key == "lakes") cfg.synth_cfg.lakes = pipeline_detail::parse_lakes(value);
    else if (key == "winters") cfg.synth_cfg.winters = pipeline_detail::parse_winters(value);
    else if (key == "n_bands") cfg.synth_cfg.n_bands = int(csv::parse_int(value, 0, "n_bands"));
    else if (key == "class_separation") cfg.synth_cfg.class_separation = num();
    else if (key == "cloud_rate") cfg.synth_cfg.cloud_rate = num();
    else if (key == "cloud_fn_rate") cfg.synth_cfg.cloud_fn_rate = num();
    else if (key == "label_noise") cfg.synth_cfg.label_noise = num();
    else if (key == "fraction_noise") cfg.synth_cfg.fraction_noise = num();
    else if (key == "meteo_noise_c") cfg.synth_cfg.meteo_noise_c = num();
    else throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
}

/// key = value lines; blank lines and #-comments allowed.
inline void load_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
    std::string text = read_text_file(path);
    int line_no = 0;
    for (auto line : csv::lines(text)) {
        line_no++;
        std::string_view sv = line;
        while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
        if (sv.empty() || sv.front() == '#') continue;
        auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                        ": expected key = value");
        auto trim = [](std::string_view v) {
            while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
            while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r'))
                v.remove_suffix(1);
            return v;
        };
        try {
            apply_setting(cfg, trim(sv.substr(0, eq)), trim(sv.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": " +
                                        e.what());
        }
    }
}

inline void validate_config(const PipelineConfig& cfg) {
    if (!(cfg.cost > 0.0)) throw std::invalid_argument("cost must be > 0");
    if (cfg.min_cloud_free < 0.0 || cfg.min_cloud_free > 1.0)
        throw std::invalid_argument("min_cloud_free must be in [0,1]");
    if (!(cfg.smooth_sigma_days > 0.0))
        throw std::invalid_argument("smooth_sigma_days must be > 0");
    if (cfg.smooth_window_days < 0.0)
        throw std::invalid_argument("smooth_window_days must be >= 0");
    if (!(cfg.huber_phi > 0.0)) throw std::invalid_argument("huber_phi must be > 0");
    if (!(cfg.prior.sigma_days > 0.0)) throw std::invalid_argument("prior_sigma_days must be > 0");
    const auto& sc = cfg.synth_cfg;
    for (auto [name, rate] : {std::pair{"cloud_rate", sc.cloud_rate},
                              {"cloud_fn_rate", sc.cloud_fn_rate},
                              {"label_noise", sc.label_noise}})
        if (rate < 0.0 || rate > 1.0)
            throw std::invalid_argument(std::string(name) + " must be in [0,1]");
    if (sc.fraction_noise < 0.0) throw std::invalid_argument("fraction_noise must be >= 0");
    if (sc.meteo_noise_c < 0.0) throw std::invalid_argument("meteo_noise_c must be >= 0");
    if (sc.n_bands < 1) throw std::invalid_argument("n_bands must be >= 1");
    if (!(sc.class_separation > 0.0)) throw std::invalid_argument("class_separation must be > 0");
    for (const auto& lake : sc.lakes)
        if (lake.n_pixels < 1 || lake.id.empty())
            throw std::invalid_argument("each lake needs a name and >= 1 clean pixel");
}

namespace pipeline_detail {

inline std::filesystem::path resolve(const std::string& explicit_path,
                                     const std::filesystem::path& out_dir,
                                     const char* default_name) {
    return explicit_path.empty() ? out_dir / default_name : std::filesystem::path(explicit_path);
}

inline std::filesystem::path require_input(const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::exists(p))
        throw std::invalid_argument(std::string("missing ") + what + " input: " + p.string());
    return p;
}

inline void ensure_out_dir(const PipelineConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.out_dir);
}

inline nlohmann::json settings_json(const PipelineConfig& cfg) {
    nlohmann::json s;
    s["cost"] = cfg.cost;
    s["seed"] = cfg.seed;
    s["min_cloud_free"] = cfg.min_cloud_free;
    s["smooth_sigma_days"] = cfg.smooth_sigma_days;
    s["smooth_window_days"] = cfg.smooth_window_days;
    s["huber_phi"] = cfg.huber_phi;
    s["prior_sigma_days"] = cfg.prior.sigma_days;
    s["prior_mu_fus"] = format_month_day(cfg.prior.mu_fus);
    s["prior_mu_fue"] = format_month_day(cfg.prior.mu_fue);
    s["prior_mu_bus"] = format_month_day(cfg.prior.mu_bus);
    s["prior_mu_bue"] = format_month_day(cfg.prior.mu_bue);
    // published numbers are self-describing
    s["residual_units"] = "non-frozen percentage points (0-100)";
    s["m_acc_definition"] = "mean of per-class recalls";
    return s;
}

inline void write_manifest(const PipelineConfig& cfg, const std::string& subcommand,
                           const std::map<std::string, std::string>& inputs,
                           const std::vector<std::string>& outputs) {
    nlohmann::json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["subcommand"] = subcommand;
    std::time_t now = std::time(nullptr);
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    m["generated_at"] = stamp;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["settings"] = settings_json(cfg);
    if (subcommand == "simulate") {
        nlohmann::json sj;
        sj["n_bands"] = cfg.synth_cfg.n_bands;
        sj["class_separation"] = cfg.synth_cfg.class_separation;
        sj["cloud_rate"] = cfg.synth_cfg.cloud_rate;
        sj["cloud_fn_rate"] = cfg.synth_cfg.cloud_fn_rate;
        sj["label_noise"] = cfg.synth_cfg.label_noise;
        sj["fraction_noise"] = cfg.synth_cfg.fraction_noise;
        sj["meteo_noise_c"] = cfg.synth_cfg.meteo_noise_c;
        for (const auto& lake : cfg.synth_cfg.lakes)
            sj["lakes"].push_back(lake.id + ":" + std::to_string(lake.n_pixels));
        sj["winters"] = cfg.synth_cfg.winters;
        m["synth"] = sj;
    }
    write_text_file(std::filesystem::path(cfg.out_dir) / ("manifest_" + subcommand + ".json"),
                    m.dump(2) + "\n");
}

}  // namespace pipeline_detail

// Predictions CSV: `lake_id,date,pixel_id,cloudy,predicted`, one row per
// input sample.

struct PredictionRow {
    std::string lake_id;
    Date date;
    int pixel_id = 0;
    bool cloudy = false;
    Label predicted = Label::unlabeled;
};

inline std::string write_predictions_csv_text(const std::vector<PredictionRow>& rows) {
    std::string out = "lake_id,date,pixel_id,cloudy,predicted\n";
    for (const auto& r : rows) {
        out += r.lake_id;
        out += ',';
        out += to_iso(r.date);
        out += ',';
        out += std::to_string(r.pixel_id);
        out += ',';
        out += r.cloudy ? '1' : '0';
        out += ',';
        out += to_string(r.predicted);
        out += '\n';
    }
    return out;
}

inline std::vector<PredictionRow> parse_predictions_csv_text(std::string_view text) {
    auto rows = csv::lines(text);
    if (rows.empty()) throw std::invalid_argument("predictions CSV is empty");
    if (rows[0] != "lake_id,date,pixel_id,cloudy,predicted")
        throw std::invalid_argument("line 1: bad predictions header");
    std::vector<PredictionRow> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        int line_no = int(i) + 1;
        if (rows[i].empty()) continue;
        auto f = csv::split(rows[i]);
        if (f.size() != 5)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected 5 fields");
        PredictionRow r;
        r.lake_id = std::string(f[0]);
        r.date = parse_date(f[1]);
        r.pixel_id = int(csv::parse_int(f[2], line_no, "pixel_id"));
        if (f[3] == "0")
            r.cloudy = false;
        else if (f[3] == "1")
            r.cloudy = true;
        else
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": cloudy must be 0 or 1");
        r.predicted = parse_label(f[4], line_no);
        if (r.predicted == Label::unlabeled)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": predicted must be frozen or non_frozen");
        out.push_back(std::move(r));
    }
    return out;
}

// Overrides CSV: `lake_id,winter,event,date,note`; the note is everything
// after the fourth comma.

struct OverrideEntry {
    std::string lake_id;
    WinterSeason season{0};
    LipEvent event = LipEvent::fus;
    Date date;
    std::string note;
};

inline std::vector<OverrideEntry> parse_overrides_csv_text(std::string_view text) {
    auto rows = csv::lines(text);
    if (rows.empty()) throw std::invalid_argument("overrides CSV is empty");
    if (rows[0] != "lake_id,winter,event,date,note")
        throw std::invalid_argument("line 1: bad overrides header, expected "
                                    "lake_id,winter,event,date,note");
    std::vector<OverrideEntry> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        int line_no = int(i) + 1;
        if (rows[i].empty()) continue;
        auto f = csv::split(rows[i]);
        if (f.size() < 5)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected at least 5 fields");
        OverrideEntry e;
        e.lake_id = std::string(f[0]);
        e.season = parse_season(f[1]);
        e.event = parse_lip_event(f[2]);
        e.date = parse_date(f[3]);
        e.note = std::string(f[4]);
        for (std::size_t k = 5; k < f.size(); ++k) e.note += "," + std::string(f[k]);
        out.push_back(std::move(e));
    }
    return out;
}

// Subcommand bodies. Each validates its configuration and inputs fully
// before writing anything, then writes outputs atomically plus a manifest.

inline void cmd_simulate(PipelineConfig cfg) {
    validate_config(cfg);
    if (cfg.synth_cfg.lakes.empty() || cfg.synth_cfg.winters.empty())
        throw std::invalid_argument("simulate needs lakes and winters");
    cfg.synth_cfg.seed = cfg.seed;
    auto dataset = synth::generate_dataset(cfg.synth_cfg);
    pipeline_detail::ensure_out_dir(cfg);
    synth::write_dataset(cfg.out_dir, dataset, std::size_t(cfg.synth_cfg.n_bands));
    pipeline_detail::write_manifest(cfg, "simulate", {},
                                    {"samples.csv", "meteo.csv", "truth.json"});
}

inline void cmd_train(PipelineConfig cfg) {
    validate_config(cfg);
    namespace pd = pipeline_detail;
    auto samples_path = pd::require_input(pd::resolve(cfg.samples, cfg.out_dir, "samples.csv"),
                                          "samples");
    auto samples = parse_samples_csv(samples_path);
    std::vector<PixelSample> training;
    for (auto& s : samples)
        if (!s.cloudy && s.label != Label::unlabeled) training.push_back(std::move(s));
    TrainDiagnostics diag;
    LinearModel model = train_linear_svm(training, cfg.cost, cfg.seed, &diag);
    pd::ensure_out_dir(cfg);
    write_model_json(std::filesystem::path(cfg.out_dir) / "model.json", model);
    pd::write_manifest(cfg, "train",
                       {{"samples", samples_path.string()},
                        {"training_rows", std::to_string(training.size())},
                        {"iterations", std::to_string(diag.iterations)},
                        {"objective", csv::format_double(diag.objective)}},
                       {"model.json"});
}

inline void cmd_classify(PipelineConfig cfg) {
    validate_config(cfg);
    namespace pd = pipeline_detail;
    auto samples_path = pd::require_input(pd::resolve(cfg.samples, cfg.out_dir, "samples.csv"),
                                          "samples");
    auto model_path = pd::require_input(pd::resolve(cfg.model, cfg.out_dir, "model.json"),
                                        "model");
    auto samples = parse_samples_csv(samples_path);
    LinearModel model = parse_model_json(model_path);
    std::vector<PredictionRow> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples)
        rows.push_back({s.lake_id, s.date, s.pixel_id, s.cloudy, predict(model, s)});
    pd::ensure_out_dir(cfg);
    write_text_file(std::filesystem::path(cfg.out_dir) / "predictions.csv",
                    write_predictions_csv_text(rows));
    pd::write_manifest(cfg, "classify",
                       {{"samples", samples_path.string()}, {"model", model_path.string()}},
                       {"predictions.csv"});
}

inline void cmd_timeline(PipelineConfig cfg) {
    validate_config(cfg);
    namespace pd = pipeline_detail;
    auto pred_path = pd::require_input(
        pd::resolve(cfg.predictions, cfg.out_dir, "predictions.csv"), "predictions");
    auto rows = parse_predictions_csv_text(read_text_file(pred_path));

    // (lake, date) -> predictions of clear pixels / total pixel count
    std::map<std::pair<std::string, Date>, std::pair<std::vector<Label>, int>> days;
    for (const auto& r : rows) {
        auto& cell = days[{r.lake_id, r.date}];
        cell.second++;
        if (!r.cloudy) cell.first.push_back(r.predicted);
    }
    std::map<std::pair<std::string, int>, std::vector<DailyClassification>> winters;
    for (auto& [key, cell] : days) {
        const auto& [lake, date] = key;
        DailyClassification acq;
        acq.date = date;
        acq.cloud_free = double(cell.first.size()) / double(cell.second);
        acq.predictions = std::move(cell.first);
        winters[{lake, season_of(date).start_year()}].push_back(std::move(acq));
    }
    std::vector<WinterTimeline> raw, smoothed;
    for (auto& [key, acquisitions] : winters) {
        WinterTimeline tl = build_timeline(key.first, std::move(acquisitions),
                                           WinterSeason{key.second}, cfg.min_cloud_free);
        smoothed.push_back(gaussian_smooth(tl, cfg.smooth_sigma_days, cfg.smooth_window_days));
        raw.push_back(std::move(tl));
    }
    pd::ensure_out_dir(cfg);
    write_timeline_csv(std::filesystem::path(cfg.out_dir) / "timelines.csv", raw, smoothed);
    pd::write_manifest(cfg, "timeline", {{"predictions", pred_path.string()}},
                       {"timelines.csv"});
}

inline void cmd_phenology(PipelineConfig cfg) {
    validate_config(cfg);
    namespace pd = pipeline_detail;
    auto tl_path = pd::require_input(pd::resolve(cfg.timelines, cfg.out_dir, "timelines.csv"),
                                     "timeline");
    std::vector<OverrideEntry> overrides;
    if (!cfg.overrides.empty())
        overrides = parse_overrides_csv_text(
            read_text_file(pd::require_input(cfg.overrides, "overrides")));
    TimelineFile tf = parse_timeline_csv(tl_path);
    std::vector<PhenologyRecord> records;
    for (const auto& tl : tf.smoothed) {
        if (tl.points.empty()) continue;
        PhenologyRecord rec = fit_phenology(tl, cfg.prior, HuberParams{cfg.huber_phi});
        std::vector<std::pair<LipEvent, DayIndex>> rec_overrides;
        std::string note;
        for (const auto& e : overrides) {
            if (e.lake_id != tl.lake_id || !(e.season == tl.season)) continue;
            rec_overrides.emplace_back(e.event, tl.season.day_of(e.date));
            if (!e.note.empty()) note = note.empty() ? e.note : note + "; " + e.note;
        }
        if (!rec_overrides.empty()) rec = apply_overrides(rec, rec_overrides, note);
        records.push_back(std::move(rec));
    }
    pd::ensure_out_dir(cfg);
    write_phenology_json(std::filesystem::path(cfg.out_dir) / "phenology.json", records);
    pd::write_manifest(cfg, "phenology",
                       {{"timelines", tl_path.string()},
                        {"overrides", cfg.overrides.empty() ? "none" : cfg.overrides}},
                       {"phenology.json"});
}

inline void cmd_trends(PipelineConfig cfg) {
    validate_config(cfg);
    namespace pd = pipeline_detail;
    auto ph_path = pd::require_input(pd::resolve(cfg.phenology, cfg.out_dir, "phenology.json"),
                                     "phenology");
    auto records = parse_phenology_json(ph_path);
    std::map<std::string, std::vector<const PhenologyRecord*>> by_lake;
    for (const auto& r : records) by_lake[r.lake_id].push_back(&r);
    std::string out = "lake_id,event,slope_d_per_a,intercept,n_winters\n";
    for (const auto& [lake, recs] : by_lake) {
        for (const char* event : {"FUS", "FUE", "BUS", "BUE", "ICD", "CFD"}) {
            std::vector<std::pair<int, double>> series;
            for (const auto* r : recs) {
                EventValues ev = event_values(*r);
                std::optional<double> v = std::string_view(event) == "FUS"   ? ev.fus
                                          : std::string_view(event) == "FUE" ? ev.fue
                                          : std::string_view(event) == "BUS" ? ev.bus
                                          : std::string_view(event) == "BUE" ? ev.bue
                                          : std::string_view(event) == "ICD" ? ev.icd
                                                                             : ev.cfd;
                if (v) series.emplace_back(ev.start_year, *v);
            }
            if (series.size() < 2) continue;  // trend undefined for this event
            TrendResult tr = linear_trend(series, event);
            out += lake + "," + std::string(event) + "," + csv::format_double(tr.slope_d_per_a) +
                   "," + csv::format_double(tr.intercept) + "," + std::to_string(tr.n_winters) +
                   "\n";
        }
    }
    pd::ensure_out_dir(cfg);
    write_text_file(std::filesystem::path(cfg.out_dir) / "trends.csv", out);
    pd::write_manifest(cfg, "trends", {{"phenology", ph_path.string()}}, {"trends.csv"});
}

inline void cmd_correlate(PipelineConfig cfg) {
    validate_config(cfg);
    namespace pd = pipeline_detail;
    auto ph_path = pd::require_input(pd::resolve(cfg.phenology, cfg.out_dir, "phenology.json"),
                                     "phenology");
    auto meteo_path = pd::require_input(pd::resolve(cfg.meteo, cfg.out_dir, "meteo.csv"),
                                        "meteo");
    auto records = parse_phenology_json(ph_path);
    ClimateSeries series = parse_meteo_csv(meteo_path);
    std::map<std::string, std::vector<EventValues>> by_lake;
    std::set<int> years;
    for (const auto& r : records) {
        by_lake[r.lake_id].push_back(event_values(r));
        years.insert(r.season.start_year());
    }
    std::vector<WinterIndicators> indicators;
    for (int year : years) {
        try {
            indicators.push_back(compute_indicators(series, WinterSeason{year}));
        } catch (const std::invalid_argument&) {
            // winter without station data; its pairs stay unavailable
        }
    }
    std::string out = "lake_id,event,indicator,window,n,r\n";
    for (const auto& [lake, events] : by_lake) {
        for (const auto& entry : correlate_events(events, indicators)) {
            out += lake + "," + entry.event + "," + entry.indicator + "," +
                   to_string(entry.window) + "," + std::to_string(entry.n) + "," +
                   (entry.r ? csv::format_double(*entry.r) : std::string{}) + "\n";
        }
    }
    pd::ensure_out_dir(cfg);
    write_text_file(std::filesystem::path(cfg.out_dir) / "correlations.csv", out);
    pd::write_manifest(cfg, "correlate",
                       {{"phenology", ph_path.string()}, {"meteo", meteo_path.string()}},
                       {"correlations.csv"});
}

inline void cmd_compare(PipelineConfig cfg) {
    validate_config(cfg);
    namespace pd = pipeline_detail;
    if (cfg.compare_a.empty() || cfg.compare_b.empty())
        throw std::invalid_argument("compare needs two timeline files (--a and --b)");
    auto a_path = pd::require_input(cfg.compare_a, "timeline a");
    auto b_path = pd::require_input(cfg.compare_b, "timeline b");
    TimelineFile ta = parse_timeline_csv(a_path);
    TimelineFile tb = parse_timeline_csv(b_path);

    // per-lake daily frozen% from the raw rows
    auto collect = [](const TimelineFile& tf) {
        std::map<std::string, DailySeries> series;
        std::map<std::string, std::set<int>> series_years;
        for (const auto& tl : tf.raw) {
            for (const auto& pt : tl.points)
                series[tl.lake_id][tl.season.date_of(pt.day)] = 100.0 - pt.nf_percent;
            series_years[tl.lake_id].insert(tl.season.start_year());
        }
        return std::make_pair(series, series_years);
    };
    auto [series_a, years_a] = collect(ta);
    auto [series_b, years_b] = collect(tb);

    std::string out = "lake_id,winter,mad\n";
    std::string summary = "lake_id,mean,stddev,n_winters\n";
    for (const auto& [lake, sa] : series_a) {
        auto it = series_b.find(lake);
        if (it == series_b.end()) continue;
        std::vector<WinterSeason> seasons;
        for (int y : years_a[lake])
            if (years_b[lake].count(y)) seasons.emplace_back(y);
        if (seasons.empty()) continue;
        MadSummary ms = mad_compare_winters(sa, it->second, seasons);
        for (const auto& [year, mad] : ms.per_winter)
            out += lake + "," + WinterSeason{year}.id() + "," + csv::format_double(mad) + "\n";
        summary += lake + "," + csv::format_double(ms.mean) + "," +
                   csv::format_double(ms.stddev) + "," + std::to_string(int(ms.per_winter.size())) +
                   "\n";
    }
    pd::ensure_out_dir(cfg);
    write_text_file(std::filesystem::path(cfg.out_dir) / "mad.csv", out);
    write_text_file(std::filesystem::path(cfg.out_dir) / "mad_summary.csv", summary);
    pd::write_manifest(cfg, "compare", {{"a", a_path.string()}, {"b", b_path.string()}},
                       {"mad.csv", "mad_summary.csv"});
}

inline void cmd_report(PipelineConfig cfg) {
    validate_config(cfg);
    namespace pd = pipeline_detail;
    auto tl_path = pd::require_input(pd::resolve(cfg.timelines, cfg.out_dir, "timelines.csv"),
                                     "timeline");
    auto ph_path = pd::require_input(pd::resolve(cfg.phenology, cfg.out_dir, "phenology.json"),
                                     "phenology");
    TimelineFile tf = parse_timeline_csv(tl_path);
    auto records = parse_phenology_json(ph_path);
    std::map<std::pair<std::string, int>, const PhenologyRecord*> by_key;
    for (const auto& r : records) by_key[{r.lake_id, r.season.start_year()}] = &r;

    pd::ensure_out_dir(cfg);
    std::filesystem::path report_dir = std::filesystem::path(cfg.out_dir) / "report";
    std::error_code ec;
    std::filesystem::create_directories(report_dir, ec);
    if (ec) throw IoError("cannot create report directory " + report_dir.string());

    std::vector<std::string> outputs;
    std::string summary =
        "lake_id,winter,fus,fue,bus,bue,icd_days,cfd_days,fit_loss,corrected\n";
    for (std::size_t i = 0; i < tf.raw.size(); ++i) {
        const auto& raw_tl = tf.raw[i];
        if (raw_tl.points.empty()) continue;
        auto key = std::make_pair(raw_tl.lake_id, raw_tl.season.start_year());
        PhenologyRecord empty;
        empty.lake_id = raw_tl.lake_id;
        empty.season = raw_tl.season;
        const PhenologyRecord& rec = by_key.count(key) ? *by_key.at(key) : empty;
        std::string name = raw_tl.lake_id + "_" + raw_tl.season.id() + ".svg";
        write_text_file(report_dir / name,
                        render_svg_timeline(raw_tl, tf.smoothed[i], rec));
        outputs.push_back("report/" + name);
        auto date_or_empty = [&](const std::optional<DayIndex>& d) {
            return d ? to_iso(rec.season.date_of(*d)) : std::string{};
        };
        summary += rec.lake_id + "," + rec.season.id() + "," + date_or_empty(rec.fus) + "," +
                   date_or_empty(rec.fue) + "," + date_or_empty(rec.bus) + "," +
                   date_or_empty(rec.bue) + "," +
                   (rec.icd_days ? std::to_string(*rec.icd_days) : std::string{}) + "," +
                   (rec.cfd_days ? std::to_string(*rec.cfd_days) : std::string{}) + "," +
                   (rec.fit_loss ? csv::format_double(*rec.fit_loss) : std::string{}) + "," +
                   (rec.corrected ? "1" : "0") + "\n";
    }
    write_text_file(report_dir / "summary.csv", summary);
    outputs.push_back("report/summary.csv");
    pd::write_manifest(cfg, "report",
                       {{"timelines", tl_path.string()}, {"phenology", ph_path.string()}},
                       outputs);
}

}  // namespace lakeice
