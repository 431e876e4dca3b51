#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lakeice/climate.hpp"
#include "lakeice/core.hpp"
#include "lakeice/csv.hpp"
#include "lakeice/io.hpp"
#include "lakeice/phenology.hpp"
#include "lakeice/random.hpp"
#include "lakeice/timeline.hpp"

namespace lakeice::synth {

struct SynthLake {
    std::string id;
    int n_pixels = 0;  // clean pixels
};

struct SynthConfig {
    std::vector<SynthLake> lakes = {{"sils", 33}, {"silvaplana", 21}, {"engadin3", 9}};
    std::vector<int> winters = {2016, 2017};
    int n_bands = 5;
    // distance between the frozen / non-frozen band-cluster means, in units
    // of the per-band standard deviation
    double class_separation = 4.0;
    double cloud_rate = 0.4;      // per-day probability the acquisition is < 30% cloud-free
    double cloud_fn_rate = 0.0;   // probability such a day slips through with a lying mask
    double label_noise = 0.0;     // per-pixel label flip probability
    double fraction_noise = 0.02; // bounded day-level noise on the frozen fraction
    double meteo_noise_c = 0.5;   // daily temperature noise amplitude, deg C
    std::uint64_t seed = 1;
    PriorConfig prior;            // truth transitions are drawn from these Gaussians
};

struct SynthTruth {
    std::string lake_id;
    WinterSeason season{0};
    DayIndex fus, fue, bus, bue;
    // realized per-day frozen fraction (pixel-quantized, noise included)
    std::vector<double> daily_frozen_fraction;
    // true per-pixel state, [day][pixel]; in-memory only
    std::vector<std::vector<std::uint8_t>> pixel_frozen;
};

struct SynthWinter {
    std::vector<PixelSample> samples;
    SynthTruth truth;
};

namespace synth_detail {

struct TransitionDraw {
    DayIndex ramp_fus, ramp_fue, ramp_bus, ramp_bue;
};

// Event dates drawn from the prior Gaussians with a shared warmth factor:
// warm winters freeze later and break up earlier. Rejected until the event
// order and the two-week transition caps hold with margins inside the
// season.
inline TransitionDraw draw_transitions(Rng& rng, const SynthConfig& cfg,
                                       const WinterSeason& season, double theta) {
    auto mu = cfg.prior.resolve(season);
    double sigma = cfg.prior.sigma_days;
    const double rho = 0.9;
    const double resid = std::sqrt(1.0 - rho * rho);
    int len = season.length();
    for (int outer = 0; outer < 100; ++outer) {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            double fus = mu[0] + sigma * (rho * theta + resid * rng.normal());
            double fue = mu[1] + sigma * (rho * theta + resid * rng.normal());
            double bus = mu[2] + sigma * (-rho * theta + resid * rng.normal());
            double bue = mu[3] + sigma * (-rho * theta + resid * rng.normal());
            TransitionDraw d{DayIndex{int(std::lround(fus))}, DayIndex{int(std::lround(fue))},
                             DayIndex{int(std::lround(bus))}, DayIndex{int(std::lround(bue))}};
            if (d.ramp_fus.value < 20 || d.ramp_bue.value > len - 10) continue;
            if (d.ramp_fue < d.ramp_fus || d.ramp_bue < d.ramp_bus) continue;
            if (d.ramp_fue - d.ramp_fus > kMaxTransitionDays) continue;
            if (d.ramp_bue - d.ramp_bus > kMaxTransitionDays) continue;
            if (d.ramp_bus - d.ramp_fue < 20) continue;  // a real frozen plateau
            return d;
        }
        theta = rng.normal();  // extreme warmth draw; try a fresh factor
    }
    throw std::runtime_error("could not draw feasible transition dates for winter " + season.id());
}

inline double smooth3(const std::vector<double>& v, std::size_t i) {
    const double w = std::exp(-1.0 / (2.0 * kSmoothSigmaDays * kSmoothSigmaDays));
    double num = v[i], den = 1.0;
    if (i > 0) {
        num += w * v[i - 1];
        den += w;
    }
    if (i + 1 < v.size()) {
        num += w * v[i + 1];
        den += w;
    }
    return num / den;
}

/// First day whose value reaches the threshold while the previous day sits
/// below it; mirrors the candidate rule on a gap-free daily series.
inline DayIndex first_crossing(const std::vector<double>& series, double threshold) {
    for (std::size_t t = 1; t < series.size(); ++t)
        if (series[t] >= threshold && series[t - 1] < threshold) return DayIndex{int(t)};
    throw std::runtime_error("synthetic series never crosses threshold");
}

}  // namespace synth_detail

// One lake-winter of per-pixel samples plus its ground truth. Deterministic
// in (config, lake, season): the generator seeds from those alone, so the
// dataset does not depend on generation order. Truth events are the
// threshold crossings an ideal pipeline (perfect classifier, no clouds)
// would report on the smoothed noise-free daily series.
inline SynthWinter generate_winter(const SynthConfig& cfg, const SynthLake& lake,
                                   const WinterSeason& season) {
    if (lake.n_pixels < 1) throw std::invalid_argument("lake needs at least one clean pixel");
    if (cfg.n_bands < 1) throw std::invalid_argument("band count must be >= 1");
    for (double rate : {cfg.cloud_rate, cfg.cloud_fn_rate, cfg.label_noise})
        if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("rates must be in [0,1]");
    if (!(cfg.class_separation > 0.0))
        throw std::invalid_argument("class separation must be > 0");

    Rng rng(derive_seed(cfg.seed, lake.id, season.start_year()));
    const int n = lake.n_pixels;
    const int len = season.length();
    double theta = rng.normal();
    auto ramps = synth_detail::draw_transitions(rng, cfg, season, theta);
    DatePair freeze{ramps.ramp_fus, ramps.ramp_fue};
    DatePair breakup{ramps.ramp_bus, ramps.ramp_bue};

    // noise-free pixel-quantized daily fraction and the truth events on its
    // smoothed version
    const std::size_t n_days = std::size_t(len);
    std::vector<double> clean_fraction(n_days);
    for (int t = 0; t < len; ++t) {
        double f0 = (100.0 - model_nf_general(DayIndex{t}, freeze, breakup)) / 100.0;
        clean_fraction[std::size_t(t)] = double(std::lround(f0 * n)) / double(n);
    }
    std::vector<double> smoothed(n_days), smoothed_nf(n_days);
    for (std::size_t t = 0; t < n_days; ++t) {
        smoothed[t] = synth_detail::smooth3(clean_fraction, t);
        smoothed_nf[t] = 1.0 - smoothed[t];
    }
    SynthTruth truth;
    truth.lake_id = lake.id;
    truth.season = season;
    truth.fus = synth_detail::first_crossing(smoothed, 0.3);
    truth.fue = synth_detail::first_crossing(smoothed, 0.7);
    truth.bus = synth_detail::first_crossing(smoothed_nf, 0.3);
    truth.bue = synth_detail::first_crossing(smoothed_nf, 0.7);
    truth.daily_frozen_fraction.resize(std::size_t(len));
    truth.pixel_frozen.assign(std::size_t(len), std::vector<std::uint8_t>(std::size_t(n), 0));

    const double band_std = 0.05;
    const double base_reflectance = 0.45;
    const double offset = cfg.class_separation / (2.0 * std::sqrt(double(cfg.n_bands))) * band_std;
    const int min_clear = (3 * n + 9) / 10;  // smallest count with clear/n >= 0.3

    SynthWinter out;
    out.samples.reserve(std::size_t(len) * std::size_t(n));
    const std::size_t n_px = std::size_t(n);
    std::vector<int> clear_order(n_px), frozen_order(n_px);
    for (int t = 0; t < len; ++t) {
        double f0 = (100.0 - model_nf_general(DayIndex{t}, freeze, breakup)) / 100.0;
        double target = f0 + cfg.fraction_noise * (2.0 * rng.uniform() - 1.0);
        target = std::clamp(target, 0.0, 1.0);
        int n_frozen = int(std::lround(target * n));
        truth.daily_frozen_fraction[std::size_t(t)] = double(n_frozen) / double(n);

        bool cloudy_day = rng.bernoulli(cfg.cloud_rate);
        bool lying_mask = cloudy_day && rng.bernoulli(cfg.cloud_fn_rate);
        int n_clear = (cloudy_day && !lying_mask)
                          ? (min_clear > 0 ? int(rng.uniform_index(std::uint64_t(min_clear))) : 0)
                          : min_clear + int(rng.uniform_index(std::uint64_t(n - min_clear + 1)));

        for (int p = 0; p < n; ++p) clear_order[std::size_t(p)] = p;
        rng.shuffle(clear_order);
        for (int p = 0; p < n; ++p) frozen_order[std::size_t(p)] = p;
        rng.shuffle(frozen_order);
        std::vector<std::uint8_t> is_clear(std::size_t(n), 0), is_frozen(std::size_t(n), 0);
        for (int j = 0; j < n_clear; ++j) is_clear[std::size_t(clear_order[std::size_t(j)])] = 1;
        for (int j = 0; j < n_frozen; ++j) is_frozen[std::size_t(frozen_order[std::size_t(j)])] = 1;

        Date date = season.date_of(DayIndex{t});
        for (int p = 0; p < n; ++p) {
            bool frozen_px = is_frozen[std::size_t(p)] != 0;
            truth.pixel_frozen[std::size_t(t)][std::size_t(p)] = frozen_px ? 1 : 0;
            PixelSample s;
            s.lake_id = lake.id;
            s.date = date;
            s.pixel_id = p;
            s.cloudy = is_clear[std::size_t(p)] == 0;
            // cloud-contaminated observations look like the frozen cluster
            bool looks_frozen = frozen_px || lying_mask || s.cloudy;
            double mean = base_reflectance + (looks_frozen ? offset : -offset);
            s.bands.resize(std::size_t(cfg.n_bands));
            for (int k = 0; k < cfg.n_bands; ++k)
                s.bands[std::size_t(k)] = mean + band_std * rng.normal();
            Label label = frozen_px ? Label::frozen : Label::non_frozen;
            if (rng.bernoulli(cfg.label_noise))
                label = label == Label::frozen ? Label::non_frozen : Label::frozen;
            s.label = label;
            out.samples.push_back(std::move(s));
        }
    }
    out.truth = std::move(truth);
    return out;
}

struct SynthDataset {
    std::vector<PixelSample> samples;
    std::vector<SynthTruth> truths;
    ClimateSeries meteo;
};

// Full dataset across lakes x winters, plus a station series whose mean
// winter temperature is an exact decreasing linear function of the first
// lake's realized freeze duration (plus optional daily noise), giving the
// correlation machinery a known-sign target.
inline SynthDataset generate_dataset(const SynthConfig& cfg) {
    if (cfg.lakes.empty() || cfg.winters.empty())
        throw std::invalid_argument("dataset needs at least one lake and one winter");
    SynthDataset out;
    out.meteo.station_id = "SYN1";
    for (int start_year : cfg.winters) {
        WinterSeason season{start_year};
        double first_lake_cfd = 0.0;
        for (std::size_t li = 0; li < cfg.lakes.size(); ++li) {
            auto winter = generate_winter(cfg, cfg.lakes[li], season);
            if (li == 0) first_lake_cfd = double(winter.truth.bus - winter.truth.fue);
            out.truths.push_back(std::move(winter.truth));
            out.samples.insert(out.samples.end(), winter.samples.begin(), winter.samples.end());
        }
        Rng rng(derive_seed(cfg.seed, "meteo", start_year));
        double target_mwt = 3.0 - 0.1 * first_lake_cfd;
        for (int t = 0; t < season.length(); ++t) {
            DailyWeather w;
            w.tmean_c = target_mwt + cfg.meteo_noise_c * (2.0 * rng.uniform() - 1.0);
            w.precip_mm = rng.uniform() < 0.45 ? 0.0 : rng.uniform(0.5, 15.0);
            if (!rng.bernoulli(0.03)) w.sunshine_h = rng.uniform(0.0, 11.0);
            if (!rng.bernoulli(0.03)) w.wind_kmh = rng.uniform(2.0, 25.0);
            out.meteo.daily[season.date_of(DayIndex{t})] = w;
        }
    }
    return out;
}

inline nlohmann::json truth_to_json(const SynthTruth& t) {
    nlohmann::json j;
    j["lake_id"] = t.lake_id;
    j["winter"] = t.season.id();
    j["fus"] = to_iso(t.season.date_of(t.fus));
    j["fue"] = to_iso(t.season.date_of(t.fue));
    j["bus"] = to_iso(t.season.date_of(t.bus));
    j["bue"] = to_iso(t.season.date_of(t.bue));
    j["daily_frozen_fraction"] = t.daily_frozen_fraction;
    return j;
}

inline SynthTruth truth_from_json(const nlohmann::json& j) {
    SynthTruth t;
    try {
        t.lake_id = j.at("lake_id").get<std::string>();
        t.season = parse_season(j.at("winter").get<std::string>());
        t.fus = t.season.day_of(parse_date(j.at("fus").get<std::string>()));
        t.fue = t.season.day_of(parse_date(j.at("fue").get<std::string>()));
        t.bus = t.season.day_of(parse_date(j.at("bus").get<std::string>()));
        t.bue = t.season.day_of(parse_date(j.at("bue").get<std::string>()));
        t.daily_frozen_fraction = j.at("daily_frozen_fraction").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid truth JSON: ") + e.what());
    }
    return t;
}

inline std::string write_truth_json_text(const std::vector<SynthTruth>& truths) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : truths) arr.push_back(truth_to_json(t));
    return arr.dump(2) + "\n";
}

inline std::vector<SynthTruth> parse_truth_json_text(const std::string& text) {
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid truth JSON: ") + e.what());
    }
    if (!arr.is_array()) throw std::invalid_argument("truth JSON must be an array");
    std::vector<SynthTruth> out;
    for (const auto& j : arr) out.push_back(truth_from_json(j));
    return out;
}

/// Writes samples.csv, meteo.csv and truth.json into a directory.
inline void write_dataset(const std::filesystem::path& dir, const SynthDataset& dataset,
                          std::size_t n_bands) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    write_samples_csv(dir / "samples.csv", dataset.samples, n_bands);
    write_meteo_csv(dir / "meteo.csv", dataset.meteo);
    write_text_file(dir / "truth.json", write_truth_json_text(dataset.truths));
}

}  // namespace lakeice::synth
