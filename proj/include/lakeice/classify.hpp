#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lakeice/core.hpp"
#include "lakeice/csv.hpp"
#include "lakeice/io.hpp"
#include "lakeice/random.hpp"

namespace lakeice {

/// Linear decision rule over standardized band vectors. Weights and bias act
/// on (x - mean) / std per band; frozen scores >= 0.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> band_means;
    std::vector<double> band_stds;
    double cost = 0.1;
};

struct ConfusionMatrix {
    long tp = 0;  // frozen predicted frozen
    long fn = 0;  // frozen predicted non_frozen
    long fp = 0;  // non_frozen predicted frozen
    long tn = 0;

    long total() const { return tp + fn + fp + tn; }
    void add(Label truth, Label predicted) {
        if (truth == Label::frozen)
            (predicted == Label::frozen ? tp : fn)++;
        else
            (predicted == Label::frozen ? fp : tn)++;
    }
};

/// Mean of per-class recalls, in percent.
inline double m_acc(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fn == 0) throw std::invalid_argument("mAcc undefined: no frozen ground truth");
    if (cm.tn + cm.fp == 0)
        throw std::invalid_argument("mAcc undefined: no non_frozen ground truth");
    double frozen_recall = double(cm.tp) / double(cm.tp + cm.fn);
    double non_frozen_recall = double(cm.tn) / double(cm.tn + cm.fp);
    return 100.0 * 0.5 * (frozen_recall + non_frozen_recall);
}

/// Mean intersection-over-union across both classes, in percent.
inline double m_iou(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fp + cm.fn == 0)
        throw std::invalid_argument("mIoU undefined: empty frozen union");
    if (cm.tn + cm.fn + cm.fp == 0)
        throw std::invalid_argument("mIoU undefined: empty non_frozen union");
    double iou_frozen = double(cm.tp) / double(cm.tp + cm.fp + cm.fn);
    double iou_non_frozen = double(cm.tn) / double(cm.tn + cm.fn + cm.fp);
    return 100.0 * 0.5 * (iou_frozen + iou_non_frozen);
}

/// Per-band mean and population standard deviation over training samples.
inline std::pair<std::vector<double>, std::vector<double>> fit_standardizer(
    const std::vector<PixelSample>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("standardizer needs at least 2 samples, got " +
                                    std::to_string(samples.size()));
    std::size_t d = samples[0].bands.size();
    for (const auto& s : samples)
        if (s.bands.size() != d)
            throw std::invalid_argument("inconsistent band counts in training samples");
    std::vector<double> mean(d, 0.0), std_dev(d, 0.0);
    for (const auto& s : samples)
        for (std::size_t k = 0; k < d; ++k) mean[k] += s.bands[k];
    for (auto& m : mean) m /= double(samples.size());
    for (const auto& s : samples)
        for (std::size_t k = 0; k < d; ++k) {
            double diff = s.bands[k] - mean[k];
            std_dev[k] += diff * diff;
        }
    for (std::size_t k = 0; k < d; ++k) {
        std_dev[k] = std::sqrt(std_dev[k] / double(samples.size()));
        if (std_dev[k] == 0.0)
            throw std::invalid_argument("band b" + std::to_string(k + 1) +
                                        " has zero variance in training data");
    }
    return {mean, std_dev};
}

struct TrainDiagnostics {
    int iterations = 0;
    double objective = 0.0;
    double subgradient_norm = 0.0;  // min-norm subgradient at the final point
    bool converged = false;
    std::vector<double> objective_history;
};

namespace svm_detail {

// Dense feature matrix with labels in {+1 frozen, -1 non_frozen}.
struct Problem {
    std::size_t n = 0, d = 0;
    std::vector<double> x;  // row-major n x d, standardized
    std::vector<double> y;
};

inline double objective(const Problem& p, const std::vector<double>& w, double b, double cost) {
    double reg = 0.0;
    for (double v : w) reg += v * v;
    reg /= 2.0 * cost * double(p.n);
    double hinge = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        double m = 0.0;
        for (std::size_t k = 0; k < p.d; ++k) m += w[k] * p.x[i * p.d + k];
        m = p.y[i] * (m + b);
        if (m < 1.0) hinge += 1.0 - m;
    }
    return reg + hinge / double(p.n);
}

// Minimum-norm element of the subdifferential at (w, b): strict margin
// violators contribute fully, samples within eps of the hinge kink get a
// free coefficient in [0,1] chosen to shrink the norm (projected coordinate
// descent on the resulting box QP).
inline double min_norm_subgradient(const Problem& p, const std::vector<double>& w, double b,
                                   double cost, std::vector<double>* direction = nullptr,
                                   double eps_active = 1e-9) {
    std::size_t d = p.d;
    std::vector<double> g(d + 1, 0.0);
    for (std::size_t k = 0; k < d; ++k) g[k] = w[k] / (cost * double(p.n));
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < p.n; ++i) {
        double m = 0.0;
        for (std::size_t k = 0; k < d; ++k) m += w[k] * p.x[i * p.d + k];
        m = p.y[i] * (m + b);
        if (m < 1.0 - eps_active) {
            for (std::size_t k = 0; k < d; ++k) g[k] -= p.y[i] * p.x[i * p.d + k] / double(p.n);
            g[d] -= p.y[i] / double(p.n);
        } else if (m <= 1.0 + eps_active) {
            active.push_back(i);
        }
    }
    if (!active.empty()) {
        std::vector<double> s(active.size(), 0.0), a_norm(active.size(), 0.0);
        for (std::size_t j = 0; j < active.size(); ++j) {
            std::size_t i = active[j];
            double nrm = 1.0;  // bias component
            for (std::size_t k = 0; k < d; ++k) nrm += p.x[i * p.d + k] * p.x[i * p.d + k];
            a_norm[j] = nrm / (double(p.n) * double(p.n));
        }
        for (int sweep = 0; sweep < 100; ++sweep) {
            double change = 0.0;
            for (std::size_t j = 0; j < active.size(); ++j) {
                std::size_t i = active[j];
                double dot = g[d] * (-p.y[i] / double(p.n));
                for (std::size_t k = 0; k < d; ++k)
                    dot += g[k] * (-p.y[i] * p.x[i * p.d + k] / double(p.n));
                double s_new = std::clamp(s[j] - dot / a_norm[j], 0.0, 1.0);
                double delta = s_new - s[j];
                if (delta == 0.0) continue;
                s[j] = s_new;
                for (std::size_t k = 0; k < d; ++k)
                    g[k] += delta * (-p.y[i] * p.x[i * p.d + k] / double(p.n));
                g[d] += delta * (-p.y[i] / double(p.n));
                change += std::abs(delta);
            }
            if (change < 1e-15) break;
        }
    }
    double nrm = 0.0;
    for (double v : g) nrm += v * v;
    if (direction) *direction = g;
    return std::sqrt(nrm);
}

// Exact minimizer of the convex piecewise-quadratic restriction
// t -> J(w + t*dw, b + t*db) over t >= 0.
inline double line_search(const Problem& p, const std::vector<double>& w, double b, double cost,
                          const std::vector<double>& dir) {
    std::size_t d = p.d;
    double dw_sq = 0.0, w_dot_dw = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
        dw_sq += dir[k] * dir[k];
        w_dot_dw += w[k] * dir[k];
    }
    double inv_cn = 1.0 / (cost * double(p.n));

    std::vector<double> m(p.n), u(p.n);
    std::vector<std::pair<double, std::size_t>> breaks;
    double slope_sum = 0.0;  // sum of u_i over hinge-active samples just after t = 0
    for (std::size_t i = 0; i < p.n; ++i) {
        double f = 0.0, uf = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            f += w[k] * p.x[i * p.d + k];
            uf += dir[k] * p.x[i * p.d + k];
        }
        m[i] = p.y[i] * (f + b);
        u[i] = p.y[i] * (uf + dir[d]);
        bool active = m[i] < 1.0 || (m[i] == 1.0 && u[i] < 0.0);
        if (active) slope_sum += u[i];
        if (u[i] != 0.0) {
            double t_cross = (1.0 - m[i]) / u[i];
            if (t_cross > 0.0) breaks.emplace_back(t_cross, i);
        }
    }
    std::sort(breaks.begin(), breaks.end());

    // phi'(t) = inv_cn * (w_dot_dw + t * dw_sq) - slope_sum(t) / n
    auto segment_min = [&](double t_lo, double t_hi, double s_sum) -> double {
        double deriv_lo = inv_cn * (w_dot_dw + t_lo * dw_sq) - s_sum / double(p.n);
        if (deriv_lo >= 0.0) return t_lo;
        if (dw_sq == 0.0) return t_hi;  // constant negative derivative on this segment
        double t_zero = (s_sum * cost - w_dot_dw) / dw_sq;
        return t_zero < t_hi ? t_zero : t_hi;
    };

    double t_lo = 0.0;
    double s_sum = slope_sum;
    for (std::size_t bi = 0; bi <= breaks.size(); ++bi) {
        double t_hi = bi < breaks.size() ? breaks[bi].first : std::numeric_limits<double>::infinity();
        double t_star = segment_min(t_lo, t_hi, s_sum);
        if (t_star < t_hi) return t_star;
        if (bi == breaks.size()) return t_lo;  // derivative never turned positive; should not happen
        std::size_t i = breaks[bi].second;
        // crossing the kink of sample i: it joins the hinge if its margin is
        // falling, leaves it if rising
        s_sum += u[i] < 0.0 ? u[i] : -u[i];
        t_lo = t_hi;
    }
    return t_lo;
}

}  // namespace svm_detail

// Trains the L2-regularized hinge-loss objective
//   J(w, b) = ||w||^2 / (2 C n) + (1/n) sum_i max(0, 1 - y_i (w.x_i + b))
// by steepest descent: the direction is the negative minimum-norm
// subgradient over the eps-active set, the step an exact line search on the
// piecewise-quadratic restriction. Fully deterministic; the seed parameter
// is part of the interface for classifier-agnostic harnesses but unused
// here.
inline LinearModel train_linear_svm(const std::vector<PixelSample>& samples, double cost,
                                    std::uint64_t seed, TrainDiagnostics* diagnostics = nullptr) {
    (void)seed;
    if (!(cost > 0.0)) throw std::invalid_argument("svm cost must be > 0");
    if (samples.empty()) throw std::invalid_argument("cannot train on empty sample set");
    std::size_t n_frozen = 0, n_non_frozen = 0;
    for (const auto& s : samples) {
        if (s.label == Label::frozen)
            n_frozen++;
        else if (s.label == Label::non_frozen)
            n_non_frozen++;
        else
            throw std::invalid_argument("training set contains unlabeled samples");
    }
    if (n_frozen == 0 || n_non_frozen == 0)
        throw std::invalid_argument("training set must contain both classes (frozen: " +
                                    std::to_string(n_frozen) + ", non_frozen: " +
                                    std::to_string(n_non_frozen) + ")");

    auto [means, stds] = fit_standardizer(samples);
    svm_detail::Problem p;
    p.n = samples.size();
    p.d = means.size();
    p.x.resize(p.n * p.d);
    p.y.resize(p.n);
    for (std::size_t i = 0; i < p.n; ++i) {
        p.y[i] = samples[i].label == Label::frozen ? 1.0 : -1.0;
        for (std::size_t k = 0; k < p.d; ++k)
            p.x[i * p.d + k] = (samples[i].bands[k] - means[k]) / stds[k];
    }

    std::vector<double> w(p.d, 0.0);
    double b = 0.0;
    const double tol = 1e-8;
    const int max_iter = 20000;
    double obj = svm_detail::objective(p, w, b, cost);
    TrainDiagnostics diag;
    diag.objective_history.push_back(obj);
    std::vector<double> g;
    int it = 0;
    for (; it < max_iter; ++it) {
        double g_norm = svm_detail::min_norm_subgradient(p, w, b, cost, &g);
        diag.subgradient_norm = g_norm;
        if (g_norm <= tol) {
            diag.converged = true;
            break;
        }
        std::vector<double> dir(p.d + 1);
        for (std::size_t k = 0; k <= p.d; ++k) dir[k] = -g[k];
        double t = svm_detail::line_search(p, w, b, cost, dir);
        if (t <= 0.0) break;
        std::vector<double> w_new = w;
        for (std::size_t k = 0; k < p.d; ++k) w_new[k] += t * dir[k];
        double b_new = b + t * dir[p.d];
        double obj_new = svm_detail::objective(p, w_new, b_new, cost);
        int halvings = 0;
        while (obj_new > obj && halvings < 60) {
            t *= 0.5;
            for (std::size_t k = 0; k < p.d; ++k) w_new[k] = w[k] + t * dir[k];
            b_new = b + t * dir[p.d];
            obj_new = svm_detail::objective(p, w_new, b_new, cost);
            halvings++;
        }
        if (obj_new > obj) break;  // no descent possible at floating-point resolution
        w = std::move(w_new);
        b = b_new;
        obj = obj_new;
        diag.objective_history.push_back(obj);
    }
    diag.iterations = it;
    diag.objective = obj;
    if (!diag.converged)
        diag.subgradient_norm = svm_detail::min_norm_subgradient(p, w, b, cost, nullptr);

    LinearModel model;
    model.weights = std::move(w);
    model.bias = b;
    model.band_means = std::move(means);
    model.band_stds = std::move(stds);
    model.cost = cost;
    if (diagnostics) *diagnostics = std::move(diag);
    return model;
}

inline double decision_score(const LinearModel& model, const PixelSample& sample) {
    if (sample.bands.size() != model.weights.size())
        throw std::invalid_argument("sample has " + std::to_string(sample.bands.size()) +
                                    " bands, model expects " +
                                    std::to_string(model.weights.size()));
    double score = model.bias;
    for (std::size_t k = 0; k < model.weights.size(); ++k)
        score += model.weights[k] * (sample.bands[k] - model.band_means[k]) / model.band_stds[k];
    return score;
}

/// Frozen wins the score-zero tie so the rule is total.
inline Label predict(const LinearModel& model, const PixelSample& sample) {
    return decision_score(model, sample) >= 0.0 ? Label::frozen : Label::non_frozen;
}

/// Min-norm subgradient of the training objective at the model's solution,
/// evaluated on (raw) training samples. Optimality diagnostic for tests.
inline double svm_subgradient_norm(const LinearModel& model,
                                   const std::vector<PixelSample>& samples) {
    svm_detail::Problem p;
    p.n = samples.size();
    p.d = model.weights.size();
    p.x.resize(p.n * p.d);
    p.y.resize(p.n);
    for (std::size_t i = 0; i < p.n; ++i) {
        p.y[i] = samples[i].label == Label::frozen ? 1.0 : -1.0;
        for (std::size_t k = 0; k < p.d; ++k)
            p.x[i * p.d + k] =
                (samples[i].bands[k] - model.band_means[k]) / model.band_stds[k];
    }
    return svm_detail::min_norm_subgradient(p, model.weights, model.bias, model.cost);
}

// Model JSON: {weights[], bias, band_means[], band_stds[], cost}. Doubles are
// emitted in shortest-round-trip decimal form, so reading back reproduces the
// exact values.

inline std::string write_model_json_text(const LinearModel& model) {
    nlohmann::json j;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["band_means"] = model.band_means;
    j["band_stds"] = model.band_stds;
    j["cost"] = model.cost;
    return j.dump(2) + "\n";
}

inline LinearModel parse_model_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("invalid model JSON: ") + e.what());
    }
    LinearModel m;
    try {
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.band_means = j.at("band_means").get<std::vector<double>>();
        m.band_stds = j.at("band_stds").get<std::vector<double>>();
        m.cost = j.at("cost").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid model JSON: ") + e.what());
    }
    if (m.band_means.size() != m.weights.size() || m.band_stds.size() != m.weights.size())
        throw std::invalid_argument("model JSON: weights/means/stds lengths differ");
    for (double s : m.band_stds)
        if (!(s > 0.0)) throw std::invalid_argument("model JSON: band_stds must be > 0");
    if (!(m.cost > 0.0)) throw std::invalid_argument("model JSON: cost must be > 0");
    return m;
}

inline void write_model_json(const std::filesystem::path& path, const LinearModel& model) {
    write_text_file(path, write_model_json_text(model));
}

inline LinearModel parse_model_json(const std::filesystem::path& path) {
    return parse_model_json_text(read_text_file(path));
}

// Evaluation harness. Works with any classifier exposing
//   Model train(const std::vector<PixelSample>&, uint64_t seed) const
//   Label predict(const Model&, const PixelSample&) const

struct SplitPlan {
    enum class Kind { k_fold, leave_one_lake_out, leave_one_winter_out };
    Kind kind = Kind::k_fold;
    int k = 4;
    std::uint64_t seed = 0;
};

struct FoldScore {
    std::string name;
    ConfusionMatrix confusion;
    double m_acc = 0.0;
    double m_iou = 0.0;
};

struct EvaluationReport {
    std::vector<FoldScore> folds;
    double mean_m_acc = 0.0;
    double mean_m_iou = 0.0;
};

namespace svm_detail {

/// Test-index sets forming an exact partition of the samples.
inline std::vector<std::pair<std::string, std::vector<std::size_t>>> make_folds(
    const std::vector<PixelSample>& samples, const SplitPlan& plan) {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> folds;
    if (plan.kind == SplitPlan::Kind::k_fold) {
        if (plan.k < 2) throw std::invalid_argument("k-fold requires k >= 2");
        if (std::size_t(plan.k) > samples.size())
            throw std::invalid_argument("k-fold requires at least k samples");
        // class-stratified: shuffle each class, deal round-robin
        std::vector<std::size_t> frozen_idx, non_frozen_idx;
        for (std::size_t i = 0; i < samples.size(); ++i)
            (samples[i].label == Label::frozen ? frozen_idx : non_frozen_idx).push_back(i);
        Rng rng(mix_seed(plan.seed));
        rng.shuffle(frozen_idx);
        rng.shuffle(non_frozen_idx);
        folds.resize(std::size_t(plan.k));
        for (int f = 0; f < plan.k; ++f) folds[std::size_t(f)].first = "fold" + std::to_string(f + 1);
        for (std::size_t i = 0; i < frozen_idx.size(); ++i)
            folds[i % std::size_t(plan.k)].second.push_back(frozen_idx[i]);
        for (std::size_t i = 0; i < non_frozen_idx.size(); ++i)
            folds[i % std::size_t(plan.k)].second.push_back(non_frozen_idx[i]);
        for (auto& [name, idx] : folds) std::sort(idx.begin(), idx.end());
    } else {
        std::map<std::string, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            std::string key = plan.kind == SplitPlan::Kind::leave_one_lake_out
                                  ? samples[i].lake_id
                                  : season_of(samples[i].date).id();
            groups[key].push_back(i);
        }
        if (groups.size() < 2)
            throw std::invalid_argument(
                "leave-one-group-out requires at least 2 groups, got " +
                std::to_string(groups.size()));
        for (auto& [key, idx] : groups) folds.emplace_back(key, std::move(idx));
    }
    return folds;
}

}  // namespace svm_detail

template <typename Classifier>
EvaluationReport evaluate(const std::vector<PixelSample>& samples, const Classifier& classifier,
                          const SplitPlan& plan) {
    auto folds = svm_detail::make_folds(samples, plan);
    EvaluationReport report;
    for (const auto& [name, test_idx] : folds) {
        std::vector<char> in_test(samples.size(), 0);
        for (std::size_t i : test_idx) in_test[i] = 1;
        std::vector<PixelSample> train_set;
        train_set.reserve(samples.size() - test_idx.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (!in_test[i]) train_set.push_back(samples[i]);
        bool has_frozen = false, has_non_frozen = false;
        for (const auto& s : train_set) {
            has_frozen |= s.label == Label::frozen;
            has_non_frozen |= s.label == Label::non_frozen;
        }
        if (train_set.empty() || !has_frozen || !has_non_frozen)
            throw std::invalid_argument("fold '" + name +
                                        "' leaves a single-class or empty training set");
        auto model = classifier.train(train_set, plan.seed);
        FoldScore score;
        score.name = name;
        for (std::size_t i : test_idx)
            score.confusion.add(samples[i].label, classifier.predict(model, samples[i]));
        score.m_acc = m_acc(score.confusion);
        score.m_iou = m_iou(score.confusion);
        report.folds.push_back(std::move(score));
    }
    for (const auto& f : report.folds) {
        report.mean_m_acc += f.m_acc;
        report.mean_m_iou += f.m_iou;
    }
    report.mean_m_acc /= double(report.folds.size());
    report.mean_m_iou /= double(report.folds.size());
    return report;
}

struct LinearSvmClassifier {
    double cost = 0.1;

    LinearModel train(const std::vector<PixelSample>& samples, std::uint64_t seed) const {
        return train_linear_svm(samples, cost, seed);
    }
    Label predict(const LinearModel& model, const PixelSample& sample) const {
        return lakeice::predict(model, sample);
    }
};

struct GridSearchResult {
    double best_cost = 0.0;
    std::vector<std::pair<double, double>> scores;  // cost -> mean mAcc
};

/// Evaluates each candidate cost under the plan; the highest mean mAcc wins,
/// ties go to the smallest cost.
inline GridSearchResult grid_search(const std::vector<PixelSample>& samples,
                                    const std::vector<double>& costs, const SplitPlan& plan) {
    if (costs.empty()) throw std::invalid_argument("grid search needs at least one cost");
    GridSearchResult result;
    bool have_best = false;
    double best_score = 0.0;
    for (double cost : costs) {
        auto report = evaluate(samples, LinearSvmClassifier{cost}, plan);
        result.scores.emplace_back(cost, report.mean_m_acc);
        if (!have_best || report.mean_m_acc > best_score ||
            (report.mean_m_acc == best_score && cost < result.best_cost)) {
            have_best = true;
            best_score = report.mean_m_acc;
            result.best_cost = cost;
        }
    }
    return result;
}

}  // namespace lakeice
