#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "lakeice/classify.hpp"

using namespace lakeice;

namespace {

// two Gaussian band clusters around +/- separation/2 per band
std::vector<PixelSample> make_clusters(int n_per_class, int n_bands, double separation,
                                       unsigned rng_seed, double sigma = 1.0,
                                       const std::vector<std::string>& lakes = {"a", "b"}) {
    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<PixelSample> samples;
    for (int cls = 0; cls < 2; ++cls) {
        double mean = cls == 0 ? separation / 2.0 : -separation / 2.0;
        for (int i = 0; i < n_per_class; ++i) {
            PixelSample s;
            s.lake_id = lakes[std::size_t(i) % lakes.size()];
            s.date = add_days(Date{2016, 10, 1}, i % 200);
            s.pixel_id = i;
            s.label = cls == 0 ? Label::frozen : Label::non_frozen;
            for (int k = 0; k < n_bands; ++k) s.bands.push_back(mean + noise(rng));
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

}  // namespace

TEST_CASE("metric values on known confusion matrices") {
    ConfusionMatrix perfect{50, 0, 0, 50};
    CHECK(m_acc(perfect) == 100.0);
    CHECK(m_iou(perfect) == 100.0);

    ConfusionMatrix cm{50, 0, 25, 25};
    CHECK(m_acc(cm) == Catch::Approx(75.0).margin(1e-12));
    CHECK(m_iou(cm) == Catch::Approx(100.0 * (2.0 / 3.0 + 0.5) / 2.0).margin(1e-12));

    CHECK_THROWS_AS(m_acc(ConfusionMatrix{0, 0, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(m_iou(ConfusionMatrix{0, 0, 0, 5}), std::invalid_argument);
}

TEST_CASE("metrics match a per-class counting oracle on random matrices") {
    std::mt19937_64 rng(123);
    std::uniform_int_distribution<int> count(0, 500);
    for (int trial = 0; trial < 1000; ++trial) {
        ConfusionMatrix cm{count(rng) + 1, count(rng), count(rng), count(rng) + 1};
        // oracle: expand to labeled pairs and count per class
        double frozen_total = double(cm.tp + cm.fn);
        double frozen_correct = double(cm.tp);
        double nf_total = double(cm.tn + cm.fp);
        double nf_correct = double(cm.tn);
        double acc_oracle = 100.0 * (frozen_correct / frozen_total + nf_correct / nf_total) / 2.0;
        double iou_frozen = double(cm.tp) / double(cm.tp + cm.fp + cm.fn);
        double iou_nf = double(cm.tn) / double(cm.tn + cm.fn + cm.fp);
        double iou_oracle = 100.0 * (iou_frozen + iou_nf) / 2.0;
        CHECK(m_acc(cm) == acc_oracle);
        CHECK(m_iou(cm) == iou_oracle);
    }
}

TEST_CASE("standardizer basics") {
    PixelSample a, b;
    a.bands = {0.0};
    a.label = Label::frozen;
    b.bands = {2.0};
    b.label = Label::non_frozen;
    auto [mean, sd] = fit_standardizer({a, b});
    CHECK(mean == std::vector<double>{1.0});
    CHECK(sd == std::vector<double>{1.0});

    CHECK_THROWS_WITH(fit_standardizer({a, a}), Catch::Matchers::ContainsSubstring("b1"));
    CHECK_THROWS_AS(fit_standardizer({a}), std::invalid_argument);
}

TEST_CASE("standardizer matches a two-pass oracle on random samples") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist(3.0, 2.5);
    std::vector<PixelSample> samples(1000);
    for (auto& s : samples) s.bands = {dist(rng), dist(rng) * 10.0};
    auto [mean, sd] = fit_standardizer(samples);
    for (int k = 0; k < 2; ++k) {
        double m = 0.0;
        for (const auto& s : samples) m += s.bands[std::size_t(k)];
        m /= double(samples.size());
        double var = 0.0;
        for (const auto& s : samples)
            var += (s.bands[std::size_t(k)] - m) * (s.bands[std::size_t(k)] - m);
        var /= double(samples.size());
        CHECK(mean[std::size_t(k)] == Catch::Approx(m).margin(1e-9));
        CHECK(sd[std::size_t(k)] == Catch::Approx(std::sqrt(var)).margin(1e-9));
    }
}

TEST_CASE("svm separates well-separated clusters perfectly") {
    auto samples = make_clusters(120, 4, 12.0, 99);
    TrainDiagnostics diag;
    LinearModel model = train_linear_svm(samples, 0.1, 7, &diag);
    CHECK(model.cost == 0.1);
    long correct = 0;
    for (const auto& s : samples)
        if (predict(model, s) == s.label) correct++;
    CHECK(correct == long(samples.size()));
    CHECK(diag.converged);
}

TEST_CASE("svm solver objective decreases monotonically and converges") {
    auto samples = make_clusters(60, 3, 8.0, 21);
    TrainDiagnostics diag;
    LinearModel model = train_linear_svm(samples, 0.1, 0, &diag);
    REQUIRE(diag.objective_history.size() > 1);
    for (std::size_t i = 1; i < diag.objective_history.size(); ++i)
        CHECK(diag.objective_history[i] <= diag.objective_history[i - 1]);
    CHECK(diag.subgradient_norm < 1e-6);
    CHECK(svm_subgradient_norm(model, samples) < 1e-6);
}

TEST_CASE("svm training is bit-reproducible") {
    auto samples = make_clusters(80, 5, 3.0, 1234);
    LinearModel a = train_linear_svm(samples, 0.1, 42);
    LinearModel b = train_linear_svm(samples, 0.1, 42);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    CHECK(a.band_means == b.band_means);
    CHECK(a.band_stds == b.band_stds);
}

TEST_CASE("svm rejects degenerate training sets") {
    auto samples = make_clusters(10, 2, 4.0, 3);
    std::vector<PixelSample> one_class(samples.begin(), samples.begin() + 10);
    CHECK_THROWS_WITH(train_linear_svm(one_class, 0.1, 0),
                      Catch::Matchers::ContainsSubstring("both classes"));
    CHECK_THROWS_AS(train_linear_svm({}, 0.1, 0), std::invalid_argument);
    samples[0].label = Label::unlabeled;
    CHECK_THROWS_WITH(train_linear_svm(samples, 0.1, 0),
                      Catch::Matchers::ContainsSubstring("unlabeled"));
    CHECK_THROWS_AS(train_linear_svm(samples, -1.0, 0), std::invalid_argument);
}

TEST_CASE("prediction rules") {
    LinearModel model;
    model.weights = {1.0};
    model.bias = 0.0;
    model.band_means = {5.0};
    model.band_stds = {2.0};
    PixelSample s;
    s.bands = {5.0};  // standardizes to 0, score 0: tie goes to frozen
    CHECK(predict(model, s) == Label::frozen);
    s.bands = {9.0};  // standardizes to +2
    CHECK(predict(model, s) == Label::frozen);
    s.bands = {1.0};
    CHECK(predict(model, s) == Label::non_frozen);
    s.bands = {1.0, 2.0};
    CHECK_THROWS_AS(predict(model, s), std::invalid_argument);
}

TEST_CASE("prediction agrees with a dot-product oracle and scale invariance") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::uniform_real_distribution<double> scale_dist(0.1, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        LinearModel model;
        int d = 1 + trial % 6;
        for (int k = 0; k < d; ++k) {
            model.weights.push_back(dist(rng));
            model.band_means.push_back(dist(rng));
            model.band_stds.push_back(0.5 + std::abs(dist(rng)));
        }
        model.bias = dist(rng);
        PixelSample s;
        for (int k = 0; k < d; ++k) s.bands.push_back(dist(rng));
        double score = model.bias;
        for (int k = 0; k < d; ++k)
            score += model.weights[std::size_t(k)] *
                     (s.bands[std::size_t(k)] - model.band_means[std::size_t(k)]) /
                     model.band_stds[std::size_t(k)];
        CHECK(predict(model, s) == (score >= 0 ? Label::frozen : Label::non_frozen));
        // argmax invariant under joint positive rescaling of weights and bias
        LinearModel scaled = model;
        double c = scale_dist(rng);
        for (auto& w : scaled.weights) w *= c;
        scaled.bias *= c;
        CHECK(predict(scaled, s) == predict(model, s));
    }
}

TEST_CASE("model JSON round-trips exactly") {
    LinearModel model;
    model.weights = {0.1, -2.0 / 3.0, 1e-17};
    model.bias = -0.12345678901234567;
    model.band_means = {1.0 / 3.0, 2.5, -7.25};
    model.band_stds = {0.2, 1.7, 3.0};
    model.cost = 0.1;
    LinearModel back = parse_model_json_text(write_model_json_text(model));
    CHECK(back.weights == model.weights);
    CHECK(back.bias == model.bias);
    CHECK(back.band_means == model.band_means);
    CHECK(back.band_stds == model.band_stds);
    CHECK(back.cost == model.cost);

    CHECK_THROWS_AS(parse_model_json_text("{"), std::invalid_argument);
    CHECK_THROWS_AS(parse_model_json_text("{\"weights\": [1]}"), std::invalid_argument);
}

TEST_CASE("stratified k-fold partitions the samples with balanced classes") {
    auto samples = make_clusters(101, 2, 4.0, 17);  // 101 frozen + 101 non-frozen
    SplitPlan plan;
    plan.kind = SplitPlan::Kind::k_fold;
    plan.k = 4;
    plan.seed = 3;
    auto folds = svm_detail::make_folds(samples, plan);
    REQUIRE(folds.size() == 4);
    std::set<std::size_t> seen;
    for (const auto& [name, idx] : folds) {
        long frozen = 0, non_frozen = 0;
        for (std::size_t i : idx) {
            CHECK(seen.insert(i).second);  // exactly-once partition
            (samples[i].label == Label::frozen ? frozen : non_frozen)++;
        }
        // 101 samples per class over 4 folds: 25 or 26 of each class
        CHECK(frozen >= 25);
        CHECK(frozen <= 26);
        CHECK(non_frozen >= 25);
        CHECK(non_frozen <= 26);
    }
    CHECK(seen.size() == samples.size());
}

TEST_CASE("leave-one-group-out folds match brute-force grouping") {
    auto samples = make_clusters(40, 2, 6.0, 31, 1.0, {"sils", "silvaplana", "sihl"});
    SplitPlan plan;
    plan.kind = SplitPlan::Kind::leave_one_lake_out;
    auto folds = svm_detail::make_folds(samples, plan);
    REQUIRE(folds.size() == 3);
    for (const auto& [lake, idx] : folds) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            bool in_fold = std::find(idx.begin(), idx.end(), i) != idx.end();
            CHECK(in_fold == (samples[i].lake_id == lake));
        }
    }

    // winters: dates span Oct 2016 + 200 days => seasons 2016 and 2017
    plan.kind = SplitPlan::Kind::leave_one_winter_out;
    auto wfolds = svm_detail::make_folds(samples, plan);
    REQUIRE(wfolds.size() == 2);
    for (const auto& [winter, idx] : wfolds)
        for (std::size_t i : idx) CHECK(season_of(samples[i].date).id() == winter);
}

TEST_CASE("single-lake dataset cannot be evaluated leave-one-lake-out") {
    auto samples = make_clusters(20, 2, 6.0, 77, 1.0, {"sils"});
    SplitPlan plan;
    plan.kind = SplitPlan::Kind::leave_one_lake_out;
    CHECK_THROWS_AS(evaluate(samples, LinearSvmClassifier{0.1}, plan), std::invalid_argument);
}

TEST_CASE("separable data scores 100 under both evaluation plans") {
    auto samples = make_clusters(60, 3, 10.0, 55, 0.5, {"sils", "silvaplana"});
    SplitPlan kfold{SplitPlan::Kind::k_fold, 4, 9};
    auto report = evaluate(samples, LinearSvmClassifier{0.1}, kfold);
    CHECK(report.mean_m_acc == 100.0);
    CHECK(report.mean_m_iou == 100.0);
    REQUIRE(report.folds.size() == 4);

    SplitPlan lolo{SplitPlan::Kind::leave_one_lake_out, 0, 0};
    auto lolo_report = evaluate(samples, LinearSvmClassifier{0.1}, lolo);
    CHECK(lolo_report.mean_m_acc == 100.0);
    CHECK(lolo_report.mean_m_iou == 100.0);
}

TEST_CASE("grid search picks the smallest cost among ties") {
    auto samples = make_clusters(40, 2, 10.0, 64, 0.5);
    SplitPlan plan{SplitPlan::Kind::k_fold, 4, 11};

    auto single = grid_search(samples, {0.7}, plan);
    CHECK(single.best_cost == 0.7);

    auto result = grid_search(samples, {0.1, 0.01, 10.0}, plan);
    for (const auto& [cost, score] : result.scores) CHECK(score == 100.0);
    CHECK(result.best_cost == 0.01);

    CHECK_THROWS_AS(grid_search(samples, {}, plan), std::invalid_argument);
}
