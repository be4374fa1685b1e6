#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "smartbayes/classify.hpp"
#include "smartbayes/model_io.hpp"
#include "support.hpp"

using namespace smartbayes;
using namespace testsupport;

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

double logistic_deviance(const LogisticModel& model, const Eigen::MatrixXd& X,
                         const Eigen::VectorXi& y) {
    const Eigen::VectorXd eta = logistic_scores(model, X);
    double nll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        nll += -static_cast<double>(y[i]) * eta[i] + std::max(eta[i], 0.0) +
               std::log1p(std::exp(-std::abs(eta[i])));
    return 2.0 * nll;
}

}  // namespace

TEST_CASE("null-model logistic fit hugs the intercept") {
    Rng rng(17);
    const Eigen::Index n = 2000;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXi y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = rng.normal();
        X(i, 1) = rng.normal();
        y[i] = i % 4 == 0 ? 1 : 0;  // mean 0.25, independent of X
    }
    const LogisticModel model = fit_logistic(X, y);
    CHECK(model.converged);
    CHECK(model.intercept == doctest::Approx(logit(0.25)).epsilon(0.15));
    CHECK(model.coefficients.cwiseAbs().maxCoeff() <= 0.5);
}

TEST_CASE("logistic MLE recovers the generating parameters") {
    // simulate straight from the model: beta0 = 0, beta1 = 1
    Rng rng(88);
    const Eigen::Index n = 5000;
    Eigen::MatrixXd X(n, 1);
    Eigen::VectorXi y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = rng.normal();
        const double p = 1.0 / (1.0 + std::exp(-X(i, 0)));
        y[i] = rng.uniform() < p ? 1 : 0;
    }
    const LogisticModel model = fit_logistic(X, y);
    CHECK(model.converged);
    CHECK(std::abs(model.intercept - 0.0) <= 0.1);
    CHECK(std::abs(model.coefficients[0] - 1.0) <= 0.1);
}

TEST_CASE("perfect separation is capped and flagged") {
    // scale keeps the score above tolerance until the cap triggers
    Eigen::MatrixXd X(4, 1);
    X << -0.2, -0.1, 0.1, 0.2;
    Eigen::VectorXi y(4);
    y << 0, 0, 1, 1;
    const LogisticModel model = fit_logistic(X, y);
    CHECK_FALSE(model.converged);
    const double biggest =
        std::max(std::abs(model.intercept), model.coefficients.cwiseAbs().maxCoeff());
    CHECK(biggest == doctest::Approx(30.0));
    const PredictionResult pred = predict_logistic(model, X);
    CHECK(pred.predicted[0] == 0);
    CHECK(pred.predicted[1] == 0);
    CHECK(pred.predicted[2] == 1);
    CHECK(pred.predicted[3] == 1);
}

TEST_CASE("aliased columns are dropped left-to-right") {
    Rng rng(5);
    Eigen::MatrixXd X(50, 3);
    Eigen::VectorXi y(50);
    for (int i = 0; i < 50; ++i) {
        X(i, 0) = rng.normal();
        X(i, 1) = 2.0 * X(i, 0);  // aliased with column 0
        X(i, 2) = rng.normal();
        y[i] = (X(i, 0) + 0.5 * rng.normal() > 0) ? 1 : 0;
    }
    const LogisticModel model = fit_logistic(X, y);
    CHECK(model.dropped_columns == std::vector<int>{1});
    CHECK(model.coefficients[1] == 0.0);
    CHECK_NOTHROW(predict_logistic(model, X));
}

TEST_CASE("logistic prediction follows the sign rule") {
    LogisticModel model;
    model.intercept = 0.3;
    model.coefficients = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 2);
    const PredictionResult pred = predict_logistic(model, X);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(pred.predicted[i] == 1);

    model.intercept = 0.0;
    const PredictionResult tie = predict_logistic(model, X);
    for (Eigen::Index i = 0; i < 5; ++i) {
        CHECK(tie.scores[i] == 0.0);
        CHECK(tie.predicted[i] == 1);
    }
    Eigen::MatrixXd wrong(2, 3);
    CHECK_THROWS_AS(predict_logistic(model, wrong), std::invalid_argument);
}

TEST_CASE("in-sample scores reproduce the fitted log-odds") {
    const Dataset ds = shifted_gaussian_dataset(100, 2, 1.0, 42);
    const LogisticModel model = fit_logistic(ds.features, ds.labels);
    const Eigen::VectorXd once = logistic_scores(model, ds.features);
    const Eigen::VectorXd again =
        (ds.features * model.coefficients).array() + model.intercept;
    CHECK((once - again).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("naive Bayes parameters match hand arithmetic") {
    Dataset ds;
    ds.features.resize(4, 1);
    ds.features << 1.0, 3.0, 4.0, 8.0;
    ds.labels.resize(4);
    ds.labels << 0, 0, 1, 1;
    ds.column_names = {"x"};
    const NaiveBayesModel model = fit_naive_bayes(ds);
    CHECK(model.log_prior_odds == doctest::Approx(0.0));
    REQUIRE(model.features.size() == 1);
    CHECK(model.features[0].mu0 == doctest::Approx(2.0));       // mean of {1,3}
    CHECK(model.features[0].mu1 == doctest::Approx(6.0));       // mean of {4,8}
    CHECK(model.features[0].sigma2_0 == doctest::Approx(1.0));  // ML variance of {1,3}
    CHECK(model.features[0].sigma2_1 == doctest::Approx(4.0));  // ML variance of {4,8}
}

TEST_CASE("equal-variance naive Bayes decides at the midpoint") {
    NaiveBayesModel model;
    model.log_prior_odds = 0.0;
    model.features = {{0.0, 2.0, 1.0, 1.0}};
    Eigen::MatrixXd X(3, 1);
    X << 0.9, 1.0, 1.1;
    const PredictionResult pred = predict_naive_bayes(model, X);
    CHECK(pred.predicted[0] == 0);
    CHECK(pred.scores[1] == doctest::Approx(0.0));
    CHECK(pred.predicted[1] == 1);  // tie goes to class 1
    CHECK(pred.predicted[2] == 1);
}

TEST_CASE("a feature with identical class-conditional samples contributes nothing") {
    Rng rng(7);
    Dataset ds;
    const int half = 50;
    ds.features.resize(2 * half, 2);
    ds.labels.resize(2 * half);
    ds.column_names = {"signal", "null"};
    for (int i = 0; i < half; ++i) {
        const double shared = rng.normal();
        ds.features(i, 0) = rng.normal();
        ds.features(i, 1) = shared;
        ds.labels[i] = 0;
        ds.features(half + i, 0) = 2.0 + rng.normal();
        ds.features(half + i, 1) = shared;  // identical across classes
        ds.labels[half + i] = 1;
    }
    const NaiveBayesModel model = fit_naive_bayes(ds);
    NaiveBayesModel without = model;
    without.features[1] = {0.0, 0.0, 1.0, 1.0};  // exactly zero contribution
    const Eigen::VectorXd full = naive_bayes_scores(model, ds.features);
    const Eigen::VectorXd reduced = naive_bayes_scores(without, ds.features);
    CHECK((full - reduced).cwiseAbs().maxCoeff() <= 0.05);
}

TEST_CASE("swapping class parameters negates naive Bayes scores exactly") {
    const Dataset ds = shifted_gaussian_dataset(80, 3, 1.5, 4097);
    const NaiveBayesModel model = fit_naive_bayes(ds);
    NaiveBayesModel swapped = model;
    swapped.log_prior_odds = -model.log_prior_odds;
    for (auto& f : swapped.features) {
        std::swap(f.mu0, f.mu1);
        std::swap(f.sigma2_0, f.sigma2_1);
    }
    const Eigen::VectorXd a = naive_bayes_scores(model, ds.features);
    const Eigen::VectorXd b = naive_bayes_scores(swapped, ds.features);
    CHECK((a + b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("naive Bayes score decomposes additively over features") {
    const Dataset ds = shifted_gaussian_dataset(60, 3, 1.0, 31);
    const NaiveBayesModel model = fit_naive_bayes(ds);
    NaiveBayesModel neutral = model;
    const std::size_t k = 1;
    neutral.features[k] = {0.0, 0.0, 1.0, 1.0};
    const Eigen::VectorXd full = naive_bayes_scores(model, ds.features);
    const Eigen::VectorXd rest = naive_bayes_scores(neutral, ds.features);
    for (Eigen::Index i = 0; i < full.size(); ++i) {
        const auto& f = model.features[k];
        const double x = ds.features(i, static_cast<Eigen::Index>(k));
        const double term = (-0.5 * std::log(2.0 * std::numbers::pi * f.sigma2_1) -
                             (x - f.mu1) * (x - f.mu1) / (2.0 * f.sigma2_1)) -
                            (-0.5 * std::log(2.0 * std::numbers::pi * f.sigma2_0) -
                             (x - f.mu0) * (x - f.mu0) / (2.0 * f.sigma2_0));
        CHECK(full[i] - rest[i] == doctest::Approx(term).epsilon(1e-12));
    }
}

TEST_CASE("label swap negates decision scores for both baselines") {
    const Dataset ds = shifted_gaussian_dataset(120, 2, 1.0, 606);
    Dataset flipped = ds;
    flipped.labels = Eigen::VectorXi::Ones(ds.labels.size()) - ds.labels;

    const Eigen::VectorXd nb_a = naive_bayes_scores(fit_naive_bayes(ds), ds.features);
    const Eigen::VectorXd nb_b = naive_bayes_scores(fit_naive_bayes(flipped), ds.features);
    CHECK((nb_a + nb_b).cwiseAbs().maxCoeff() == 0.0);

    const Eigen::VectorXd lr_a =
        logistic_scores(fit_logistic(ds.features, ds.labels), ds.features);
    const Eigen::VectorXd lr_b =
        logistic_scores(fit_logistic(flipped.features, flipped.labels), ds.features);
    CHECK((lr_a + lr_b).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("frozen SB with pooled Gaussian ratios equals pooled naive Bayes") {
    const Dataset ds = shifted_gaussian_dataset(150, 4, 0.8, 2222);
    const SmartBayesModel sb = fit_smart_bayes(ds, {}, true, RatioKind::Gaussian);
    const NaiveBayesModel nb = fit_naive_bayes(ds, true);
    const Eigen::VectorXd a = smart_bayes_scores(sb, ds.features);
    const Eigen::VectorXd b = naive_bayes_scores(nb, ds.features);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("unfrozen SB with affine ratios matches logistic regression on x") {
    const Dataset ds = shifted_gaussian_dataset(200, 3, 1.0, 3333);
    const SmartBayesModel sb = fit_smart_bayes(ds, {}, false, RatioKind::Gaussian);
    const LogisticModel lr = fit_logistic(ds.features, ds.labels);
    const Eigen::VectorXd sb_scores = smart_bayes_scores(sb, ds.features);
    const Eigen::VectorXd lr_scores = logistic_scores(lr, ds.features);
    for (Eigen::Index i = 0; i < sb_scores.size(); ++i) {
        const double pa = 1.0 / (1.0 + std::exp(-sb_scores[i]));
        const double pb = 1.0 / (1.0 + std::exp(-lr_scores[i]));
        CHECK(std::abs(pa - pb) <= 1e-6);
    }
}

TEST_CASE("correlated features pull SB coefficients away from one") {
    // strong positive correlation between two equally shifted features
    Rng rng(1812);
    const int half = 1000;
    Dataset ds;
    ds.features.resize(2 * half, 2);
    ds.labels.resize(2 * half);
    ds.column_names = {"x1", "x2"};
    const double rho = 0.9;
    const double noise = std::sqrt(1.0 - rho * rho);
    for (int i = 0; i < 2 * half; ++i) {
        const bool one = i >= half;
        const double shared = rng.normal();
        ds.features(i, 0) = (one ? 1.0 : 0.0) + rho * shared + noise * rng.normal();
        ds.features(i, 1) = (one ? 1.0 : 0.0) + rho * shared + noise * rng.normal();
        ds.labels[i] = one ? 1 : 0;
    }
    const SmartBayesModel sb = fit_smart_bayes(ds, {}, false, RatioKind::Gaussian);
    CHECK((sb.logistic.coefficients.array() - 1.0).abs().maxCoeff() > 0.2);
}

TEST_CASE("all-constant features are an error") {
    Dataset ds;
    ds.features = Eigen::MatrixXd::Constant(20, 2, 3.0);
    ds.labels.resize(20);
    for (int i = 0; i < 20; ++i) ds.labels[i] = i % 2;
    ds.column_names = {"a", "b"};
    CHECK_THROWS_WITH_AS(fit_smart_bayes(ds), doctest::Contains("no informative features"),
                         std::runtime_error);
}

TEST_CASE("decisions ride on the only informative feature") {
    SmartBayesModel model;
    model.frozen = false;
    MarginalRatioModel constant;
    constant.kind = RatioKind::Constant;
    constant.feature_index = 0;
    MarginalRatioModel gauss;
    gauss.kind = RatioKind::Gaussian;
    gauss.gaussian = GaussianRatioParams{0.0, 2.0, 1.0};
    gauss.feature_index = 1;
    model.ratio_models = {constant, gauss};
    model.logistic.intercept = 0.0;
    model.logistic.coefficients = Eigen::VectorXd::Ones(1);

    Eigen::MatrixXd a(2, 2), b(2, 2);
    a << -100.0, 0.5, 100.0, 0.5;  // feature 0 varies wildly, feature 1 fixed
    const Eigen::VectorXd sa = smart_bayes_scores(model, a);
    CHECK(sa[0] == sa[1]);

    // monotone in the informative feature: no 1 -> 0 flip as z grows
    b << 0.0, -5.0, 0.0, 5.0;
    const PredictionResult pb = predict_smart_bayes(model, b);
    CHECK(pb.scores[0] < pb.scores[1]);
    int last = 0;
    for (double xv = -5.0; xv <= 5.0; xv += 0.25) {
        Eigen::MatrixXd row(1, 2);
        row << 0.0, xv;
        const int pred = predict_smart_bayes(model, row).predicted[0];
        CHECK(pred >= last);
        last = pred;
    }
}

TEST_CASE("training deviance of unfrozen SB never exceeds the frozen fit") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const Dataset ds = shifted_gaussian_dataset(120, 3, 0.7, seed);
        const SmartBayesModel frozen = fit_smart_bayes(ds, {}, true, RatioKind::Gaussian);
        const SmartBayesModel fitted = fit_smart_bayes(ds, {}, false, RatioKind::Gaussian);
        const Eigen::MatrixXd z = generative_features(frozen.ratio_models, ds.features);
        const double d_frozen = logistic_deviance(frozen.logistic, z, ds.labels);
        const Eigen::MatrixXd z2 = generative_features(fitted.ratio_models, ds.features);
        const double d_fitted = logistic_deviance(fitted.logistic, z2, ds.labels);
        CHECK(d_fitted <= d_frozen + 1e-8);
    }
}

TEST_CASE("logistic probabilities are invariant to per-column affine rescaling") {
    const Dataset ds = shifted_gaussian_dataset(150, 3, 1.0, 9);
    const LogisticModel base = fit_logistic(ds.features, ds.labels);
    Eigen::MatrixXd scaled = ds.features;
    const double slopes[] = {2.5, -0.4, 10.0};
    const double shifts[] = {1.0, -3.0, 0.25};
    for (int j = 0; j < 3; ++j) scaled.col(j) = slopes[j] * scaled.col(j).array() + shifts[j];
    const LogisticModel rescaled = fit_logistic(scaled, ds.labels);
    const Eigen::VectorXd sa = logistic_scores(base, ds.features);
    const Eigen::VectorXd sb = logistic_scores(rescaled, scaled);
    for (Eigen::Index i = 0; i < sa.size(); ++i) {
        const double pa = 1.0 / (1.0 + std::exp(-sa[i]));
        const double pb = 1.0 / (1.0 + std::exp(-sb[i]));
        CHECK(std::abs(pa - pb) <= 1e-6);
    }
}

TEST_CASE("model files round-trip exactly") {
    TempDir dir;
    const Dataset ds = shifted_gaussian_dataset(100, 2, 1.0, 5150);
    Eigen::MatrixXd probe = Eigen::MatrixXd::Random(20, 2) * 3.0;

    // naive Bayes
    {
        const auto path = dir.file("nb.json");
        const NaiveBayesModel model = fit_naive_bayes(ds);
        save_model({ds.column_names, model}, path);
        const ModelFile loaded = load_model(path);
        CHECK(loaded.kind() == "nb");
        CHECK(loaded.feature_names == ds.column_names);
        const Eigen::VectorXd a = naive_bayes_scores(model, probe);
        const Eigen::VectorXd b = naive_bayes_scores(std::get<NaiveBayesModel>(loaded.model), probe);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
    // logistic
    {
        const auto path = dir.file("lr.json");
        const LogisticModel model = fit_logistic(ds.features, ds.labels);
        save_model({ds.column_names, model}, path);
        const Eigen::VectorXd a = logistic_scores(model, probe);
        const Eigen::VectorXd b =
            logistic_scores(std::get<LogisticModel>(load_model(path).model), probe);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
    // smart Bayes with spline ratios
    {
        const auto path = dir.file("sb.json");
        const SmartBayesModel model = fit_smart_bayes(ds);
        save_model({ds.column_names, model}, path);
        const Eigen::VectorXd a = smart_bayes_scores(model, probe);
        const Eigen::VectorXd b =
            smart_bayes_scores(std::get<SmartBayesModel>(load_model(path).model), probe);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("model loader rejects damaged and future files") {
    TempDir dir;
    const Dataset ds = shifted_gaussian_dataset(50, 1, 1.0, 77);
    const auto path = dir.file("model.json");
    save_model({ds.column_names, fit_naive_bayes(ds)}, path);

    const std::string text = read_file(path);
    write_file(dir.file("trunc.json"), text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(load_model(dir.file("trunc.json")), std::runtime_error);

    std::string bumped = text;
    const auto pos = bumped.find("\"schema_version\": 1");
    REQUIRE(pos != std::string::npos);
    bumped.replace(pos, std::string("\"schema_version\": 1").size(), "\"schema_version\": 9");
    write_file(dir.file("future.json"), bumped);
    CHECK_THROWS_WITH_AS(load_model(dir.file("future.json")),
                         doctest::Contains("schema version"), std::runtime_error);

    CHECK_THROWS_AS(load_model(dir.file("absent.json")), std::runtime_error);
}
