#pragma once

#include <Eigen/Dense>
#include <vector>

#include "smartbayes/curve.hpp"
#include "smartbayes/dataset.hpp"
#include "smartbayes/ratio.hpp"

namespace smartbayes {

struct LogisticOptions {
    int max_iterations = 100;
    double score_tolerance = 1e-8;
    double separation_cap = 30.0;  // per-coordinate magnitude cap
};

struct LogisticModel {
    double intercept = 0.0;
    Eigen::VectorXd coefficients;  // zeros at dropped columns
    bool converged = false;
    int iterations = 0;
    std::vector<int> dropped_columns;  // aliased columns, detected left-to-right
};

// Unpenalized maximum-likelihood logistic regression by IRLS with
// step-halving. Aliased design columns are dropped deterministically
// left-to-right and their coefficients pinned at zero. When any parameter
// exceeds the separation cap the fit stops flagged with capped parameters.
LogisticModel fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                           const LogisticOptions& opts = {});

Eigen::VectorXd logistic_scores(const LogisticModel& model, const Eigen::MatrixXd& X_new);
PredictionResult predict_logistic(const LogisticModel& model, const Eigen::MatrixXd& X_new);

struct NaiveBayesFeature {
    double mu0, mu1, sigma2_0, sigma2_1;
};

struct NaiveBayesModel {
    double log_prior_odds = 0.0;
    std::vector<NaiveBayesFeature> features;
};

// Per-class per-feature Gaussian maximum-likelihood parameters with floored
// variances. pooled_variance shares one variance per feature across classes
// (the configuration under which the frozen Smart Bayes identity is exact).
NaiveBayesModel fit_naive_bayes(const Dataset& ds, bool pooled_variance = false);

Eigen::VectorXd naive_bayes_scores(const NaiveBayesModel& model, const Eigen::MatrixXd& X_new);
PredictionResult predict_naive_bayes(const NaiveBayesModel& model, const Eigen::MatrixXd& X_new);

struct SmartBayesOptions {
    FitOptions spline;
    LogisticOptions logistic;
};

// Logistic regression on per-feature log-density-ratio features. The frozen
// variant pins intercept = log r_hat and unit coefficients, which reproduces
// Naive Bayes when the ratio models are exact marginal ratios.
struct SmartBayesModel {
    std::vector<MarginalRatioModel> ratio_models;  // one per feature
    LogisticModel logistic;                        // over the non-Constant features
    bool frozen = false;
    int degraded_features = 0;  // spline fits that fell back to Constant
};

SmartBayesModel fit_smart_bayes(const Dataset& ds, const SmartBayesOptions& opts = {},
                                bool frozen = false, RatioKind kind = RatioKind::Spline);

// z design over the non-Constant ratio models, columns in feature order.
Eigen::MatrixXd generative_features(const std::vector<MarginalRatioModel>& models,
                                    const Eigen::MatrixXd& X);

Eigen::VectorXd smart_bayes_scores(const SmartBayesModel& model, const Eigen::MatrixXd& X_new);
PredictionResult predict_smart_bayes(const SmartBayesModel& model, const Eigen::MatrixXd& X_new);

// Fits the requested classifier on train and returns its test
// misclassification rate. An SB fit with no informative features degrades to
// the prior-only rule instead of dropping the replication.
double holdout_error(Classifier classifier, const Dataset& train, const Dataset& test,
                     const SmartBayesOptions& opts = {});

}  // namespace smartbayes
