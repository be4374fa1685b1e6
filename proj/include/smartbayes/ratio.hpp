#pragma once

#include <Eigen/Dense>
#include <optional>

#include "smartbayes/spline.hpp"

namespace smartbayes {

// Class-count odds n1/n0.
struct PriorOdds {
    double r_hat = 1.0;
    std::size_t n1 = 0;
    std::size_t n0 = 0;

    double log_r() const;
};

PriorOdds estimate_prior_odds(const Eigen::VectorXi& y);

enum class RatioKind { Spline, Gaussian, Constant };

// Shared-dispersion Gaussian marginals: the log ratio is gamma*x + delta
// with gamma = (mu1 - mu0) / sigma2.
struct GaussianRatioParams {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double sigma2 = 1.0;  // pooled within-class variance, floored
};

// One feature's log-density-ratio evaluator. Exactly one parameter block is
// populated per kind; Constant evaluates to zero everywhere.
struct MarginalRatioModel {
    RatioKind kind = RatioKind::Constant;
    std::optional<PenalizedSplineFit> spline_fit;
    std::optional<GaussianRatioParams> gaussian;
    PriorOdds prior_odds;
    int feature_index = 0;
    bool degraded = false;  // spline requested but fell back to Constant
};

// Distinct-value floor below which the spline route degrades to Constant.
inline constexpr int kMinDistinctForSpline = 6;

// Spline route: fits eta(x) by select_lambda with interior knots
// min(10, distinct - 4); the log ratio is eta(x) - log r_hat. Falls back to
// a Constant model (flagged degraded) when x is too coarse or the fit fails.
MarginalRatioModel fit_marginal_ratio(const Eigen::VectorXd& x, const Eigen::VectorXi& y,
                                      const FitOptions& opts = {}, int feature_index = 0);

// Parametric route: class means with pooled within-class variance
// (floor 1e-9). Constant only when x is literally constant.
MarginalRatioModel fit_gaussian_ratio(const Eigen::VectorXd& x, const Eigen::VectorXi& y,
                                      int feature_index = 0);

double eval_log_ratio(const MarginalRatioModel& model, double x_new);
Eigen::VectorXd eval_log_ratio(const MarginalRatioModel& model, const Eigen::VectorXd& x_new);

// Per-class mean and pooled maximum-likelihood variance for one feature;
// shared with the pooled Naive Bayes variant so the two agree exactly.
struct PooledGaussianStats {
    double mu0, mu1, sigma2;
};
PooledGaussianStats pooled_gaussian_stats(const Eigen::VectorXd& x, const Eigen::VectorXi& y);

enum class Family { Gaussian, Bernoulli, Poisson };

// Exact affine log-density ratio z(x) = gamma*x + delta for a one-parameter
// exponential family with common dispersion.
struct ExponentialFamilyRatio {
    Family family;
    double gamma;
    double delta;

    double eval(double x) const { return gamma * x + delta; }
};

// Gaussian: gamma = (mu1-mu0)/sigma2; Bernoulli: logit(mu1)-logit(mu0);
// Poisson: log(mu1)-log(mu0). delta completes the exact log ratio.
ExponentialFamilyRatio gamma_factor(Family family, double mu0, double mu1, double sigma2 = 1.0);

}  // namespace smartbayes
