#include "smartbayes/ratio.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace smartbayes {

namespace {

constexpr double kVarianceFloor = 1e-9;

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

double PriorOdds::log_r() const { return std::log(r_hat); }

PriorOdds estimate_prior_odds(const Eigen::VectorXi& y) {
    std::size_t n1 = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) n1 += static_cast<std::size_t>(y[i]);
    const std::size_t n0 = static_cast<std::size_t>(y.size()) - n1;
    if (n0 == 0 || n1 == 0) throw std::runtime_error("both classes must be present");
    return PriorOdds{static_cast<double>(n1) / static_cast<double>(n0), n1, n0};
}

MarginalRatioModel fit_marginal_ratio(const Eigen::VectorXd& x, const Eigen::VectorXi& y,
                                      const FitOptions& opts, int feature_index) {
    MarginalRatioModel model;
    model.feature_index = feature_index;
    model.prior_odds = estimate_prior_odds(y);

    std::set<double> distinct(x.data(), x.data() + x.size());
    if (static_cast<int>(distinct.size()) < kMinDistinctForSpline) {
        model.kind = RatioKind::Constant;
        model.degraded = distinct.size() > 1;  // a literally constant x is not a failure
        return model;
    }
    const int knot_count = std::min(10, static_cast<int>(distinct.size()) - 4);
    try {
        const SplineBasis basis = build_basis(x, knot_count);
        const Eigen::MatrixXd penalty = curvature_penalty(basis);
        model.spline_fit = select_lambda(x, y, basis, penalty, opts);
        model.kind = RatioKind::Spline;
    } catch (const std::exception&) {
        model.kind = RatioKind::Constant;
        model.degraded = true;
    }
    return model;
}

MarginalRatioModel fit_gaussian_ratio(const Eigen::VectorXd& x, const Eigen::VectorXi& y,
                                      int feature_index) {
    MarginalRatioModel model;
    model.feature_index = feature_index;
    model.prior_odds = estimate_prior_odds(y);

    std::set<double> distinct(x.data(), x.data() + x.size());
    if (distinct.size() < 2) {
        model.kind = RatioKind::Constant;
        return model;
    }
    const PooledGaussianStats s = pooled_gaussian_stats(x, y);
    model.kind = RatioKind::Gaussian;
    model.gaussian = GaussianRatioParams{s.mu0, s.mu1, s.sigma2};
    return model;
}

double eval_log_ratio(const MarginalRatioModel& model, double x_new) {
    switch (model.kind) {
        case RatioKind::Spline:
            return predict_eta(*model.spline_fit, x_new) - model.prior_odds.log_r();
        case RatioKind::Gaussian: {
            const auto& g = *model.gaussian;
            return (g.mu1 - g.mu0) / g.sigma2 * x_new -
                   (g.mu1 * g.mu1 - g.mu0 * g.mu0) / (2.0 * g.sigma2);
        }
        case RatioKind::Constant:
            return 0.0;
    }
    return 0.0;
}

Eigen::VectorXd eval_log_ratio(const MarginalRatioModel& model, const Eigen::VectorXd& x_new) {
    Eigen::VectorXd out(x_new.size());
    for (Eigen::Index i = 0; i < x_new.size(); ++i) out[i] = eval_log_ratio(model, x_new[i]);
    return out;
}

PooledGaussianStats pooled_gaussian_stats(const Eigen::VectorXd& x, const Eigen::VectorXi& y) {
    if (x.size() != y.size()) throw std::invalid_argument("x and y must have equal length");
    double sum0 = 0.0, sum1 = 0.0;
    std::size_t n0 = 0, n1 = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (y[i] == 1) {
            sum1 += x[i];
            ++n1;
        } else {
            sum0 += x[i];
            ++n0;
        }
    }
    if (n0 == 0 || n1 == 0) throw std::runtime_error("both classes must be present");
    const double mu0 = sum0 / static_cast<double>(n0);
    const double mu1 = sum1 / static_cast<double>(n1);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double d = x[i] - (y[i] == 1 ? mu1 : mu0);
        ss += d * d;
    }
    const double sigma2 = std::max(ss / static_cast<double>(x.size()), kVarianceFloor);
    return {mu0, mu1, sigma2};
}

ExponentialFamilyRatio gamma_factor(Family family, double mu0, double mu1, double sigma2) {
    switch (family) {
        case Family::Gaussian:
            if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
            return {family, (mu1 - mu0) / sigma2, -(mu1 * mu1 - mu0 * mu0) / (2.0 * sigma2)};
        case Family::Bernoulli:
            if (!(mu0 > 0.0 && mu0 < 1.0 && mu1 > 0.0 && mu1 < 1.0))
                throw std::invalid_argument("Bernoulli means must lie in (0,1)");
            return {family, logit(mu1) - logit(mu0), std::log(1.0 - mu1) - std::log(1.0 - mu0)};
        case Family::Poisson:
            if (!(mu0 > 0.0 && mu1 > 0.0))
                throw std::invalid_argument("Poisson means must be positive");
            return {family, std::log(mu1) - std::log(mu0), mu0 - mu1};
    }
    throw std::invalid_argument("unknown family");
}

}  // namespace smartbayes
