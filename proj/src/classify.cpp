#include "smartbayes/classify.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace smartbayes {

namespace {

constexpr double kVarianceFloor = 1e-9;

double softplus(double eta) {
    return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

// Columns of A that are linearly dependent on earlier ones, found by an
// incremental Cholesky of the Gram matrix. Column 0 (the intercept) survives.
std::vector<int> aliased_columns(const Eigen::MatrixXd& A) {
    const Eigen::MatrixXd gram = A.transpose() * A;
    const Eigen::Index q = gram.rows();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(q, q);
    std::vector<int> kept, dropped;
    for (Eigen::Index j = 0; j < q; ++j) {
        double d = gram(j, j);
        Eigen::VectorXd row(static_cast<Eigen::Index>(kept.size()));
        for (std::size_t k = 0; k < kept.size(); ++k) {
            double s = gram(j, kept[k]);
            for (std::size_t m = 0; m < k; ++m)
                s -= row[static_cast<Eigen::Index>(m)] * L(kept[k], static_cast<Eigen::Index>(m));
            row[static_cast<Eigen::Index>(k)] = s / L(kept[k], static_cast<Eigen::Index>(k));
            d -= row[static_cast<Eigen::Index>(k)] * row[static_cast<Eigen::Index>(k)];
        }
        if (d <= 1e-10 * std::max(gram(j, j), 1.0)) {
            dropped.push_back(static_cast<int>(j));
            continue;
        }
        L.row(j).head(static_cast<Eigen::Index>(kept.size())) = row;
        L(j, static_cast<Eigen::Index>(kept.size())) = std::sqrt(d);
        kept.push_back(static_cast<int>(j));
    }
    return dropped;
}

double log_normal_density(double x, double mu, double sigma2) {
    const double d = x - mu;
    return -0.5 * std::log(2.0 * std::numbers::pi * sigma2) - d * d / (2.0 * sigma2);
}

}  // namespace

LogisticModel fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                           const LogisticOptions& opts) {
    if (X.rows() != y.size()) throw std::invalid_argument("design and labels disagree in length");
    if (X.cols() < 1) throw std::invalid_argument("design needs at least one column");
    (void)estimate_prior_odds(y);  // both classes must be present

    const Eigen::Index n = X.rows();
    const Eigen::Index q = X.cols();
    Eigen::MatrixXd full(n, q + 1);
    full.col(0).setOnes();
    full.rightCols(q) = X;

    const std::vector<int> dropped_full = aliased_columns(full);
    std::vector<int> kept;
    for (Eigen::Index j = 0; j < q + 1; ++j)
        if (std::find(dropped_full.begin(), dropped_full.end(), static_cast<int>(j)) ==
            dropped_full.end())
            kept.push_back(static_cast<int>(j));

    Eigen::MatrixXd A(n, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) A.col(static_cast<Eigen::Index>(k)) = full.col(kept[k]);

    const Eigen::VectorXd yd = y.cast<double>();
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(A.cols());

    auto objective = [&](const Eigen::VectorXd& b) {
        const Eigen::VectorXd eta = A * b;
        double nll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) nll += -yd[i] * eta[i] + softplus(eta[i]);
        return nll;
    };

    double obj = objective(beta);
    Eigen::VectorXd eta = A * beta;
    Eigen::VectorXd mu = eta.unaryExpr([](double e) { return sigmoid(e); });
    Eigen::VectorXd grad = A.transpose() * (mu - yd);

    bool converged = false;
    bool capped = false;
    int iter = 0;
    while (iter < opts.max_iterations) {
        if (grad.lpNorm<Eigen::Infinity>() <= opts.score_tolerance) {
            converged = true;
            break;
        }
        ++iter;
        const Eigen::VectorXd w = mu.array() * (1.0 - mu.array());
        Eigen::MatrixXd hessian = A.transpose() * w.asDiagonal() * A;
        hessian.diagonal().array() += 1e-12;  // guards exact-zero weights at separation
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("singular working system in logistic fit");
        const Eigen::VectorXd delta = ldlt.solve(-grad);

        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40; ++h) {
            const Eigen::VectorXd b_try = beta + step * delta;
            const double obj_try = objective(b_try);
            if (obj_try <= obj + 1e-12 * (1.0 + std::abs(obj))) {
                beta = b_try;
                obj = obj_try;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        if (beta.lpNorm<Eigen::Infinity>() > opts.separation_cap) {
            beta = beta.cwiseMax(-opts.separation_cap).cwiseMin(opts.separation_cap);
            capped = true;
            break;
        }
        eta = A * beta;
        mu = eta.unaryExpr([](double e) { return sigmoid(e); });
        grad = A.transpose() * (mu - yd);
    }
    if (!capped && !converged) {
        eta = A * beta;
        mu = eta.unaryExpr([](double e) { return sigmoid(e); });
        grad = A.transpose() * (mu - yd);
        converged = grad.lpNorm<Eigen::Infinity>() <= opts.score_tolerance;
    }

    LogisticModel model;
    model.converged = converged && !capped;
    model.iterations = iter;
    model.coefficients = Eigen::VectorXd::Zero(q);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        if (kept[k] == 0)
            model.intercept = beta[static_cast<Eigen::Index>(k)];
        else
            model.coefficients[kept[k] - 1] = beta[static_cast<Eigen::Index>(k)];
    }
    for (int j : dropped_full) model.dropped_columns.push_back(j - 1);
    return model;
}

Eigen::VectorXd logistic_scores(const LogisticModel& model, const Eigen::MatrixXd& X_new) {
    if (X_new.cols() != model.coefficients.size())
        throw std::invalid_argument("feature count does not match the fitted model");
    return (X_new * model.coefficients).array() + model.intercept;
}

PredictionResult predict_logistic(const LogisticModel& model, const Eigen::MatrixXd& X_new) {
    return to_prediction(logistic_scores(model, X_new));
}

NaiveBayesModel fit_naive_bayes(const Dataset& ds, bool pooled_variance) {
    const PriorOdds odds = estimate_prior_odds(ds.labels);
    NaiveBayesModel model;
    model.log_prior_odds = odds.log_r();
    model.features.reserve(ds.p());
    for (std::size_t k = 0; k < ds.p(); ++k) {
        const Eigen::VectorXd col = ds.features.col(static_cast<Eigen::Index>(k));
        if (pooled_variance) {
            const PooledGaussianStats s = pooled_gaussian_stats(col, ds.labels);
            model.features.push_back({s.mu0, s.mu1, s.sigma2, s.sigma2});
        } else {
            double sum0 = 0.0, sum1 = 0.0;
            for (Eigen::Index i = 0; i < col.size(); ++i)
                (ds.labels[i] == 1 ? sum1 : sum0) += col[i];
            const double mu0 = sum0 / static_cast<double>(odds.n0);
            const double mu1 = sum1 / static_cast<double>(odds.n1);
            double ss0 = 0.0, ss1 = 0.0;
            for (Eigen::Index i = 0; i < col.size(); ++i) {
                const double d = col[i] - (ds.labels[i] == 1 ? mu1 : mu0);
                (ds.labels[i] == 1 ? ss1 : ss0) += d * d;
            }
            model.features.push_back({mu0, mu1,
                                      std::max(ss0 / static_cast<double>(odds.n0), kVarianceFloor),
                                      std::max(ss1 / static_cast<double>(odds.n1), kVarianceFloor)});
        }
    }
    return model;
}

Eigen::VectorXd naive_bayes_scores(const NaiveBayesModel& model, const Eigen::MatrixXd& X_new) {
    if (X_new.cols() != static_cast<Eigen::Index>(model.features.size()))
        throw std::invalid_argument("feature count does not match the fitted model");
    Eigen::VectorXd scores = Eigen::VectorXd::Constant(X_new.rows(), model.log_prior_odds);
    for (Eigen::Index i = 0; i < X_new.rows(); ++i)
        for (std::size_t k = 0; k < model.features.size(); ++k) {
            const auto& f = model.features[k];
            const double x = X_new(i, static_cast<Eigen::Index>(k));
            scores[i] += log_normal_density(x, f.mu1, f.sigma2_1) -
                         log_normal_density(x, f.mu0, f.sigma2_0);
        }
    return scores;
}

PredictionResult predict_naive_bayes(const NaiveBayesModel& model, const Eigen::MatrixXd& X_new) {
    return to_prediction(naive_bayes_scores(model, X_new));
}

SmartBayesModel fit_smart_bayes(const Dataset& ds, const SmartBayesOptions& opts, bool frozen,
                                RatioKind kind) {
    const PriorOdds odds = estimate_prior_odds(ds.labels);
    SmartBayesModel model;
    model.frozen = frozen;
    model.ratio_models.reserve(ds.p());
    for (std::size_t k = 0; k < ds.p(); ++k) {
        const Eigen::VectorXd col = ds.features.col(static_cast<Eigen::Index>(k));
        MarginalRatioModel m;
        switch (kind) {
            case RatioKind::Spline:
                m = fit_marginal_ratio(col, ds.labels, opts.spline, static_cast<int>(k));
                break;
            case RatioKind::Gaussian:
                m = fit_gaussian_ratio(col, ds.labels, static_cast<int>(k));
                break;
            case RatioKind::Constant:
                m.kind = RatioKind::Constant;
                m.prior_odds = odds;
                m.feature_index = static_cast<int>(k);
                break;
        }
        if (m.degraded) ++model.degraded_features;
        model.ratio_models.push_back(std::move(m));
    }

    Eigen::Index q = 0;
    for (const auto& m : model.ratio_models)
        if (m.kind != RatioKind::Constant) ++q;
    if (q == 0) throw std::runtime_error("no informative features");

    const Eigen::MatrixXd z = generative_features(model.ratio_models, ds.features);
    if (frozen) {
        model.logistic.intercept = odds.log_r();
        model.logistic.coefficients = Eigen::VectorXd::Ones(q);
        model.logistic.converged = true;
        model.logistic.iterations = 0;
    } else {
        model.logistic = fit_logistic(z, ds.labels, opts.logistic);
    }
    return model;
}

Eigen::MatrixXd generative_features(const std::vector<MarginalRatioModel>& models,
                                    const Eigen::MatrixXd& X) {
    if (X.cols() != static_cast<Eigen::Index>(models.size()))
        throw std::invalid_argument("feature count does not match the ratio models");
    Eigen::Index q = 0;
    for (const auto& m : models)
        if (m.kind != RatioKind::Constant) ++q;
    Eigen::MatrixXd z(X.rows(), q);
    Eigen::Index col = 0;
    for (const auto& m : models) {
        if (m.kind == RatioKind::Constant) continue;
        z.col(col++) = eval_log_ratio(m, Eigen::VectorXd(X.col(m.feature_index)));
    }
    return z;
}

Eigen::VectorXd smart_bayes_scores(const SmartBayesModel& model, const Eigen::MatrixXd& X_new) {
    const Eigen::MatrixXd z = generative_features(model.ratio_models, X_new);
    return logistic_scores(model.logistic, z);
}

PredictionResult predict_smart_bayes(const SmartBayesModel& model, const Eigen::MatrixXd& X_new) {
    return to_prediction(smart_bayes_scores(model, X_new));
}

double holdout_error(Classifier classifier, const Dataset& train, const Dataset& test,
                     const SmartBayesOptions& opts) {
    PredictionResult pred;
    switch (classifier) {
        case Classifier::NB:
            pred = predict_naive_bayes(fit_naive_bayes(train), test.features);
            break;
        case Classifier::LR:
            pred = predict_logistic(fit_logistic(train.features, train.labels, opts.logistic),
                                    test.features);
            break;
        case Classifier::SB:
            try {
                pred = predict_smart_bayes(fit_smart_bayes(train, opts), test.features);
            } catch (const std::runtime_error& e) {
                if (std::string(e.what()).find("no informative features") == std::string::npos)
                    throw;
                const double log_r = estimate_prior_odds(train.labels).log_r();
                pred = to_prediction(Eigen::VectorXd::Constant(test.features.rows(), log_r));
            }
            break;
    }
    return misclassification_rate(pred.predicted, test.labels);
}

}  // namespace smartbayes
