#include "smartbayes/simulate.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "smartbayes/classify.hpp"
#include "smartbayes/parallel.hpp"
#include "smartbayes/rng.hpp"

namespace smartbayes {

namespace {

// Stream tags keep the per-replication seed streams disjoint.
constexpr std::uint64_t kStreamSample = 10;
constexpr std::uint64_t kStreamSplit = 20;
constexpr int kMaxRedraws = 100;

void check_params(const MvParams& params) {
    const Eigen::Index p = params.mean.size();
    if (p < 1) throw std::invalid_argument("mean must be non-empty");
    if (params.covariance.rows() != p || params.covariance.cols() != p)
        throw std::invalid_argument("covariance shape does not match the mean");
    const double scale = std::max(1.0, params.covariance.cwiseAbs().maxCoeff());
    if ((params.covariance - params.covariance.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * scale)
        throw std::invalid_argument("covariance is not symmetric");
    if (params.df && !(*params.df > 0.0))
        throw std::invalid_argument("degrees of freedom must be positive");
}

struct CellResult {
    std::vector<double> errors;  // one entry per classifier, NB/LR/SB order
    int redraws = 0;
};

}  // namespace

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& covariance) {
    const Eigen::Index p = covariance.rows();
    const double base = covariance.trace() / static_cast<double>(p);
    double jitter = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::MatrixXd c = covariance;
        if (attempt > 0) {
            jitter = (attempt == 1 ? 1e-10 : jitter * 10.0);
            c.diagonal().array() += jitter * base;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(c);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw std::runtime_error("covariance is not positive definite, even after jitter");
}

Eigen::MatrixXd sample_mv(const MvParams& params, std::size_t count, std::uint64_t seed) {
    check_params(params);
    const Eigen::Index p = params.mean.size();
    const Eigen::MatrixXd chol = cholesky_with_jitter(params.covariance);

    Rng rng(seed);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), p);
    Eigen::VectorXd eps(p);
    for (std::size_t i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) eps[j] = rng.normal();
        Eigen::VectorXd row = chol * eps;
        if (params.df) {
            const double w = rng.chi_squared(*params.df);
            row *= std::sqrt(*params.df / w);
        }
        out.row(static_cast<Eigen::Index>(i)) = (params.mean + row).transpose();
    }
    return out;
}

LearningCurve run_simulation(const SimulationPlan& plan) {
    if (plan.replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (plan.training_sizes.empty()) throw std::invalid_argument("training sizes must be non-empty");
    check_params(plan.class0);
    check_params(plan.class1);
    if (plan.class0.mean.size() != plan.class1.mean.size())
        throw std::invalid_argument("class parameter dimensions disagree");

    const std::size_t reps = static_cast<std::size_t>(plan.replications);
    const std::size_t cells = plan.training_sizes.size() * reps;
    std::vector<CellResult> results(cells);

    parallel_for(cells, plan.threads, [&](std::size_t job) {
        const std::size_t size_idx = job / reps;
        const std::size_t rep = job % reps;
        const std::size_t m = plan.training_sizes[size_idx];
        const std::uint64_t rep_seed = derive_seed(plan.master_seed, m, rep);

        const Eigen::MatrixXd x0 = sample_mv(plan.class0, m, derive_seed(rep_seed, kStreamSample, 0));
        const Eigen::MatrixXd x1 = sample_mv(plan.class1, m, derive_seed(rep_seed, kStreamSample, 1));

        Dataset pooled;
        pooled.features.resize(x0.rows() + x1.rows(), x0.cols());
        pooled.features << x0, x1;
        pooled.labels.resize(x0.rows() + x1.rows());
        pooled.labels.head(x0.rows()).setZero();
        pooled.labels.tail(x1.rows()).setOnes();
        pooled.column_names.resize(static_cast<std::size_t>(x0.cols()));
        for (std::size_t j = 0; j < pooled.column_names.size(); ++j)
            pooled.column_names[j] = "x" + std::to_string(j + 1);

        CellResult& cell = results[job];
        SplitResult parts;
        bool ok = false;
        for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
            try {
                parts = split(pooled, SplitSpec{0, derive_seed(rep_seed, kStreamSplit,
                                                               static_cast<std::uint64_t>(attempt)),
                                                SplitMode::HalfHalf});
                ok = true;
                break;
            } catch (const std::runtime_error& e) {
                if (std::string(e.what()).find("degenerate") == std::string::npos) throw;
                ++cell.redraws;
            }
        }
        if (!ok) throw std::runtime_error("all redraws degenerate at size " + std::to_string(m));

        for (Classifier c : {Classifier::NB, Classifier::LR, Classifier::SB})
            cell.errors.push_back(holdout_error(c, parts.train, parts.test));
    });

    LearningCurve curve;
    const Classifier order[] = {Classifier::NB, Classifier::LR, Classifier::SB};
    for (std::size_t ci = 0; ci < 3; ++ci)
        for (std::size_t si = 0; si < plan.training_sizes.size(); ++si) {
            std::vector<double> errs(reps);
            int redraws = 0;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                const CellResult& cell = results[si * reps + rep];
                errs[rep] = cell.errors[ci];
                redraws += cell.redraws;
            }
            const auto [mean, sd] = mean_sd(errs);
            curve.rows.push_back({plan.name, order[ci], plan.training_sizes[si], mean, sd,
                                  plan.replications, redraws});
        }
    return curve;
}

std::pair<MvParams, MvParams> synthetic_class_params(std::size_t p) {
    if (p < 1) throw std::invalid_argument("dimension must be positive");
    const Eigen::Index pp = static_cast<Eigen::Index>(p);
    auto wishart_like = [&](std::uint64_t seed, double scale) {
        Rng rng(seed);
        const Eigen::Index k = pp + 2;
        Eigen::MatrixXd g(pp, k);
        for (Eigen::Index i = 0; i < pp; ++i)
            for (Eigen::Index j = 0; j < k; ++j) g(i, j) = rng.normal();
        Eigen::MatrixXd cov = scale * (g * g.transpose()) / static_cast<double>(k);
        cov.diagonal().array() += 0.15 * scale;
        return cov;
    };
    MvParams class0, class1;
    class0.mean = Eigen::VectorXd::Zero(pp);
    class1.mean = Eigen::VectorXd::Constant(pp, 1.1 / std::sqrt(static_cast<double>(p)));
    // distinct per-class covariances make the marginal ratios quadratic
    class0.covariance = wishart_like(derive_seed(0x57a71c, p, 0), 1.0);
    class1.covariance = wishart_like(derive_seed(0x57a71c, p, 1), 1.8);
    return {class0, class1};
}

std::pair<MvParams, MvParams> estimate_class_params(const Dataset& ds) {
    const Eigen::Index p = ds.features.cols();
    std::vector<Eigen::Index> rows0, rows1;
    for (Eigen::Index i = 0; i < ds.labels.size(); ++i)
        (ds.labels[i] == 1 ? rows1 : rows0).push_back(i);
    auto estimate = [&](const std::vector<Eigen::Index>& rows) {
        if (rows.size() < 2)
            throw std::runtime_error("a class has fewer than 2 rows");
        Eigen::MatrixXd block(static_cast<Eigen::Index>(rows.size()), p);
        for (std::size_t i = 0; i < rows.size(); ++i)
            block.row(static_cast<Eigen::Index>(i)) = ds.features.row(rows[i]);
        MvParams params;
        params.mean = block.colwise().mean();
        const Eigen::MatrixXd centered = block.rowwise() - params.mean.transpose();
        params.covariance =
            centered.transpose() * centered / (static_cast<double>(rows.size()) - 1.0);
        return params;
    };
    return {estimate(rows0), estimate(rows1)};
}

}  // namespace smartbayes
