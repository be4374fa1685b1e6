#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "smartbayes/curve.hpp"
#include "smartbayes/dataset.hpp"

namespace smartbayes {

// Multivariate Gaussian, or multivariate t when df is set.
struct MvParams {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    std::optional<double> df;
};

// Lower Cholesky factor, adding diagonal jitter 1e-10 * trace/p escalating
// tenfold up to 1e-8 * trace/p before giving up.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& covariance);

// Row i is mean + L * eps_i (Gaussian), additionally scaled by
// sqrt(df / W_i) with W_i ~ chi-square(df) for the t case. Deterministic in
// the seed; per row, the p normals are drawn first, then W.
Eigen::MatrixXd sample_mv(const MvParams& params, std::size_t count, std::uint64_t seed);

struct SimulationPlan {
    MvParams class0;
    MvParams class1;
    std::vector<std::size_t> training_sizes;  // per-class draw count m per cell
    int replications = 100;
    std::uint64_t master_seed = 0;
    int threads = 1;
    std::string name = "sim";
};

// For each size m and replication: draw m rows per class, split the pooled
// 2m rows half/half, fit NB, LR and SB on the training half, and record the
// test misclassification rate. Replication seeds derive from
// (master_seed, m, replication), so the result is a pure function of the
// plan regardless of thread count.
LearningCurve run_simulation(const SimulationPlan& plan);

// Per-class sample means and covariances (divisor n-1) of a labeled dataset,
// for simulations that mimic a real dataset's class geometry.
std::pair<MvParams, MvParams> estimate_class_params(const Dataset& ds);

// Deterministic synthetic problem for a given dimension: correlated
// Wishart-style covariances drawn once per class (so the marginal ratios are
// genuinely nonlinear) and a fixed mean shift. Used when no dataset supplies
// the class geometry.
std::pair<MvParams, MvParams> synthetic_class_params(std::size_t p);

}  // namespace smartbayes
