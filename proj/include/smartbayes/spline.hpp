#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace smartbayes {

// Cubic B-spline basis clamped on [x_min, x_max]. Interior knots sit at
// quantiles of the distinct training values; each boundary knot is repeated
// degree+1 times, so the basis is a partition of unity on its span and has
// dimension interior_count + degree + 1.
struct SplineBasis {
    int degree = 3;
    std::vector<double> knots;  // full knot vector including boundary repetition
    double x_min = 0.0;
    double x_max = 0.0;

    int dimension() const { return static_cast<int>(knots.size()) - degree - 1; }
    int interior_count() const { return dimension() - degree - 1; }

    // Writes the degree+1 (possibly) nonzero basis derivatives of order
    // `deriv` at x into out; their global indices start at first_index.
    // x is clamped into [x_min, x_max].
    void evaluate(double x, int deriv, int& first_index, double* out) const;

    // Full-length basis row (dimension() entries).
    Eigen::VectorXd row(double x, int deriv = 0) const;
};

SplineBasis build_basis(const Eigen::VectorXd& x, int interior_knot_count);

// Dense design matrix: row i holds the basis derivatives at x[i].
Eigen::MatrixXd basis_matrix(const SplineBasis& basis, const Eigen::VectorXd& x, int deriv = 0);

// P_jk = integral of basis_j'' * basis_k'' over [x_min, x_max]. Second
// derivatives of cubics are piecewise linear, so two-point Gauss quadrature
// per knot span is exact. P annihilates coefficient vectors representing
// affine functions.
Eigen::MatrixXd curvature_penalty(const SplineBasis& basis);

struct FitOptions {
    int max_iterations = 100;
    double score_tolerance = 1e-8;
    std::vector<double> lambda_grid;  // empty means default_lambda_grid()
    double ridge_floor = 1e-10;
};

// 25 log-spaced values from 1e-6 to 1e6.
std::vector<double> default_lambda_grid();

struct PenalizedSplineFit {
    SplineBasis basis;
    Eigen::VectorXd coefficients;
    double lambda = 0.0;
    double edf = 0.0;       // trace of the influence operator
    double deviance = 0.0;  // 2 * negative log-likelihood (binary saturated fit)
    bool converged = false;
    int iterations = 0;
};

// Minimizes  -sum y_i eta(x_i) + sum log(1 + exp eta(x_i)) + lambda c'Pc
// by penalized IRLS with step-halving. Convergence means the penalized score
// infinity-norm is at most opts.score_tolerance; non-converged fits are
// returned flagged, not aborted.
PenalizedSplineFit fit_penalized_logistic(const Eigen::VectorXd& x, const Eigen::VectorXi& y,
                                          const SplineBasis& basis, const Eigen::MatrixXd& penalty,
                                          double lambda, const FitOptions& opts = {},
                                          const Eigen::VectorXd* warm_start = nullptr);

// n * deviance / (n - edf)^2; +infinity when edf >= n.
double gcv_score(const PenalizedSplineFit& fit, std::size_t n);

// Fits every grid lambda, warm-starting each fit from the previous one
// (descending from the largest), and returns the minimum-GCV fit. Ties break
// toward larger lambda.
PenalizedSplineFit select_lambda(const Eigen::VectorXd& x, const Eigen::VectorXi& y,
                                 const SplineBasis& basis, const Eigen::MatrixXd& penalty,
                                 const FitOptions& opts = {});

// Basis expansion inside [x_min, x_max]; linear continuation from the
// boundary value and first derivative outside. Total on the reals.
Eigen::VectorXd predict_eta(const PenalizedSplineFit& fit, const Eigen::VectorXd& x_new);
double predict_eta(const PenalizedSplineFit& fit, double x_new);

// Validation hook: when set, invoked after every fit_penalized_logistic
// return (including grid fits inside select_lambda), possibly from several
// threads at once. Intended for external fit verification; keep it cheap.
struct FitProbeData {
    const Eigen::MatrixXd& design;
    const Eigen::VectorXi& y;
    const Eigen::MatrixXd& penalty;
    double lambda;
    const PenalizedSplineFit& fit;
};
using FitProbe = std::function<void(const FitProbeData&)>;
void set_fit_probe(FitProbe probe);  // pass nullptr to clear

}  // namespace smartbayes
