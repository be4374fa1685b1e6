#include "smartbayes/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>

#include "smartbayes/dataset.hpp"

namespace smartbayes {

namespace {

// Knot span index i with knots[i] <= x < knots[i+1], restricted to the
// spans that carry the clamped basis.
int find_span(const std::vector<double>& knots, int degree, double x) {
    const int last = static_cast<int>(knots.size()) - degree - 2;
    if (x >= knots[static_cast<std::size_t>(last) + 1]) return last;
    if (x <= knots[static_cast<std::size_t>(degree)]) return degree;
    auto it = std::upper_bound(knots.begin() + degree, knots.end() - degree, x);
    return static_cast<int>(it - knots.begin()) - 1;
}

// Cox-de Boor with derivatives (the banded "ders" recursion): fills
// ders[k][j] = k-th derivative of the j-th nonzero basis function at x.
void ders_basis_funs(const std::vector<double>& knots, int degree, int span, double x,
                     int n_deriv, double ders[][4]) {
    double ndu[4][4];
    double left[4], right[4];
    ndu[0][0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = x - knots[static_cast<std::size_t>(span + 1 - j)];
        right[j] = knots[static_cast<std::size_t>(span + j)] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    for (int j = 0; j <= degree; ++j) ders[0][j] = ndu[j][degree];
    if (n_deriv == 0) return;

    double a[2][4];
    for (int r = 0; r <= degree; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= n_deriv; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = degree - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : degree - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::swap(s1, s2);
        }
    }
    double factor = degree;
    for (int k = 1; k <= n_deriv; ++k) {
        for (int j = 0; j <= degree; ++j) ders[k][j] *= factor;
        factor *= degree - k;
    }
}

double softplus(double eta) {
    return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

double sigmoid(double eta) { return 1.0 / (1.0 + std::exp(-eta)); }

std::mutex g_probe_mutex;
std::shared_ptr<const FitProbe> g_probe;

std::shared_ptr<const FitProbe> current_probe() {
    std::lock_guard<std::mutex> lock(g_probe_mutex);
    return g_probe;
}

// Penalized negative log-likelihood at coefficients c.
double objective(const Eigen::MatrixXd& design, const Eigen::VectorXi& y,
                 const Eigen::MatrixXd& penalty, double lambda, const Eigen::VectorXd& c) {
    const Eigen::VectorXd eta = design * c;
    double nll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        nll += -static_cast<double>(y[i]) * eta[i] + softplus(eta[i]);
    return nll + lambda * c.dot(penalty * c);
}

PenalizedSplineFit fit_given_design(const Eigen::MatrixXd& design, const Eigen::VectorXi& y,
                                    const SplineBasis& basis, const Eigen::MatrixXd& penalty,
                                    double lambda, const FitOptions& opts,
                                    const Eigen::VectorXd* warm_start) {
    const Eigen::Index n = design.rows();
    const Eigen::Index dim = design.cols();

    Eigen::VectorXd c = warm_start && warm_start->size() == dim ? *warm_start
                                                                : Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd yd = y.cast<double>();
    double obj = objective(design, y, penalty, lambda, c);

    Eigen::VectorXd eta, mu, grad, weights;
    auto refresh = [&]() {
        eta = design * c;
        mu = eta.unaryExpr([](double e) { return sigmoid(e); });
        grad = design.transpose() * (mu - yd) + 2.0 * lambda * (penalty * c);
    };
    refresh();

    bool converged = false;
    int iter = 0;
    Eigen::MatrixXd hessian(dim, dim);
    while (iter < opts.max_iterations) {
        if (grad.lpNorm<Eigen::Infinity>() <= opts.score_tolerance) {
            converged = true;
            break;
        }
        ++iter;
        weights = mu.array() * (1.0 - mu.array());
        hessian.noalias() = design.transpose() * weights.asDiagonal() * design;
        hessian += 2.0 * lambda * penalty;
        hessian.diagonal().array() += opts.ridge_floor;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
        if (ldlt.info() != Eigen::Success)
            throw std::runtime_error("singular working system in penalized fit");
        const Eigen::VectorXd delta = ldlt.solve(-grad);

        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40; ++h) {
            const Eigen::VectorXd c_try = c + step * delta;
            const double obj_try = objective(design, y, penalty, lambda, c_try);
            if (obj_try <= obj + 1e-12 * (1.0 + std::abs(obj))) {
                c = c_try;
                obj = obj_try;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // stalled; report the score as found
        refresh();
    }
    if (!converged) converged = grad.lpNorm<Eigen::Infinity>() <= opts.score_tolerance;

    PenalizedSplineFit fit;
    fit.basis = basis;
    fit.coefficients = c;
    fit.lambda = lambda;
    fit.converged = converged;
    fit.iterations = iter;

    double nll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        nll += -yd[i] * eta[i] + softplus(eta[i]);
    fit.deviance = 2.0 * nll;

    weights = mu.array() * (1.0 - mu.array());
    Eigen::MatrixXd info = design.transpose() * weights.asDiagonal() * design;
    hessian = info + 2.0 * lambda * penalty;
    hessian.diagonal().array() += opts.ridge_floor;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("singular working system in penalized fit");
    fit.edf = ldlt.solve(info).trace();
    fit.edf = std::clamp(fit.edf, 1.0, static_cast<double>(dim));

    if (auto probe = current_probe(); probe && *probe)
        (*probe)(FitProbeData{design, y, penalty, lambda, fit});
    return fit;
}

}  // namespace

void SplineBasis::evaluate(double x, int deriv, int& first_index, double* out) const {
    if (deriv < 0 || deriv > 2) throw std::invalid_argument("basis derivative order must be 0..2");
    x = std::clamp(x, x_min, x_max);
    const int span = find_span(knots, degree, x);
    double ders[3][4];
    ders_basis_funs(knots, degree, span, x, deriv, ders);
    first_index = span - degree;
    for (int j = 0; j <= degree; ++j) out[j] = ders[deriv][j];
}

Eigen::VectorXd SplineBasis::row(double x, int deriv) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(dimension());
    double vals[4];
    int first;
    evaluate(x, deriv, first, vals);
    for (int j = 0; j <= degree; ++j) r[first + j] = vals[j];
    return r;
}

SplineBasis build_basis(const Eigen::VectorXd& x, int interior_knot_count) {
    if (interior_knot_count < 1) throw std::invalid_argument("interior_knot_count must be >= 1");
    std::set<double> distinct_set(x.data(), x.data() + x.size());
    std::vector<double> distinct(distinct_set.begin(), distinct_set.end());
    const int degree = 3;
    if (static_cast<int>(distinct.size()) < degree + 2)
        throw std::runtime_error("too few distinct values for a spline basis");

    const double lo = distinct.front();
    const double hi = distinct.back();
    std::vector<double> interior;
    for (int j = 1; j <= interior_knot_count; ++j) {
        const double q = quantile(distinct, static_cast<double>(j) /
                                                static_cast<double>(interior_knot_count + 1));
        if (q > lo && q < hi && (interior.empty() || q > interior.back())) interior.push_back(q);
    }

    SplineBasis basis;
    basis.degree = degree;
    basis.x_min = lo;
    basis.x_max = hi;
    basis.knots.assign(static_cast<std::size_t>(degree) + 1, lo);
    basis.knots.insert(basis.knots.end(), interior.begin(), interior.end());
    basis.knots.insert(basis.knots.end(), static_cast<std::size_t>(degree) + 1, hi);
    return basis;
}

Eigen::MatrixXd basis_matrix(const SplineBasis& basis, const Eigen::VectorXd& x, int deriv) {
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(x.size(), basis.dimension());
    double vals[4];
    int first;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        basis.evaluate(x[i], deriv, first, vals);
        for (int j = 0; j <= basis.degree; ++j) design(i, first + j) = vals[j];
    }
    return design;
}

Eigen::MatrixXd curvature_penalty(const SplineBasis& basis) {
    const int dim = basis.dimension();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(dim, dim);
    const double gauss_pt = 1.0 / std::sqrt(3.0);
    double vals[4];
    int first;
    for (std::size_t k = static_cast<std::size_t>(basis.degree);
         k + static_cast<std::size_t>(basis.degree) + 1 < basis.knots.size(); ++k) {
        const double a = basis.knots[k];
        const double b = basis.knots[k + 1];
        const double h = b - a;
        if (h <= 0.0) continue;
        const double mid = 0.5 * (a + b);
        for (const double g : {-gauss_pt, gauss_pt}) {
            basis.evaluate(mid + 0.5 * h * g, 2, first, vals);
            const double w = 0.5 * h;
            for (int r = 0; r <= basis.degree; ++r)
                for (int c = 0; c <= r; ++c) {
                    const double v = w * vals[r] * vals[c];
                    P(first + r, first + c) += v;
                    if (r != c) P(first + c, first + r) += v;
                }
        }
    }
    return P;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    grid.reserve(25);
    for (int k = 0; k < 25; ++k) grid.push_back(std::pow(10.0, -6.0 + 12.0 * k / 24.0));
    return grid;
}

PenalizedSplineFit fit_penalized_logistic(const Eigen::VectorXd& x, const Eigen::VectorXi& y,
                                          const SplineBasis& basis, const Eigen::MatrixXd& penalty,
                                          double lambda, const FitOptions& opts,
                                          const Eigen::VectorXd* warm_start) {
    if (x.size() != y.size()) throw std::invalid_argument("x and y must have equal length");
    const Eigen::MatrixXd design = basis_matrix(basis, x);
    return fit_given_design(design, y, basis, penalty, lambda, opts, warm_start);
}

double gcv_score(const PenalizedSplineFit& fit, std::size_t n) {
    const double nn = static_cast<double>(n);
    if (fit.edf >= nn) return std::numeric_limits<double>::infinity();
    const double denom = nn - fit.edf;
    return nn * fit.deviance / (denom * denom);
}

PenalizedSplineFit select_lambda(const Eigen::VectorXd& x, const Eigen::VectorXi& y,
                                 const SplineBasis& basis, const Eigen::MatrixXd& penalty,
                                 const FitOptions& opts) {
    const std::vector<double> grid = opts.lambda_grid.empty() ? default_lambda_grid() : opts.lambda_grid;
    if (grid.empty()) throw std::invalid_argument("lambda grid is empty");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1])) throw std::invalid_argument("lambda grid must be ascending");
    if (!(grid.front() > 0.0)) throw std::invalid_argument("lambda grid must be positive");
    const Eigen::MatrixXd design = basis_matrix(basis, x);
    const std::size_t n = static_cast<std::size_t>(x.size());

    PenalizedSplineFit best;
    double best_score = std::numeric_limits<double>::infinity();
    bool have_best = false;
    Eigen::VectorXd warm;
    bool have_warm = false;
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
        try {
            PenalizedSplineFit fit = fit_given_design(design, y, basis, penalty, *it, opts,
                                                      have_warm ? &warm : nullptr);
            warm = fit.coefficients;
            have_warm = true;
            const double score = gcv_score(fit, n);
            if (!have_best || score < best_score) {  // ties keep the larger lambda
                best = std::move(fit);
                best_score = score;
                have_best = true;
            }
        } catch (const std::exception&) {
            have_warm = false;
        }
    }
    if (!have_best) throw std::runtime_error("all lambda grid fits failed");
    return best;
}

double predict_eta(const PenalizedSplineFit& fit, double x_new) {
    const SplineBasis& basis = fit.basis;
    double vals[4];
    int first;
    auto expand = [&](double x, int deriv) {
        basis.evaluate(x, deriv, first, vals);
        double s = 0.0;
        for (int j = 0; j <= basis.degree; ++j) s += vals[j] * fit.coefficients[first + j];
        return s;
    };
    if (x_new < basis.x_min)
        return expand(basis.x_min, 0) + (x_new - basis.x_min) * expand(basis.x_min, 1);
    if (x_new > basis.x_max)
        return expand(basis.x_max, 0) + (x_new - basis.x_max) * expand(basis.x_max, 1);
    return expand(x_new, 0);
}

Eigen::VectorXd predict_eta(const PenalizedSplineFit& fit, const Eigen::VectorXd& x_new) {
    Eigen::VectorXd out(x_new.size());
    for (Eigen::Index i = 0; i < x_new.size(); ++i) out[i] = predict_eta(fit, x_new[i]);
    return out;
}

void set_fit_probe(FitProbe probe) {
    std::lock_guard<std::mutex> lock(g_probe_mutex);
    if (probe)
        g_probe = std::make_shared<const FitProbe>(std::move(probe));
    else
        g_probe.reset();
}

}  // namespace smartbayes
