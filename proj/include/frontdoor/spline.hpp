#ifndef FRONTDOOR_SPLINE_HPP
#define FRONTDOOR_SPLINE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace frontdoor::spline {

/// Clamped B-spline basis. `knots` are the breakpoints, the first and last of
/// which coincide with `boundary`; the basis has knots.size() + degree - 1
/// functions. Beyond the boundary the basis is continued linearly.
struct SplineBasis {
    std::vector<double> knots;
    int degree = 3;
    std::pair<double, double> boundary{0.0, 1.0};

    std::size_t dimension() const noexcept { return knots.size() + static_cast<std::size_t>(degree) - 1; }

    /// Nonzero basis values at x: writes degree + 1 values into `values`
    /// and returns the index of the first one.
    std::size_t evaluate(double x, std::span<double> values) const;

    /// Greville abscissae, one per basis function.
    std::vector<double> greville() const;
};

/// Breakpoints at quantiles of the distinct values of x, with the end
/// breakpoints moved out to the data range widened by 5% on each side.
/// Throws TooFewDistinctValues when x has fewer than n_knots distinct values,
/// InvalidCount when n_knots < 4.
SplineBasis build_basis(std::span<const double> x, std::size_t n_knots);

/// Curvature penalty P = D'D where D takes second divided differences of the
/// coefficients over the Greville abscissae (scaled by the mean spacing
/// squared). Its null space is exactly the affine functions, also for
/// unevenly spaced knots.
std::vector<double> penalty_matrix(const SplineBasis& basis);

struct PenalizedSplineFit {
    SplineBasis basis;
    std::vector<double> coefficients;
    double lambda = 0.0;
    double edf = 0.0;
    std::vector<double> residuals;
    double gcv = 0.0;
    /// Set when the Gram matrix needed the 1e-10 * trace ridge to factorize.
    bool ridge_applied = false;

    double predict(double x) const;
    std::vector<double> predict(std::span<const double> x) const;
    std::vector<double> fitted_values(std::span<const double> x) const { return predict(x); }
};

/// Minimizes |y - B beta|^2 + lambda beta' P beta. Throws SingularSystem,
/// SizeMismatch.
PenalizedSplineFit fit_penalized(std::span<const double> y, std::span<const double> x,
                                 const SplineBasis& basis, double lambda);

/// Fit minimizing GCV over `grid`; ties go to the larger lambda.
PenalizedSplineFit select_lambda(std::span<const double> y, std::span<const double> x,
                                 const SplineBasis& basis, std::span<const double> grid);

/// Diagonal of the influence matrix at the training points.
std::vector<double> leverages(const PenalizedSplineFit& fit, std::span<const double> x);

/// Log-spaced grid, `count` points over [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

struct SmoothingConfig {
    std::size_t n_knots = 20;
    std::vector<double> lambda_grid = log_grid(1e-6, 1e6, 25);
    std::size_t max_cycles = 50;
    double tolerance = 1e-6;
};

/// One additive component. Covariates with fewer than four distinct values
/// (a sign indicator, say) enter linearly; the rest get a spline with
/// min(n_knots, distinct values, n - 2) breakpoints, or enter linearly when
/// that is below four.
struct AdditiveTerm {
    enum class Kind { Spline, Linear };
    Kind kind = Kind::Spline;
    PenalizedSplineFit spline;
    double slope = 0.0;
    /// Subtracted so the component sums to zero over the training data.
    double center = 0.0;

    double evaluate(double x) const;
};

struct AdditiveFit {
    std::vector<AdditiveTerm> terms;
    double intercept = 0.0;
    std::vector<double> residuals;
    std::size_t cycles = 0;
    bool converged = false;

    /// `covariates[j][i]` is covariate j at point i.
    std::vector<double> predict(const std::vector<std::vector<double>>& covariates) const;
    double predict_point(std::span<const double> point) const;
};

/// y = intercept + sum_j f_j(x_j) + e by penalized backfitting. Each cycle
/// re-selects every term's lambda by GCV on its partial residuals and then
/// moves to the backfitting fixed point for those lambdas, which is obtained
/// by solving the joint penalized normal equations under sum-to-zero
/// constraints. Stops when no fitted component moves by more than
/// `tolerance`, or after `max_cycles` with converged = false.
AdditiveFit fit_additive(std::span<const double> y, const std::vector<std::vector<double>>& covariates,
                         const SmoothingConfig& config = {});

/// Flat text serialization of a fit (knots, coefficients, lambda, residuals).
std::string format_fit(const PenalizedSplineFit& fit, const std::string& prefix);
std::string format_fit(const AdditiveFit& fit, const std::string& prefix);

}  // namespace frontdoor::spline

#endif
