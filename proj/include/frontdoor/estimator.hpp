#ifndef FRONTDOOR_ESTIMATOR_HPP
#define FRONTDOOR_ESTIMATOR_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frontdoor/dataset.hpp"
#include "frontdoor/rng.hpp"
#include "frontdoor/spline.hpp"

namespace frontdoor::estimate {

/// Mediator model E(Z | X) and outcome model E(Y | X, Z) fitted on one
/// complete dataset, with the residual pools used for resampling and the
/// dataset's x column standing in for p(X = x').
struct FittedPair {
    spline::PenalizedSplineFit mediator;
    spline::AdditiveFit outcome;
    std::vector<double> x;
};

struct EstimatorConfig {
    spline::SmoothingConfig smoothing;
    /// Mediator draws per dataset row in ace_at, averaged.
    std::size_t draws_per_row = 1;
    /// Size of the sample behind each quantile band.
    std::size_t distribution_draws = 20000;
    std::uint64_t seed = 0;
    /// Complete-case analysis needs this many times the basis dimension in rows.
    std::size_t complete_case_factor = 10;
};

/// Needs columns x, z and y, all complete (throws MissingValue otherwise).
FittedPair fit_pair(const Dataset& data, const spline::SmoothingConfig& smoothing = {});

/// n draws of mediator.predict(x) plus a resampled mediator residual.
/// Throws EmptyResidualPool.
std::vector<double> draw_mediator(const FittedPair& pair, double x, std::size_t n, RandomStream& rng);
std::vector<double> draw_mediator(const FittedPair& pair, double x, std::size_t n, std::uint64_t seed);

/// Plug-in frontdoor estimate of E(Y | do(X = x)): the mean over rows i of
/// outcome(x_i, z_i), where x_i is the row's own x and z_i is a mediator draw
/// at the target x.
double ace_at(const FittedPair& pair, double x, RandomStream& rng, std::size_t draws_per_row = 1);
double ace_at(const FittedPair& pair, double x, std::uint64_t seed, std::size_t draws_per_row = 1);

/// Draws from the estimated p(Y | do(X = x)): outcome(x_i, z_i) plus a
/// resampled outcome residual, cycling over the rows until n_draws values exist.
std::vector<double> distribution_at(const FittedPair& pair, double x, std::size_t n_draws, RandomStream& rng);
std::vector<double> distribution_at(const FittedPair& pair, double x, std::size_t n_draws, std::uint64_t seed);

enum class Method { MultipleImputation, CompleteCase };

std::string_view method_name(Method method) noexcept;

struct EffectEstimate {
    std::vector<double> grid;
    /// per_imputation_ace[k][g]: imputation k at grid point g.
    std::vector<std::vector<double>> per_imputation_ace;
    std::vector<double> pooled_ace;
    std::vector<double> q05;
    std::vector<double> q95;
    /// Sample variance of the per-imputation curves (0 for a single curve).
    std::vector<double> between_var;
    Method method = Method::MultipleImputation;

    std::size_t imputations() const noexcept { return per_imputation_ace.size(); }
};

/// Fits every dataset, evaluates the curve and bands over the grid and pools
/// them: means of the curves and means of the per-dataset quantiles. Each
/// (dataset, grid point) pair gets its own random stream from config.seed.
EffectEstimate estimate_effect(const std::vector<Dataset>& completed, std::span<const double> grid,
                               const EstimatorConfig& config = {});

/// The same on the rows of `data` without missing cells. Throws
/// TooFewCompleteRows below config.complete_case_factor times the basis dimension.
EffectEstimate complete_case_effect(const Dataset& data, std::span<const double> grid,
                                    const EstimatorConfig& config = {});

/// `count` equally spaced points over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, std::size_t count);

/// Columns: x, pooled_ace, ace_imp_1..ace_imp_m, q05, q95, oracle_ace,
/// method, between_var. `oracle` may be empty, giving NA.
std::string effect_csv(const EffectEstimate& est, std::span<const double> oracle);

struct EffectTable {
    EffectEstimate estimate;
    std::vector<double> oracle;  // empty when the file had NA
};

/// Reads what effect_csv writes. Throws DataParse.
EffectTable effect_from_csv(std::string_view text);

}  // namespace frontdoor::estimate

#endif
