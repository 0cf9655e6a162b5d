#ifndef FRONTDOOR_MICE_HPP
#define FRONTDOOR_MICE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "frontdoor/dataset.hpp"
#include "frontdoor/rng.hpp"
#include "frontdoor/spline.hpp"

namespace frontdoor::mi {

struct Decomposed {
    double magnitude;
    double sign;  // +1 or -1; zero counts as positive
};

Decomposed decompose_x(double x) noexcept;

enum class VisitOrder { XThenZ, ZThenX };

struct ImputationConfig {
    std::size_t m = 10;
    std::size_t cycles = 10;
    std::size_t donors = 5;
    std::uint64_t seed = 0;
    VisitOrder order = VisitOrder::XThenZ;
    spline::SmoothingConfig smoothing;

    /// Throws InvalidConfig unless m >= 2, cycles >= 1, donors >= 1.
    void validate() const;
};

struct TraceEntry {
    std::size_t chain;
    std::size_t cycle;
    std::string variable;
    double mean;  // over the imputed cells only
    double sd;
};

struct CompletedDatasets {
    Dataset source;
    std::vector<Dataset> completed;
    std::vector<TraceEntry> trace;
    /// Columns the chains impute, in visiting order.
    std::vector<std::string> variables;
};

/// Fills each missing cell with a uniform draw from the observed values of
/// its column. Throws AllMissingColumn.
Dataset initialize(const Dataset& data, RandomStream& rng);
Dataset initialize(const Dataset& data, std::uint64_t seed);

/// Predictive mean matching. Fits an additive spline model of `target` on
/// `predictors` over the rows where `observed` is set, then gives every
/// unobserved row the target value of a donor drawn uniformly from the
/// `donors` observed rows with the nearest predicted means. Returns the
/// imputed values in row order. Throws NothingToImpute.
std::vector<double> pmm_impute(std::span<const double> target, const std::vector<bool>& observed,
                               const std::vector<std::vector<double>>& predictors, std::size_t donors,
                               RandomStream& rng, const spline::SmoothingConfig& smoothing = {});
std::vector<double> pmm_impute(std::span<const double> target, const std::vector<bool>& observed,
                               const std::vector<std::vector<double>>& predictors, std::size_t donors,
                               std::uint64_t seed, const spline::SmoothingConfig& smoothing = {});

/// Signs (+1/-1) for the unobserved rows: an additive model of the 0/1-coded
/// sign on `predictors`, clamped to [0.01, 0.99], gives the probability of +1.
std::vector<double> impute_sign(std::span<const double> signs, const std::vector<bool>& observed,
                                const std::vector<std::vector<double>>& predictors, RandomStream& rng,
                                const spline::SmoothingConfig& smoothing = {});

/// Chained equations over columns x, z and y of `data` (y must be complete).
/// Each of the m chains is seeded from (cfg.seed, chain index) and runs
/// cfg.cycles rounds of: sign(x) and |x| given (z, y), then z given
/// (|x|, sign(x), y). Other columns are carried along untouched.
CompletedDatasets run_mice(const Dataset& data, const ImputationConfig& cfg);

struct DiagnosticRow {
    std::string variable;
    std::size_t dataset_index;  // 1-based
    std::string side;           // "observed" or "imputed"
    std::size_t count;
    double mean;
    double sd;
    std::array<double, 9> deciles;
    double ks;  // observed vs imputed, same value on both sides
};

/// Observed against imputed summaries per imputed variable and completed
/// dataset. Sides with no values have count 0.
std::vector<DiagnosticRow> imputation_diagnostics(const CompletedDatasets& result);

/// Columns: variable, dataset_index, side, count, mean, sd, d1..d9, ks.
/// Empty sides print NA.
std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows);

}  // namespace frontdoor::mi

#endif
