#ifndef FRONTDOOR_SCM_HPP
#define FRONTDOOR_SCM_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "frontdoor/dataset.hpp"
#include "frontdoor/keyvalue.hpp"

namespace frontdoor::scm {

/// Standard normal density.
double std_normal_pdf(double x) noexcept;
/// Standard normal distribution function, computed as erfc(-x/sqrt 2)/2.
/// Absolute error is at the level of double rounding, far below 1e-7.
double std_normal_cdf(double x) noexcept;

/// Parameters of the frontdoor structural model
///   U ~ N(0,1), X' ~ Unif(lo, hi), X = X' + U,
///   Z = amplitude * phi(X) + eps, eps ~ N(0, sigma_z^2),
///   Y = phi(Z - shift) + linear * Z + u_coef * U,
/// and of the missingness mechanisms
///   P(X observed | y) = Phi(a_x + b_x y),  P(Z observed | y) = Phi(a_z + b_z y).
struct ScmConfig {
    double sigma_z = 0.1;
    double z_amplitude = 4.0;
    double y_shift = 0.5;
    double y_linear = 0.3;
    double u_coef = -0.1;
    std::pair<double, double> x_prime_range{-2.0, 2.0};
    std::pair<double, double> miss_x_params{2.0, -1.0};
    std::pair<double, double> miss_z_params{-1.0, 4.0};

    /// Throws InvalidConfig when sigma_z <= 0 or the X' range is empty.
    void validate() const;

    /// Keys: sigma_z, z_amplitude, y_shift, y_linear, u_coef, x_prime_low,
    /// x_prime_high, miss_x_a, miss_x_b, miss_z_a, miss_z_b, each under `prefix`.
    static ScmConfig from_keyvalues(const KeyValues& kv, const std::string& prefix = "");
    void to_keyvalues(KeyValues& kv, const std::string& prefix = "") const;
};

struct PopulationRow {
    double u;
    double x;
    double z;
    double y;
};

/// Draws n rows i.i.d. from the structural model. Deterministic in (cfg, n, seed).
std::vector<PopulationRow> generate_population(const ScmConfig& cfg, std::size_t n, std::uint64_t seed);

/// Draws n values of Y under do(X = x).
std::vector<double> intervene_generate(const ScmConfig& cfg, double x, std::size_t n, std::uint64_t seed);

/// Exact E(Y | do(X = x)): the Gaussian convolution of phi(. - shift) with
/// N(m, sigma_z^2) at m = amplitude * phi(x), plus linear * m.
double oracle_ace(const ScmConfig& cfg, double x) noexcept;

double prob_x_observed(const ScmConfig& cfg, double y) noexcept;
double prob_z_observed(const ScmConfig& cfg, double y) noexcept;

/// Masks x and z per the missingness mechanisms; y is always observed.
/// Columns are named x, z, y.
Dataset apply_missingness(const ScmConfig& cfg, const std::vector<PopulationRow>& rows, std::uint64_t seed);

/// Population table with columns u, x, z, y (no missing cells).
Dataset population_table(const std::vector<PopulationRow>& rows);
std::vector<PopulationRow> population_rows(const Dataset& table);

struct MissingnessSummary {
    std::size_t rows = 0;
    double x_missing = 0.0;
    double z_missing = 0.0;
    double both_missing = 0.0;
};

MissingnessSummary summarize_missingness(const Dataset& observed);

}  // namespace frontdoor::scm

#endif
