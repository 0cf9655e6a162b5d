#include "frontdoor/scm.hpp"

#include <cmath>
#include <numbers>

#include "frontdoor/error.hpp"
#include "frontdoor/rng.hpp"

namespace frontdoor::scm {

double std_normal_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

void ScmConfig::validate() const {
    if (!(sigma_z > 0.0)) throw Error(Errc::InvalidConfig, "sigma_z must be positive");
    if (!(x_prime_range.first < x_prime_range.second))
        throw Error(Errc::InvalidConfig, "x_prime_range must satisfy low < high");
}

ScmConfig ScmConfig::from_keyvalues(const KeyValues& kv, const std::string& prefix) {
    ScmConfig c;
    c.sigma_z = kv.get_double(prefix + "sigma_z", c.sigma_z);
    c.z_amplitude = kv.get_double(prefix + "z_amplitude", c.z_amplitude);
    c.y_shift = kv.get_double(prefix + "y_shift", c.y_shift);
    c.y_linear = kv.get_double(prefix + "y_linear", c.y_linear);
    c.u_coef = kv.get_double(prefix + "u_coef", c.u_coef);
    c.x_prime_range.first = kv.get_double(prefix + "x_prime_low", c.x_prime_range.first);
    c.x_prime_range.second = kv.get_double(prefix + "x_prime_high", c.x_prime_range.second);
    c.miss_x_params.first = kv.get_double(prefix + "miss_x_a", c.miss_x_params.first);
    c.miss_x_params.second = kv.get_double(prefix + "miss_x_b", c.miss_x_params.second);
    c.miss_z_params.first = kv.get_double(prefix + "miss_z_a", c.miss_z_params.first);
    c.miss_z_params.second = kv.get_double(prefix + "miss_z_b", c.miss_z_params.second);
    c.validate();
    return c;
}

void ScmConfig::to_keyvalues(KeyValues& kv, const std::string& prefix) const {
    kv.set(prefix + "sigma_z", format_double(sigma_z));
    kv.set(prefix + "z_amplitude", format_double(z_amplitude));
    kv.set(prefix + "y_shift", format_double(y_shift));
    kv.set(prefix + "y_linear", format_double(y_linear));
    kv.set(prefix + "u_coef", format_double(u_coef));
    kv.set(prefix + "x_prime_low", format_double(x_prime_range.first));
    kv.set(prefix + "x_prime_high", format_double(x_prime_range.second));
    kv.set(prefix + "miss_x_a", format_double(miss_x_params.first));
    kv.set(prefix + "miss_x_b", format_double(miss_x_params.second));
    kv.set(prefix + "miss_z_a", format_double(miss_z_params.first));
    kv.set(prefix + "miss_z_b", format_double(miss_z_params.second));
}

namespace {

double outcome(const ScmConfig& cfg, double z, double u) noexcept {
    return std_normal_pdf(z - cfg.y_shift) + cfg.y_linear * z + cfg.u_coef * u;
}

void require_count(std::size_t n) {
    if (n == 0) throw Error(Errc::InvalidCount, "sample size must be at least 1");
}

}  // namespace

std::vector<PopulationRow> generate_population(const ScmConfig& cfg, std::size_t n, std::uint64_t seed) {
    require_count(n);
    cfg.validate();
    RandomStream rng(seed, Stream::Population);
    std::vector<PopulationRow> rows(n);
    for (auto& row : rows) {
        row.u = rng.normal();
        double x_prime = rng.uniform(cfg.x_prime_range.first, cfg.x_prime_range.second);
        double eps = cfg.sigma_z * rng.normal();
        row.x = x_prime + row.u;
        row.z = cfg.z_amplitude * std_normal_pdf(row.x) + eps;
        row.y = outcome(cfg, row.z, row.u);
    }
    return rows;
}

std::vector<double> intervene_generate(const ScmConfig& cfg, double x, std::size_t n, std::uint64_t seed) {
    require_count(n);
    cfg.validate();
    RandomStream rng(seed, Stream::Intervention);
    const double mediator_mean = cfg.z_amplitude * std_normal_pdf(x);
    std::vector<double> y(n);
    for (auto& v : y) {
        double u = rng.normal();
        double z = mediator_mean + cfg.sigma_z * rng.normal();
        v = outcome(cfg, z, u);
    }
    return y;
}

double oracle_ace(const ScmConfig& cfg, double x) noexcept {
    const double m = cfg.z_amplitude * std_normal_pdf(x);
    const double var = 1.0 + cfg.sigma_z * cfg.sigma_z;
    const double d = m - cfg.y_shift;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var) + cfg.y_linear * m;
}

double prob_x_observed(const ScmConfig& cfg, double y) noexcept {
    return std_normal_cdf(cfg.miss_x_params.first + cfg.miss_x_params.second * y);
}

double prob_z_observed(const ScmConfig& cfg, double y) noexcept {
    return std_normal_cdf(cfg.miss_z_params.first + cfg.miss_z_params.second * y);
}

Dataset apply_missingness(const ScmConfig& cfg, const std::vector<PopulationRow>& rows, std::uint64_t seed) {
    require_count(rows.size());
    RandomStream rng(seed, Stream::Missingness);
    Dataset data({"x", "z", "y"}, rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        bool x_obs = rng.bernoulli(prob_x_observed(cfg, r.y));
        bool z_obs = rng.bernoulli(prob_z_observed(cfg, r.y));
        if (x_obs) data.set(0, i, r.x);
        if (z_obs) data.set(1, i, r.z);
        data.set(2, i, r.y);
    }
    return data;
}

Dataset population_table(const std::vector<PopulationRow>& rows) {
    Dataset t({"u", "x", "z", "y"}, rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.set(0, i, rows[i].u);
        t.set(1, i, rows[i].x);
        t.set(2, i, rows[i].z);
        t.set(3, i, rows[i].y);
    }
    return t;
}

std::vector<PopulationRow> population_rows(const Dataset& table) {
    auto u = table.complete_values(table.column("u"));
    auto x = table.complete_values(table.column("x"));
    auto z = table.complete_values(table.column("z"));
    auto y = table.complete_values(table.column("y"));
    std::vector<PopulationRow> rows(table.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = {u[i], x[i], z[i], y[i]};
    return rows;
}

MissingnessSummary summarize_missingness(const Dataset& observed) {
    MissingnessSummary s;
    s.rows = observed.rows();
    if (s.rows == 0) return s;
    std::size_t cx = observed.column("x"), cz = observed.column("z");
    std::size_t both = 0;
    for (std::size_t r = 0; r < s.rows; ++r)
        if (!observed.observed(cx, r) && !observed.observed(cz, r)) ++both;
    double n = static_cast<double>(s.rows);
    s.x_missing = static_cast<double>(observed.missing_count(cx)) / n;
    s.z_missing = static_cast<double>(observed.missing_count(cz)) / n;
    s.both_missing = static_cast<double>(both) / n;
    return s;
}

}  // namespace frontdoor::scm
