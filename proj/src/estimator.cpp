#include "frontdoor/estimator.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "frontdoor/error.hpp"
#include "frontdoor/stats.hpp"

namespace frontdoor::estimate {

namespace {

// Stream path components for the two uses of randomness per grid point.
constexpr std::uint64_t kAceDraws = 0;
constexpr std::uint64_t kBandDraws = 1;

struct Curve {
    std::vector<double> ace, q05, q95;
};

Curve evaluate_curve(const FittedPair& pair, std::span<const double> grid, const EstimatorConfig& config,
                     std::uint64_t dataset_key) {
    Curve c;
    const std::array<double, 2> probs{0.05, 0.95};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        RandomStream ace_rng(config.seed, Stream::Resampling, {dataset_key, g, kAceDraws});
        c.ace.push_back(ace_at(pair, grid[g], ace_rng, config.draws_per_row));
        RandomStream band_rng(config.seed, Stream::Resampling, {dataset_key, g, kBandDraws});
        auto q = stats::quantiles(distribution_at(pair, grid[g], config.distribution_draws, band_rng), probs);
        c.q05.push_back(q[0]);
        c.q95.push_back(q[1]);
    }
    return c;
}

EffectEstimate pool(std::vector<Curve> curves, std::span<const double> grid, Method method) {
    EffectEstimate est;
    est.method = method;
    est.grid.assign(grid.begin(), grid.end());
    const std::size_t m = curves.size(), G = grid.size();
    est.pooled_ace.assign(G, 0.0);
    est.q05.assign(G, 0.0);
    est.q95.assign(G, 0.0);
    est.between_var.assign(G, 0.0);
    for (const auto& c : curves)
        for (std::size_t g = 0; g < G; ++g) {
            est.pooled_ace[g] += c.ace[g];
            est.q05[g] += c.q05[g];
            est.q95[g] += c.q95[g];
        }
    for (std::size_t g = 0; g < G; ++g) {
        est.pooled_ace[g] /= static_cast<double>(m);
        est.q05[g] /= static_cast<double>(m);
        est.q95[g] /= static_cast<double>(m);
        if (m > 1) {
            double s = 0.0;
            for (const auto& c : curves) s += (c.ace[g] - est.pooled_ace[g]) * (c.ace[g] - est.pooled_ace[g]);
            est.between_var[g] = s / static_cast<double>(m - 1);
        }
    }
    for (auto& c : curves) est.per_imputation_ace.push_back(std::move(c.ace));
    return est;
}

void check_grid(std::span<const double> grid) {
    if (grid.empty()) throw Error(Errc::InvalidCount, "grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end())) throw Error(Errc::InvalidConfig, "grid is not sorted");
}

double parse_number(std::string_view s, std::size_t line) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
        throw Error(Errc::DataParse, "line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    return v;
}

}  // namespace

FittedPair fit_pair(const Dataset& data, const spline::SmoothingConfig& smoothing) {
    FittedPair pair;
    pair.x = data.complete_values(data.column("x"));
    auto z = data.complete_values(data.column("z"));
    auto y = data.complete_values(data.column("y"));

    std::vector<double> distinct = pair.x;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    auto basis = spline::build_basis(pair.x, std::min(smoothing.n_knots, distinct.size()));
    pair.mediator = spline::select_lambda(z, pair.x, basis, smoothing.lambda_grid);
    pair.outcome = spline::fit_additive(y, {pair.x, z}, smoothing);
    return pair;
}

std::vector<double> draw_mediator(const FittedPair& pair, double x, std::size_t n, RandomStream& rng) {
    const auto& pool = pair.mediator.residuals;
    if (pool.empty()) throw Error(Errc::EmptyResidualPool, "mediator residual pool is empty");
    const double mean = pair.mediator.predict(x);
    std::vector<double> out(n);
    for (auto& v : out) v = mean + pool[rng.index(pool.size())];
    return out;
}

std::vector<double> draw_mediator(const FittedPair& pair, double x, std::size_t n, std::uint64_t seed) {
    RandomStream rng(seed);
    return draw_mediator(pair, x, n, rng);
}

double ace_at(const FittedPair& pair, double x, RandomStream& rng, std::size_t draws_per_row) {
    const auto& pool = pair.mediator.residuals;
    if (pool.empty()) throw Error(Errc::EmptyResidualPool, "mediator residual pool is empty");
    if (pair.x.empty()) throw Error(Errc::InvalidCount, "no rows to average over");
    if (draws_per_row < 1) throw Error(Errc::InvalidCount, "draws_per_row must be at least 1");
    const double mean = pair.mediator.predict(x);
    double total = 0.0;
    std::array<double, 2> point{};
    for (double xi : pair.x) {
        point[0] = xi;
        double row = 0.0;
        for (std::size_t k = 0; k < draws_per_row; ++k) {
            point[1] = mean + pool[rng.index(pool.size())];
            row += pair.outcome.predict_point(point);
        }
        total += row / static_cast<double>(draws_per_row);
    }
    return total / static_cast<double>(pair.x.size());
}

double ace_at(const FittedPair& pair, double x, std::uint64_t seed, std::size_t draws_per_row) {
    RandomStream rng(seed);
    return ace_at(pair, x, rng, draws_per_row);
}

std::vector<double> distribution_at(const FittedPair& pair, double x, std::size_t n_draws, RandomStream& rng) {
    const auto& zpool = pair.mediator.residuals;
    const auto& ypool = pair.outcome.residuals;
    if (zpool.empty() || ypool.empty()) throw Error(Errc::EmptyResidualPool, "residual pool is empty");
    if (pair.x.empty()) throw Error(Errc::InvalidCount, "no rows to average over");
    const double mean = pair.mediator.predict(x);
    std::vector<double> out(n_draws);
    std::array<double, 2> point{};
    for (std::size_t k = 0; k < n_draws; ++k) {
        point[0] = pair.x[k % pair.x.size()];
        point[1] = mean + zpool[rng.index(zpool.size())];
        out[k] = pair.outcome.predict_point(point) + ypool[rng.index(ypool.size())];
    }
    return out;
}

std::vector<double> distribution_at(const FittedPair& pair, double x, std::size_t n_draws, std::uint64_t seed) {
    RandomStream rng(seed);
    return distribution_at(pair, x, n_draws, rng);
}

std::string_view method_name(Method method) noexcept {
    return method == Method::CompleteCase ? "complete_case" : "multiple_imputation";
}

EffectEstimate estimate_effect(const std::vector<Dataset>& completed, std::span<const double> grid,
                               const EstimatorConfig& config) {
    check_grid(grid);
    if (completed.empty()) throw Error(Errc::InvalidCount, "no completed datasets");
    std::vector<Curve> curves;
    for (std::size_t k = 0; k < completed.size(); ++k)
        curves.push_back(evaluate_curve(fit_pair(completed[k], config.smoothing), grid, config, k));
    return pool(std::move(curves), grid, Method::MultipleImputation);
}

EffectEstimate complete_case_effect(const Dataset& data, std::span<const double> grid, const EstimatorConfig& config) {
    check_grid(grid);
    Dataset cc = data.complete_cases();
    const std::size_t needed = config.complete_case_factor * (config.smoothing.n_knots + 2);
    if (cc.rows() < needed)
        throw Error(Errc::TooFewCompleteRows, std::to_string(cc.rows()) + " complete rows, need " + std::to_string(needed));
    std::vector<Curve> curves{evaluate_curve(fit_pair(cc, config.smoothing), grid, config, 0)};
    return pool(std::move(curves), grid, Method::CompleteCase);
}

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    if (count == 0) throw Error(Errc::InvalidCount, "grid needs at least one point");
    if (count == 1) return {lo};
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    g.back() = hi;
    return g;
}

std::string effect_csv(const EffectEstimate& est, std::span<const double> oracle) {
    if (!oracle.empty() && oracle.size() != est.grid.size())
        throw Error(Errc::SizeMismatch, "oracle and grid lengths differ");
    std::string out = "x,pooled_ace";
    for (std::size_t k = 0; k < est.imputations(); ++k) out += ",ace_imp_" + std::to_string(k + 1);
    out += ",q05,q95,oracle_ace,method,between_var\n";
    for (std::size_t g = 0; g < est.grid.size(); ++g) {
        out += format_double(est.grid[g]) + "," + format_double(est.pooled_ace[g]);
        for (const auto& curve : est.per_imputation_ace) out += "," + format_double(curve[g]);
        out += "," + format_double(est.q05[g]) + "," + format_double(est.q95[g]);
        out += "," + (oracle.empty() ? std::string("NA") : format_double(oracle[g]));
        out += "," + std::string(method_name(est.method)) + "," + format_double(est.between_var[g]) + "\n";
    }
    return out;
}

EffectTable effect_from_csv(std::string_view text) {
    std::vector<std::vector<std::string_view>> lines;
    while (!text.empty()) {
        auto end = text.find('\n');
        auto line = text.substr(0, end);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) {
            std::vector<std::string_view> cells;
            std::size_t start = 0;
            for (;;) {
                auto comma = line.find(',', start);
                cells.push_back(line.substr(start, comma - start));
                if (comma == std::string_view::npos) break;
                start = comma + 1;
            }
            lines.push_back(std::move(cells));
        }
        text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    }
    if (lines.empty()) throw Error(Errc::DataParse, "effect table is empty");
    const auto& header = lines[0];
    const std::size_t cols = header.size();
    if (cols < 7 || header[0] != "x" || header[1] != "pooled_ace" || header[cols - 5] != "q05" ||
        header[cols - 4] != "q95" || header[cols - 3] != "oracle_ace" || header[cols - 2] != "method" ||
        header[cols - 1] != "between_var")
        throw Error(Errc::DataParse, "line 1: unexpected effect table header");
    const std::size_t m = cols - 7;
    for (std::size_t k = 0; k < m; ++k)
        if (header[2 + k] != "ace_imp_" + std::to_string(k + 1))
            throw Error(Errc::DataParse, "line 1: unexpected column '" + std::string(header[2 + k]) + "'");

    EffectTable t;
    auto& est = t.estimate;
    est.per_imputation_ace.assign(m, {});
    bool has_oracle = true;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const auto& c = lines[l];
        if (c.size() != cols)
            throw Error(Errc::DataParse, "line " + std::to_string(l + 1) + ": expected " + std::to_string(cols) + " fields");
        est.grid.push_back(parse_number(c[0], l + 1));
        est.pooled_ace.push_back(parse_number(c[1], l + 1));
        for (std::size_t k = 0; k < m; ++k) est.per_imputation_ace[k].push_back(parse_number(c[2 + k], l + 1));
        est.q05.push_back(parse_number(c[cols - 5], l + 1));
        est.q95.push_back(parse_number(c[cols - 4], l + 1));
        if (c[cols - 3] == "NA") has_oracle = false;
        else t.oracle.push_back(parse_number(c[cols - 3], l + 1));
        if (c[cols - 2] == method_name(Method::CompleteCase)) est.method = Method::CompleteCase;
        else if (c[cols - 2] == method_name(Method::MultipleImputation)) est.method = Method::MultipleImputation;
        else throw Error(Errc::DataParse, "line " + std::to_string(l + 1) + ": unknown method");
        est.between_var.push_back(parse_number(c[cols - 1], l + 1));
    }
    if (!has_oracle) t.oracle.clear();
    return t;
}

}  // namespace frontdoor::estimate
