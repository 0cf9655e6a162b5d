#include "frontdoor/mice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frontdoor/error.hpp"
#include "frontdoor/stats.hpp"

namespace frontdoor::mi {

namespace {

constexpr std::array<double, 9> kDeciles{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

void check_columns(std::span<const double> target, const std::vector<bool>& observed,
                   const std::vector<std::vector<double>>& predictors) {
    if (observed.size() != target.size()) throw Error(Errc::SizeMismatch, "mask and target lengths differ");
    for (const auto& p : predictors)
        if (p.size() != target.size()) throw Error(Errc::SizeMismatch, "predictor and target lengths differ");
}

struct Split {
    std::vector<std::size_t> observed;
    std::vector<std::size_t> missing;
};

Split split_rows(const std::vector<bool>& mask) {
    Split s;
    for (std::size_t i = 0; i < mask.size(); ++i) (mask[i] ? s.observed : s.missing).push_back(i);
    return s;
}

// Additive fit on the observed rows, evaluated at every row.
std::vector<double> predicted_means(std::span<const double> target, const Split& rows,
                                    const std::vector<std::vector<double>>& predictors,
                                    const spline::SmoothingConfig& smoothing) {
    std::vector<double> y;
    y.reserve(rows.observed.size());
    for (auto i : rows.observed) y.push_back(target[i]);
    std::vector<std::vector<double>> cov(predictors.size());
    for (std::size_t j = 0; j < predictors.size(); ++j) {
        cov[j].reserve(rows.observed.size());
        for (auto i : rows.observed) cov[j].push_back(predictors[j][i]);
    }
    auto fit = spline::fit_additive(y, cov, smoothing);
    return fit.predict(predictors);
}

void record(std::vector<TraceEntry>& trace, std::size_t chain, std::size_t cycle, const std::string& name,
            const std::vector<double>& values) {
    trace.push_back({chain, cycle, name, stats::mean(values), stats::sd(values)});
}

}  // namespace

Decomposed decompose_x(double x) noexcept {
    return x >= 0.0 ? Decomposed{x, 1.0} : Decomposed{-x, -1.0};
}

void ImputationConfig::validate() const {
    if (m < 2) throw Error(Errc::InvalidConfig, "m must be at least 2");
    if (cycles < 1) throw Error(Errc::InvalidConfig, "cycles must be at least 1");
    if (donors < 1) throw Error(Errc::InvalidConfig, "donors must be at least 1");
}

Dataset initialize(const Dataset& data, RandomStream& rng) {
    Dataset out = data;
    for (std::size_t c = 0; c < data.cols(); ++c) {
        if (data.missing_count(c) == 0) continue;
        auto pool = data.observed_values(c);
        if (pool.empty()) throw Error(Errc::AllMissingColumn, "column '" + data.names()[c] + "' has no observed values");
        for (std::size_t r = 0; r < data.rows(); ++r)
            if (!data.observed(c, r)) out.set(c, r, pool[rng.index(pool.size())]);
    }
    return out;
}

Dataset initialize(const Dataset& data, std::uint64_t seed) {
    RandomStream rng(seed);
    return initialize(data, rng);
}

std::vector<double> pmm_impute(std::span<const double> target, const std::vector<bool>& observed,
                               const std::vector<std::vector<double>>& predictors, std::size_t donors,
                               RandomStream& rng, const spline::SmoothingConfig& smoothing) {
    check_columns(target, observed, predictors);
    auto rows = split_rows(observed);
    if (rows.missing.empty()) throw Error(Errc::NothingToImpute, "target has no missing values");
    if (rows.observed.empty()) throw Error(Errc::AllMissingColumn, "target has no observed values");
    if (donors < 1) throw Error(Errc::InvalidConfig, "donors must be at least 1");

    auto pred = predicted_means(target, rows, predictors, smoothing);

    // Observed rows ordered by predicted mean; ties keep row order.
    std::vector<std::size_t> order = rows.observed;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pred[a] < pred[b]; });
    std::vector<double> keys(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) keys[k] = pred[order[k]];

    const std::size_t pool = std::min(donors, order.size());
    std::vector<double> out;
    out.reserve(rows.missing.size());
    for (auto i : rows.missing) {
        const double p = pred[i];
        // Grow the window [lo, hi) around p one nearest neighbour at a time.
        std::size_t hi = static_cast<std::size_t>(std::lower_bound(keys.begin(), keys.end(), p) - keys.begin());
        std::size_t lo = hi;
        while (hi - lo < pool) {
            if (lo == 0) ++hi;
            else if (hi == keys.size()) --lo;
            else if (p - keys[lo - 1] <= keys[hi] - p) --lo;
            else ++hi;
        }
        out.push_back(target[order[lo + rng.index(pool)]]);
    }
    return out;
}

std::vector<double> pmm_impute(std::span<const double> target, const std::vector<bool>& observed,
                               const std::vector<std::vector<double>>& predictors, std::size_t donors,
                               std::uint64_t seed, const spline::SmoothingConfig& smoothing) {
    RandomStream rng(seed);
    return pmm_impute(target, observed, predictors, donors, rng, smoothing);
}

std::vector<double> impute_sign(std::span<const double> signs, const std::vector<bool>& observed,
                                const std::vector<std::vector<double>>& predictors, RandomStream& rng,
                                const spline::SmoothingConfig& smoothing) {
    check_columns(signs, observed, predictors);
    auto rows = split_rows(observed);
    if (rows.missing.empty()) throw Error(Errc::NothingToImpute, "sign has no missing values");
    if (rows.observed.empty()) throw Error(Errc::AllMissingColumn, "sign has no observed values");

    std::vector<double> coded(signs.size());
    for (std::size_t i = 0; i < signs.size(); ++i) coded[i] = signs[i] > 0.0 ? 1.0 : 0.0;
    auto prob = predicted_means(coded, rows, predictors, smoothing);

    std::vector<double> out;
    out.reserve(rows.missing.size());
    for (auto i : rows.missing) out.push_back(rng.bernoulli(std::clamp(prob[i], 0.01, 0.99)) ? 1.0 : -1.0);
    return out;
}

CompletedDatasets run_mice(const Dataset& data, const ImputationConfig& cfg) {
    cfg.validate();

    const std::size_t cx = data.column("x"), cz = data.column("z"), cy = data.column("y");
    const std::size_t n = data.rows();
    const auto y = data.complete_values(cy);
    const auto& mask_x = data.observed_mask(cx);
    const auto& mask_z = data.observed_mask(cz);
    const bool impute_x = data.missing_count(cx) > 0;
    const bool impute_z = data.missing_count(cz) > 0;

    CompletedDatasets result;
    result.source = data;
    result.variables = cfg.order == VisitOrder::XThenZ ? std::vector<std::string>{"x", "z"}
                                                       : std::vector<std::string>{"z", "x"};

    for (std::size_t chain = 0; chain < cfg.m; ++chain) {
        if (!impute_x && !impute_z) {
            result.completed.push_back(data);
            continue;
        }
        RandomStream rng(cfg.seed, Stream::Imputation, {chain});
        Dataset work = initialize(data, rng);
        auto x = work.complete_values(cx);
        auto z = work.complete_values(cz);
        std::vector<double> mag(n), sgn(n);

        auto step_x = [&](std::size_t cycle) {
            for (std::size_t i = 0; i < n; ++i) {
                auto d = decompose_x(x[i]);
                mag[i] = d.magnitude;
                sgn[i] = d.sign;
            }
            const std::vector<std::vector<double>> given{z, y};
            auto new_sign = impute_sign(sgn, mask_x, given, rng, cfg.smoothing);
            auto new_mag = pmm_impute(mag, mask_x, given, cfg.donors, rng, cfg.smoothing);
            std::vector<double> imputed;
            imputed.reserve(new_mag.size());
            for (std::size_t i = 0, k = 0; i < n; ++i) {
                if (mask_x[i]) continue;
                x[i] = new_sign[k] * new_mag[k];
                sgn[i] = new_sign[k];
                mag[i] = new_mag[k];
                imputed.push_back(x[i]);
                ++k;
            }
            record(result.trace, chain + 1, cycle, "x", imputed);
        };
        auto step_z = [&](std::size_t cycle) {
            std::vector<double> positive(n);
            for (std::size_t i = 0; i < n; ++i) {
                auto d = decompose_x(x[i]);
                mag[i] = d.magnitude;
                positive[i] = d.sign > 0.0 ? 1.0 : 0.0;
            }
            auto imputed = pmm_impute(z, mask_z, {mag, positive, y}, cfg.donors, rng, cfg.smoothing);
            for (std::size_t i = 0, k = 0; i < n; ++i)
                if (!mask_z[i]) z[i] = imputed[k++];
            record(result.trace, chain + 1, cycle, "z", imputed);
        };

        for (std::size_t cycle = 1; cycle <= cfg.cycles; ++cycle) {
            if (cfg.order == VisitOrder::XThenZ) {
                if (impute_x) step_x(cycle);
                if (impute_z) step_z(cycle);
            } else {
                if (impute_z) step_z(cycle);
                if (impute_x) step_x(cycle);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!mask_x[i]) work.set(cx, i, x[i]);
            if (!mask_z[i]) work.set(cz, i, z[i]);
        }
        result.completed.push_back(std::move(work));
    }
    return result;
}

std::vector<DiagnosticRow> imputation_diagnostics(const CompletedDatasets& result) {
    std::vector<DiagnosticRow> out;
    const Dataset& src = result.source;
    for (const auto& name : result.variables) {
        const std::size_t c = src.column(name);
        const auto observed = src.observed_values(c);
        for (std::size_t d = 0; d < result.completed.size(); ++d) {
            const Dataset& done = result.completed[d];
            std::vector<double> imputed;
            for (std::size_t r = 0; r < src.rows(); ++r)
                if (!src.observed(c, r)) imputed.push_back(*done.at(done.column(name), r));
            const double ks = stats::ks_statistic(observed, imputed);
            for (bool is_observed : {true, false}) {
                const auto& side = is_observed ? observed : imputed;
                DiagnosticRow row{name, d + 1, is_observed ? "observed" : "imputed", side.size(),
                                  stats::mean(side), stats::sd(side), {}, ks};
                if (!side.empty()) {
                    auto q = stats::quantiles(side, kDeciles);
                    std::copy(q.begin(), q.end(), row.deciles.begin());
                }
                out.push_back(std::move(row));
            }
        }
    }
    return out;
}

std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows) {
    std::string out = "variable,dataset_index,side,count,mean,sd";
    for (int k = 1; k <= 9; ++k) out += ",d" + std::to_string(k);
    out += ",ks\n";
    for (const auto& r : rows) {
        out += r.variable + "," + std::to_string(r.dataset_index) + "," + r.side + "," + std::to_string(r.count);
        const bool empty = r.count == 0;
        auto cell = [&](double v) { out += "," + (empty ? std::string("NA") : format_double(v)); };
        cell(r.mean);
        cell(r.sd);
        for (double q : r.deciles) cell(q);
        cell(r.ks);
        out += "\n";
    }
    return out;
}

}  // namespace frontdoor::mi
