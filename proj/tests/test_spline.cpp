#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "frontdoor/error.hpp"
#include "frontdoor/rng.hpp"
#include "frontdoor/scm.hpp"
#include "frontdoor/spline.hpp"

using namespace frontdoor;
using namespace frontdoor::spline;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

std::vector<double> uneven_x(std::size_t n, std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = std::pow(rng.uniform(), 2.0) * 3.0 - 1.0;
    return x;
}

// Closed-form simple regression, the lambda -> infinity limit.
std::pair<double, double> ols_line(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = mean(x), my = mean(y), sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

// E(U | X = x) for U ~ N(0,1), X = X' + U, X' ~ Unif(-2, 2), by Simpson quadrature
// of u * phi(u) over the window |x - u| < 2.
double conditional_u_mean(double x) {
    const int steps = 2000;
    const double a = x - 2.0, b = x + 2.0, h = (b - a) / steps;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= steps; ++i) {
        double u = a + h * i;
        double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        double d = std::exp(-0.5 * u * u);
        num += w * u * d;
        den += w * d;
    }
    return num / den;
}

}  // namespace

TEST_CASE("build_basis places knots at quantiles of distinct values") {
    RandomStream rng(11);
    std::vector<double> x(1000);
    for (auto& v : x) v = rng.uniform();
    auto basis = build_basis(x, 10);
    REQUIRE(basis.knots.size() == 10);
    CHECK(basis.dimension() == 12);
    for (std::size_t j = 1; j + 1 < 10; ++j) CHECK(basis.knots[j] == doctest::Approx(j / 9.0).epsilon(0.05));
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    double range = *hi - *lo;
    CHECK(basis.boundary.first == doctest::Approx(*lo - 0.05 * range));
    CHECK(basis.boundary.second == doctest::Approx(*hi + 0.05 * range));
    CHECK(std::is_sorted(basis.knots.begin(), basis.knots.end()));
    CHECK(std::adjacent_find(basis.knots.begin(), basis.knots.end()) == basis.knots.end());

    std::vector<double> constant(50, 1.5);
    CHECK_THROWS_AS(build_basis(constant, 10), Error);
    try {
        build_basis(constant, 10);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TooFewDistinctValues);
    }
}

TEST_CASE("build_basis with duplicates matches dedup-then-quantile") {
    // 6 distinct values, heavily repeated.
    std::vector<double> x;
    for (int rep = 0; rep < 20; ++rep)
        for (double v : {0.0, 1.0, 2.0, 4.0, 8.0, 16.0}) x.push_back(v);
    for (int rep = 0; rep < 100; ++rep) x.push_back(16.0);
    auto basis = build_basis(x, 6);
    // Six distinct values and six knots: interior knots sit on the distinct values.
    CHECK(basis.knots[1] == 1.0);
    CHECK(basis.knots[2] == 2.0);
    CHECK(basis.knots[3] == 4.0);
    CHECK(basis.knots[4] == 8.0);
    CHECK(basis.knots.front() == doctest::Approx(-0.8));
    CHECK(basis.knots.back() == doctest::Approx(16.8));
}

TEST_CASE("basis is a partition of unity and extrapolates linearly") {
    auto x = uneven_x(300, 3);
    auto basis = build_basis(x, 12);
    std::vector<double> v(4);
    for (double t : linspace(basis.boundary.first, basis.boundary.second, 97)) {
        basis.evaluate(t, v);
        CHECK(std::accumulate(v.begin(), v.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(*std::min_element(v.begin(), v.end()) >= -1e-14);
    }

    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::sin(3.0 * x[i]);
    auto fit = select_lambda(y, x, basis, log_grid(1e-4, 1e4, 9));
    const double b = basis.boundary.second, h = 1e-6;
    double end_slope = (fit.predict(b) - fit.predict(b - h)) / h;
    for (double delta : {0.01, 0.1, 1.0}) {
        CHECK(fit.predict(b + delta) == doctest::Approx(fit.predict(b) + delta * end_slope).epsilon(1e-5));
    }
    const double a = basis.boundary.first;
    double start_slope = (fit.predict(a + h) - fit.predict(a)) / h;
    CHECK(fit.predict(a - 0.5) == doctest::Approx(fit.predict(a) - 0.5 * start_slope).epsilon(1e-5));
}

TEST_CASE("affine data is reproduced for every lambda") {
    auto x = uneven_x(200, 5);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 1.25 - 0.7 * x[i];
    auto basis = build_basis(x, 15);
    for (double lambda : {0.0, 1e-6, 1.0, 1e3, 1e6, 1e12}) {
        auto fit = fit_penalized(y, x, basis, lambda);
        CHECK(max_abs_diff(fit.predict(x), y) < 1e-8);
        CHECK(std::abs(mean(fit.residuals)) < 1e-8);
    }
}

TEST_CASE("huge lambda gives the least-squares line") {
    auto x = uneven_x(400, 9);
    RandomStream rng(10);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::cos(2.0 * x[i]) + 0.2 * rng.normal();
    auto basis = build_basis(x, 20);
    auto fit = fit_penalized(y, x, basis, 1e12);
    auto [a, b] = ols_line(x, y);
    std::vector<double> line(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) line[i] = a + b * x[i];
    CHECK(max_abs_diff(fit.predict(x), line) < 1e-6);
    CHECK(fit.edf == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("zero lambda with a square basis interpolates") {
    const std::size_t n = 30;
    auto x = linspace(0, 1, n);
    RandomStream rng(8);
    for (std::size_t i = 1; i + 1 < n; ++i) x[i] += 0.01 * rng.uniform(-1, 1);
    std::vector<double> y(n);
    for (auto& v : y) v = rng.normal();
    auto basis = build_basis(x, n - 2);
    REQUIRE(basis.dimension() == n);
    auto fit = fit_penalized(y, x, basis, 0.0);
    CHECK(*std::max_element(fit.residuals.begin(), fit.residuals.end(),
                            [](double p, double q) { return std::abs(p) < std::abs(q); }) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(fit.edf == doctest::Approx(static_cast<double>(n)).epsilon(1e-6));
}

TEST_CASE("fit_penalized input checks") {
    auto x = linspace(0, 1, 10);
    auto basis = build_basis(x, 8);
    std::vector<double> y(9, 0.0);
    CHECK_THROWS_AS(fit_penalized(y, x, basis, 1.0), Error);
    auto few = linspace(0, 1, 5);
    CHECK_THROWS_AS(fit_penalized(few, few, basis, 1.0), Error);
}

TEST_CASE("edf falls with lambda and matches the leverage sum") {
    auto x = uneven_x(500, 12);
    RandomStream rng(13);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::sin(4.0 * x[i]) + 0.3 * rng.normal();
    auto basis = build_basis(x, 20);
    double prev = 1e300;
    for (double lambda : log_grid(1e-6, 1e6, 25)) {
        auto fit = fit_penalized(y, x, basis, lambda);
        CHECK(fit.edf <= prev + 1e-9);
        CHECK(fit.edf >= 2.0 - 1e-9);
        CHECK(fit.edf <= static_cast<double>(basis.dimension()) + 1e-9);
        prev = fit.edf;
        if (lambda >= 1e-3 && lambda <= 1e4) {
            auto h = leverages(fit, x);
            CHECK(std::accumulate(h.begin(), h.end(), 0.0) == doctest::Approx(fit.edf).epsilon(1e-6));
        }
    }
}

TEST_CASE("GCV selection recovers a sine") {
    const std::size_t n = 2000;
    RandomStream rng(21);
    std::vector<double> x(n), y(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform();
        truth[i] = std::sin(2.0 * std::numbers::pi * x[i]);
        y[i] = truth[i] + 0.1 * rng.normal();
    }
    auto grid = log_grid(1e-6, 1e6, 25);
    auto fit = select_lambda(y, x, build_basis(x, 20), grid);
    auto pred = fit.predict(x);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) sse += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    CHECK(std::sqrt(sse / n) < 0.03);
    CHECK(std::find(grid.begin(), grid.end(), fit.lambda) != grid.end());
    CHECK(std::isfinite(fit.gcv));
}

TEST_CASE("GCV on pure noise picks a near-constant fit") {
    const std::size_t n = 2000;
    RandomStream rng(22);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform(-3, 3);
        y[i] = rng.normal();
    }
    auto fit = select_lambda(y, x, build_basis(x, 20), log_grid(1e-6, 1e6, 25));
    CHECK(fit.edf < 4.0);
}

TEST_CASE("single-element grid returns that lambda") {
    auto x = uneven_x(100, 1);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * x[i];
    std::vector<double> grid{3.5};
    auto fit = select_lambda(y, x, build_basis(x, 10), grid);
    CHECK(fit.lambda == 3.5);
    std::vector<double> empty;
    CHECK_THROWS_AS(select_lambda(y, x, build_basis(x, 10), empty), Error);
}

TEST_CASE("additive model reproduces additive linear truth") {
    const std::size_t n = 400;
    auto x1 = linspace(-1, 1, n);
    auto x2 = linspace(-2, 2, n);
    std::reverse(x2.begin(), x2.begin() + n / 2);  // break collinearity, keep mean 0
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = 2.0 + x1[i] + x2[i];
    auto fit = fit_additive(y, {x1, x2});
    CHECK(fit.converged);
    CHECK(fit.intercept == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(max_abs_diff(fit.predict({x1, x2}), y) < 1e-6);
    for (std::size_t j = 0; j < 2; ++j) {
        const auto& xs = j == 0 ? x1 : x2;
        double sum = 0.0;
        for (double v : xs) sum += fit.terms[j].evaluate(v);
        CHECK(std::abs(sum) < 1e-6);
        // linear in its covariate
        CHECK(fit.terms[j].evaluate(0.5) - fit.terms[j].evaluate(0.0) == doctest::Approx(0.5).epsilon(1e-6));
    }
}

TEST_CASE("single-covariate additive fit equals select_lambda") {
    auto x = uneven_x(600, 30);
    RandomStream rng(31);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::exp(x[i]) + 0.2 * rng.normal();
    SmoothingConfig cfg;
    auto additive = fit_additive(y, {x}, cfg);
    auto single = select_lambda(y, x, build_basis(x, cfg.n_knots), cfg.lambda_grid);
    CHECK(additive.terms[0].spline.lambda == single.lambda);
    CHECK(max_abs_diff(additive.predict({x}), single.predict(x)) < 1e-8);
    CHECK(additive.terms[0].spline.edf + 1.0 == doctest::Approx(single.edf).epsilon(1e-6));
}

TEST_CASE("binary covariate enters linearly") {
    const std::size_t n = 300;
    RandomStream rng(40);
    std::vector<double> s(n), x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = rng.bernoulli(0.4) ? 1.0 : 0.0;
        x[i] = rng.uniform(-1, 1);
        y[i] = 0.5 + 1.5 * s[i] + x[i] * x[i];
    }
    auto fit = fit_additive(y, {s, x});
    CHECK(fit.terms[0].kind == AdditiveTerm::Kind::Linear);
    CHECK(fit.terms[0].slope == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(max_abs_diff(fit.predict({s, x}), y) < 1e-3);
}

TEST_CASE("backfitting stops at a fixed point") {
    const std::size_t n = 3000;
    RandomStream rng(50);
    std::vector<double> a(n), b(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.uniform(-2, 2);
        b[i] = 0.6 * a[i] + 0.8 * rng.normal();
        y[i] = std::sin(a[i]) + 0.3 * b[i] * b[i] + 0.2 * rng.normal();
    }
    SmoothingConfig cfg;
    auto fit = fit_additive(y, {a, b}, cfg);
    REQUIRE(fit.converged);
    SmoothingConfig more = cfg;
    more.max_cycles = fit.cycles + 1;
    more.tolerance = 0.0;
    auto again = fit_additive(y, {a, b}, more);
    CHECK(max_abs_diff(fit.predict({a, b}), again.predict({a, b})) < 1e-6);
    CHECK(std::abs(mean(fit.residuals)) < 1e-8);
}

TEST_CASE("additive outcome model recovers the SCM decomposition") {
    // E(Y | x, z) = phi(z - 0.5) + 0.3 z - 0.1 E(U | x) under the default model.
    scm::ScmConfig cfg;
    auto rows = scm::generate_population(cfg, 20000, 77);
    std::vector<double> x, z, y;
    for (const auto& r : rows) {
        x.push_back(r.x);
        z.push_back(r.z);
        y.push_back(r.y);
    }
    auto fit = fit_additive(y, {x, z});
    const std::size_t n = x.size();
    std::vector<double> fx(n), fz(n), tx(n), tz(n);
    for (std::size_t i = 0; i < n; ++i) {
        fx[i] = fit.terms[0].evaluate(x[i]);
        fz[i] = fit.terms[1].evaluate(z[i]);
        tx[i] = -0.1 * conditional_u_mean(x[i]);
        tz[i] = scm::std_normal_pdf(z[i] - 0.5) + 0.3 * z[i];
    }
    auto rmse_centered = [&](const std::vector<double>& f, const std::vector<double>& t) {
        double mf = mean(f), mt = mean(t), s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::pow((f[i] - mf) - (t[i] - mt), 2);
        return std::sqrt(s / static_cast<double>(n));
    };
    CHECK(rmse_centered(fx, tx) < 0.02);
    CHECK(rmse_centered(fz, tz) < 0.02);
}

TEST_CASE("mediator smooth extrapolates toward 4 phi(3)") {
    scm::ScmConfig cfg;
    auto rows = scm::generate_population(cfg, 20000, 78);
    std::vector<double> x, z;
    for (const auto& r : rows) {
        x.push_back(r.x);
        z.push_back(r.z);
    }
    auto fit = select_lambda(z, x, build_basis(x, 20), log_grid(1e-6, 1e6, 25));
    CHECK(std::abs(fit.predict(3.0) - 4.0 * scm::std_normal_pdf(3.0)) < 0.05);
    CHECK(std::abs(fit.predict(0.0) - 4.0 * scm::std_normal_pdf(0.0)) < 0.01);
    CHECK(std::abs(mean(fit.residuals)) < 1e-8);
}

TEST_CASE("fit serialization lists knots and coefficients") {
    auto x = linspace(0, 1, 50);
    std::vector<double> y(x.size(), 1.0);
    auto fit = fit_penalized(y, x, build_basis(x, 6), 1.0);
    auto text = format_fit(fit, "mediator");
    CHECK(text.find("mediator.knots = ") != std::string::npos);
    CHECK(text.find("mediator.coefficients = ") != std::string::npos);
    CHECK(text.find("mediator.lambda = 1\n") != std::string::npos);
}
