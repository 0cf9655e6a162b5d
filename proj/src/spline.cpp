#include "frontdoor/spline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "frontdoor/dataset.hpp"
#include "frontdoor/error.hpp"

namespace frontdoor::spline {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr int kMaxDegree = 7;

// Clamped knot vector: breakpoints with each end repeated `degree` extra times.
struct KnotView {
    const std::vector<double>& knots;
    std::size_t degree;

    double operator[](std::size_t i) const {
        if (i <= degree) return knots.front();
        return knots[std::min(i - degree, knots.size() - 1)];
    }
};

// Nonzero B-splines of degree p on knot span s at x (Cox-de Boor, triangular scheme).
void basis_funs(const KnotView& u, std::size_t s, double x, int p, double* out) {
    double left[kMaxDegree + 1], right[kMaxDegree + 1];
    out[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - u[s + 1 - static_cast<std::size_t>(j)];
        right[j] = u[s + static_cast<std::size_t>(j)] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            double denom = right[r + 1] + left[j - r];
            double temp = denom != 0.0 ? out[r] / denom : 0.0;
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
}

// Span index s with u[s] <= x < u[s + 1], restricted to nondegenerate spans.
std::size_t find_span(const std::vector<double>& knots, std::size_t p, double x) {
    const std::size_t last_interval = knots.size() - 2;
    if (x >= knots.back()) return last_interval + p;
    if (x <= knots.front()) return p;
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    auto j = static_cast<std::size_t>(it - knots.begin()) - 1;
    return std::min(j, last_interval) + p;
}

// Sparse design matrix: degree + 1 values per row starting at start[i].
struct Design {
    std::size_t width = 0;
    std::size_t dim = 0;
    std::vector<std::size_t> start;
    std::vector<double> values;

    Design(const SplineBasis& basis, std::span<const double> x)
        : width(static_cast<std::size_t>(basis.degree) + 1), dim(basis.dimension()), start(x.size()),
          values(x.size() * width) {
        for (std::size_t i = 0; i < x.size(); ++i)
            start[i] = basis.evaluate(x[i], std::span<double>(values.data() + i * width, width));
    }

    const double* row(std::size_t i) const { return values.data() + i * width; }

    MatrixXd gram() const {
        MatrixXd g = MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < start.size(); ++i) {
            const double* v = row(i);
            for (std::size_t a = 0; a < width; ++a)
                for (std::size_t b = 0; b < width; ++b)
                    g(static_cast<Eigen::Index>(start[i] + a), static_cast<Eigen::Index>(start[i] + b)) += v[a] * v[b];
        }
        return g;
    }

    VectorXd cross(std::span<const double> y) const {
        VectorXd out = VectorXd::Zero(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < start.size(); ++i) {
            const double* v = row(i);
            for (std::size_t a = 0; a < width; ++a) out(static_cast<Eigen::Index>(start[i] + a)) += v[a] * y[i];
        }
        return out;
    }

    std::vector<double> apply(const VectorXd& beta) const {
        std::vector<double> out(start.size());
        for (std::size_t i = 0; i < start.size(); ++i) {
            const double* v = row(i);
            double s = 0.0;
            for (std::size_t a = 0; a < width; ++a) s += v[a] * beta(static_cast<Eigen::Index>(start[i] + a));
            out[i] = s;
        }
        return out;
    }
};

MatrixXd to_matrix(const std::vector<double>& flat, std::size_t dim) {
    MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[r * dim + c];
    return m;
}

// Cholesky factor of an SPD matrix, retrying once with a 1e-10 * trace ridge.
Eigen::LLT<MatrixXd> factorize(const MatrixXd& a, bool& ridge_applied) {
    Eigen::LLT<MatrixXd> llt(a);
    ridge_applied = false;
    if (llt.info() == Eigen::Success) return llt;
    ridge_applied = true;
    MatrixXd ridged = a;
    ridged.diagonal().array() += 1e-10 * a.trace();
    llt.compute(ridged);
    if (llt.info() != Eigen::Success) throw Error(Errc::SingularSystem, "penalized normal equations are singular");
    return llt;
}

// Second divided differences of the coefficients over the Greville abscissae,
// scaled by the squared mean spacing. P = D'D.
MatrixXd difference_operator(const SplineBasis& basis) {
    const std::size_t k = basis.dimension();
    auto g = basis.greville();
    const double mean_spacing = (g.back() - g.front()) / static_cast<double>(k - 1);
    const double scale = mean_spacing * mean_spacing;
    MatrixXd d = MatrixXd::Zero(static_cast<Eigen::Index>(k - 2), static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r + 2 < k; ++r) {
        const double h1 = g[r + 1] - g[r];
        const double h2 = g[r + 2] - g[r + 1];
        const auto ri = static_cast<Eigen::Index>(r);
        d(ri, ri) = scale / h1;
        d(ri, ri + 1) = -scale / h1 - scale / h2;
        d(ri, ri + 2) = scale / h2;
    }
    return d;
}

// One penalized smoother in split form. Coefficients are written
// beta = N a + M b, where N = [1, greville] spans the affine functions (D N = 0)
// and M = D'(DD')^-1, so D beta = b and the penalty is exactly |b|^2. After
// profiling out the unpenalized a, the remaining problem is a ridge regression
// in b whose Gram matrix (the Schur complement S) is diagonalized once:
// S = V diag(e) V'. For any lambda the fit, the influence trace
// 2 + sum e/(e + lambda) and the residual sum of squares then cost O(k^2).
class Smoother {
public:
    Smoother(const SplineBasis& basis, std::span<const double> x) : basis_(basis), design_(basis, x) {
        const auto k = static_cast<Eigen::Index>(basis.dimension());
        const MatrixXd g = design_.gram();
        auto greville = basis.greville();

        null_ = MatrixXd(k, 2);
        for (Eigen::Index i = 0; i < k; ++i) {
            null_(i, 0) = 1.0;
            null_(i, 1) = greville[static_cast<std::size_t>(i)];
        }
        const MatrixXd d = difference_operator(basis);
        range_ = d.transpose() * (d * d.transpose()).llt().solve(MatrixXd::Identity(k - 2, k - 2));

        const MatrixXd gnn = null_.transpose() * g * null_;
        null_llt_ = factorize(gnn, ridge_applied_);
        gn_range_ = null_.transpose() * g * range_;
        MatrixXd schur = range_.transpose() * g * range_ - gn_range_.transpose() * null_llt_.solve(gn_range_);
        schur = 0.5 * (schur + schur.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(schur);
        eigenvalues_ = eig.eigenvalues().cwiseMax(0.0);
        eigenvectors_ = eig.eigenvectors();
        ridge_floor_ = 1e-10 * eigenvalues_.sum();
    }

    struct Score {
        double lambda;
        double edf;
        double rss;
        double gcv;
    };

    // Sufficient statistics of one response vector.
    struct Projection {
        VectorXd null_cross;  // N'B'y
        VectorXd w;           // V' (M'B'y - M'GN (N'GN)^-1 N'B'y)
        double perp_ss;       // |y - H_null y|^2
    };

    std::size_t n() const { return design_.start.size(); }
    const Design& design() const { return design_; }
    bool ridge_applied() const { return ridge_applied_; }
    const SplineBasis& basis() const { return basis_; }
    const MatrixXd& null_basis() const { return null_; }
    const MatrixXd& range_basis() const { return range_; }

    Projection project(std::span<const double> y) const {
        Projection pr;
        const VectorXd by = design_.cross(y);
        pr.null_cross = null_.transpose() * by;
        const VectorXd a0 = null_llt_.solve(pr.null_cross);
        pr.w = eigenvectors_.transpose() * (range_.transpose() * by - gn_range_.transpose() * a0);
        const double yy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
        pr.perp_ss = yy - pr.null_cross.dot(a0);
        return pr;
    }

    // A zero lambda on a rank-deficient range block falls back to the ridge floor.
    double effective_lambda(double lambda) const {
        if (lambda > 0.0) return lambda;
        const double e_max = eigenvalues_.maxCoeff();
        return eigenvalues_.minCoeff() <= 1e-13 * e_max ? ridge_floor_ : 0.0;
    }

    Score score(const Projection& pr, double lambda) const {
        const double lam = effective_lambda(lambda);
        double edf = 2.0, fit_dot = 0.0, fit_sq = 0.0;
        for (Eigen::Index i = 0; i < pr.w.size(); ++i) {
            const double e = eigenvalues_(i);
            const double denom = e + lam;
            if (denom <= 0.0) continue;
            const double w2 = pr.w(i) * pr.w(i);
            edf += e / denom;
            fit_dot += w2 / denom;
            fit_sq += e * w2 / (denom * denom);
        }
        const double rss = std::max(pr.perp_ss - 2.0 * fit_dot + fit_sq, 0.0);
        const double nn = static_cast<double>(n());
        const double gcv = nn > edf ? nn * rss / ((nn - edf) * (nn - edf)) : std::numeric_limits<double>::infinity();
        return {lambda, edf, rss, gcv};
    }

    Score select(const Projection& pr, std::span<const double> grid) const {
        if (grid.empty()) throw Error(Errc::InvalidCount, "lambda grid is empty");
        Score best = score(pr, grid[0]);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            Score s = score(pr, grid[i]);
            if (s.gcv < best.gcv || (s.gcv == best.gcv && s.lambda > best.lambda)) best = s;
        }
        return best;
    }

    VectorXd coefficients(const Projection& pr, double lambda) const {
        const double lam = effective_lambda(lambda);
        VectorXd scaled(pr.w.size());
        for (Eigen::Index i = 0; i < pr.w.size(); ++i) {
            const double denom = eigenvalues_(i) + lam;
            scaled(i) = denom > 0.0 ? pr.w(i) / denom : 0.0;
        }
        const VectorXd b = eigenvectors_ * scaled;
        const VectorXd a = null_llt_.solve(pr.null_cross - gn_range_ * b);
        return null_ * a + range_ * b;
    }

    PenalizedSplineFit make_fit(std::span<const double> y, const Projection& pr, const Score& s) const {
        PenalizedSplineFit fit;
        fit.basis = basis_;
        VectorXd beta = coefficients(pr, s.lambda);
        fit.coefficients.assign(beta.data(), beta.data() + beta.size());
        fit.lambda = s.lambda;
        fit.edf = s.edf;
        fit.ridge_applied = ridge_applied_ || effective_lambda(s.lambda) != s.lambda;
        auto fitted = design_.apply(beta);
        fit.residuals.resize(y.size());
        double rss = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            fit.residuals[i] = y[i] - fitted[i];
            rss += fit.residuals[i] * fit.residuals[i];
        }
        const double nn = static_cast<double>(n());
        fit.gcv = nn > s.edf ? nn * rss / ((nn - s.edf) * (nn - s.edf)) : std::numeric_limits<double>::infinity();
        return fit;
    }

private:
    SplineBasis basis_;
    Design design_;
    bool ridge_applied_ = false;
    MatrixXd null_;
    MatrixXd range_;
    MatrixXd gn_range_;
    Eigen::LLT<MatrixXd> null_llt_;
    VectorXd eigenvalues_;
    MatrixXd eigenvectors_;
    double ridge_floor_ = 0.0;
};

void check_sizes(std::span<const double> y, std::span<const double> x, const SplineBasis& basis) {
    if (y.size() != x.size()) throw Error(Errc::SizeMismatch, "x and y lengths differ");
    if (y.size() < basis.dimension())
        throw Error(Errc::SizeMismatch, "need at least " + std::to_string(basis.dimension()) + " points, got " +
                                            std::to_string(y.size()));
}

std::size_t distinct_count(std::span<const double> x) {
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

}  // namespace

std::size_t SplineBasis::evaluate(double x, std::span<double> values) const {
    const int p = degree;
    const KnotView u{knots, static_cast<std::size_t>(p)};
    const double lo = boundary.first, hi = boundary.second;
    const double at = std::clamp(x, lo, hi);
    const std::size_t s = find_span(knots, static_cast<std::size_t>(p), at);
    basis_funs(u, s, at, p, values.data());

    if (x < lo || x > hi) {
        // Linear continuation: B(at) + (x - at) B'(at).
        double lower[kMaxDegree + 1] = {};
        basis_funs(u, s, at, p - 1, lower);
        const double dx = x - at;
        for (int k = 0; k <= p; ++k) {
            const std::size_t j = s - static_cast<std::size_t>(p) + static_cast<std::size_t>(k);
            double d = 0.0;
            if (k >= 1) {
                double denom = u[j + static_cast<std::size_t>(p)] - u[j];
                if (denom > 0.0) d += p * lower[k - 1] / denom;
            }
            if (k <= p - 1) {
                double denom = u[j + static_cast<std::size_t>(p) + 1] - u[j + 1];
                if (denom > 0.0) d -= p * lower[k] / denom;
            }
            values[static_cast<std::size_t>(k)] += dx * d;
        }
    }
    return s - static_cast<std::size_t>(p);
}

std::vector<double> SplineBasis::greville() const {
    const KnotView u{knots, static_cast<std::size_t>(degree)};
    std::vector<double> g(dimension());
    for (std::size_t j = 0; j < g.size(); ++j) {
        double s = 0.0;
        for (int k = 1; k <= degree; ++k) s += u[j + static_cast<std::size_t>(k)];
        g[j] = s / degree;
    }
    return g;
}

SplineBasis build_basis(std::span<const double> x, std::size_t n_knots) {
    if (n_knots < 4) throw Error(Errc::InvalidCount, "need at least 4 knots");
    std::vector<double> d(x.begin(), x.end());
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    if (d.size() < n_knots)
        throw Error(Errc::TooFewDistinctValues, "need " + std::to_string(n_knots) + " distinct values, got " +
                                                    std::to_string(d.size()));

    SplineBasis basis;
    const double range = d.back() - d.front();
    basis.boundary = {d.front() - 0.05 * range, d.back() + 0.05 * range};
    basis.knots.resize(n_knots);
    for (std::size_t j = 0; j < n_knots; ++j) {
        double pos = static_cast<double>(j) * static_cast<double>(d.size() - 1) / static_cast<double>(n_knots - 1);
        auto lo = static_cast<std::size_t>(std::floor(pos));
        auto hi = std::min(lo + 1, d.size() - 1);
        double frac = pos - static_cast<double>(lo);
        basis.knots[j] = d[lo] + frac * (d[hi] - d[lo]);
    }
    basis.knots.front() = basis.boundary.first;
    basis.knots.back() = basis.boundary.second;
    return basis;
}

std::vector<double> penalty_matrix(const SplineBasis& basis) {
    const MatrixXd d = difference_operator(basis);
    const MatrixXd p = d.transpose() * d;
    const std::size_t k = basis.dimension();
    std::vector<double> out(k * k);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) out[r * k + c] = p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return out;
}

double PenalizedSplineFit::predict(double x) const {
    double v[kMaxDegree + 1];
    const std::size_t width = static_cast<std::size_t>(basis.degree) + 1;
    std::size_t start = basis.evaluate(x, std::span<double>(v, width));
    double s = 0.0;
    for (std::size_t a = 0; a < width; ++a) s += v[a] * coefficients[start + a];
    return s;
}

std::vector<double> PenalizedSplineFit::predict(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = predict(x[i]);
    return out;
}

PenalizedSplineFit fit_penalized(std::span<const double> y, std::span<const double> x, const SplineBasis& basis,
                                 double lambda) {
    check_sizes(y, x, basis);
    if (!(lambda >= 0.0)) throw Error(Errc::InvalidConfig, "lambda must be nonnegative");
    Smoother sm(basis, x);
    auto pr = sm.project(y);
    return sm.make_fit(y, pr, sm.score(pr, lambda));
}

PenalizedSplineFit select_lambda(std::span<const double> y, std::span<const double> x, const SplineBasis& basis,
                                 std::span<const double> grid) {
    check_sizes(y, x, basis);
    Smoother sm(basis, x);
    auto pr = sm.project(y);
    return sm.make_fit(y, pr, sm.select(pr, grid));
}

std::vector<double> leverages(const PenalizedSplineFit& fit, std::span<const double> x) {
    // Direct route: h_ii = b_i' (G + lambda P)^-1 b_i, independent of the eigen form.
    Design design(fit.basis, x);
    const auto k = static_cast<Eigen::Index>(fit.basis.dimension());
    MatrixXd a = design.gram() + fit.lambda * to_matrix(penalty_matrix(fit.basis), fit.basis.dimension());
    bool ridge = false;
    auto llt = factorize(a, ridge);
    MatrixXd a_inv = llt.solve(MatrixXd::Identity(k, k));
    std::vector<double> h(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double* v = design.row(i);
        double s = 0.0;
        for (std::size_t p = 0; p < design.width; ++p)
            for (std::size_t q = 0; q < design.width; ++q)
                s += v[p] * v[q] *
                     a_inv(static_cast<Eigen::Index>(design.start[i] + p), static_cast<Eigen::Index>(design.start[i] + q));
        h[i] = s;
    }
    return h;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = lo;
        return g;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    return g;
}

double AdditiveTerm::evaluate(double x) const {
    if (kind == Kind::Linear) return slope * x - center;
    return spline.predict(x) - center;
}

std::vector<double> AdditiveFit::predict(const std::vector<std::vector<double>>& covariates) const {
    if (covariates.size() != terms.size()) throw Error(Errc::SizeMismatch, "covariate count differs from term count");
    const std::size_t n = covariates.empty() ? 0 : covariates[0].size();
    std::vector<double> out(n, intercept);
    for (std::size_t j = 0; j < terms.size(); ++j) {
        if (covariates[j].size() != n) throw Error(Errc::SizeMismatch, "covariate lengths differ");
        for (std::size_t i = 0; i < n; ++i) out[i] += terms[j].evaluate(covariates[j][i]);
    }
    return out;
}

double AdditiveFit::predict_point(std::span<const double> point) const {
    if (point.size() != terms.size()) throw Error(Errc::SizeMismatch, "point dimension differs from term count");
    double s = intercept;
    for (std::size_t j = 0; j < terms.size(); ++j) s += terms[j].evaluate(point[j]);
    return s;
}

namespace {

// Column block of the joint additive design. A spline term contributes its
// slope column B g and its penalized range columns B M (see Smoother); its
// constant part is carried by the shared intercept.
struct TermBlock {
    bool spline = true;
    std::size_t raw_offset = 0;  // position among [1, B_1 | x_1, ...]
    std::size_t raw_dim = 0;
    std::size_t offset = 0;      // position among the joint parameters
    std::size_t dim = 0;
    std::unique_ptr<Smoother> smoother;
    double mean = 0.0;  // linear terms: covariate mean
    double lambda = 0.0;
    double gcv = 0.0;
};

}  // namespace

AdditiveFit fit_additive(std::span<const double> y, const std::vector<std::vector<double>>& covariates,
                         const SmoothingConfig& config) {
    if (covariates.empty()) throw Error(Errc::SizeMismatch, "additive model needs at least one covariate");
    const std::size_t n = y.size();
    for (const auto& c : covariates)
        if (c.size() != n) throw Error(Errc::SizeMismatch, "covariate and response lengths differ");

    const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

    std::vector<TermBlock> blocks(covariates.size());
    std::size_t raw_dim = 1, dim = 1;
    for (std::size_t j = 0; j < covariates.size(); ++j) {
        auto& b = blocks[j];
        std::size_t distinct = distinct_count(covariates[j]);
        b.raw_offset = raw_dim;
        b.offset = dim;
        // The basis needs at least four breakpoints and no more functions than points.
        const std::size_t knots = std::min({config.n_knots, distinct, n >= 2 ? n - 2 : 0});
        if (knots < 4) {
            b.spline = false;
            b.raw_dim = b.dim = 1;
            b.mean = std::accumulate(covariates[j].begin(), covariates[j].end(), 0.0) / static_cast<double>(n);
        } else {
            auto basis = build_basis(covariates[j], knots);
            b.smoother = std::make_unique<Smoother>(basis, covariates[j]);
            b.raw_dim = basis.dimension();
            b.dim = b.raw_dim - 1;
        }
        raw_dim += b.raw_dim;
        dim += b.dim;
    }

    // Unconstrained Gram and cross-product over [1, B_1 | x_1 - mean, ...].
    const auto rd = static_cast<Eigen::Index>(raw_dim);
    MatrixXd raw_gram = MatrixXd::Zero(rd, rd);
    VectorXd raw_cross = VectorXd::Zero(rd);
    std::vector<std::size_t> idx;
    std::vector<double> val;
    for (std::size_t i = 0; i < n; ++i) {
        idx.assign(1, 0);
        val.assign(1, 1.0);
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            const auto& b = blocks[j];
            if (b.spline) {
                const auto& d = b.smoother->design();
                for (std::size_t a = 0; a < d.width; ++a) {
                    idx.push_back(b.raw_offset + d.start[i] + a);
                    val.push_back(d.row(i)[a]);
                }
            } else {
                idx.push_back(b.raw_offset);
                val.push_back(covariates[j][i] - b.mean);
            }
        }
        for (std::size_t a = 0; a < idx.size(); ++a) {
            raw_cross(static_cast<Eigen::Index>(idx[a])) += val[a] * y[i];
            for (std::size_t c = 0; c < idx.size(); ++c)
                raw_gram(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[c])) += val[a] * val[c];
        }
    }

    const auto dd = static_cast<Eigen::Index>(dim);
    MatrixXd transform = MatrixXd::Zero(rd, dd);
    transform(0, 0) = 1.0;
    for (const auto& b : blocks) {
        auto ro = static_cast<Eigen::Index>(b.raw_offset), co = static_cast<Eigen::Index>(b.offset);
        if (b.spline) {
            const auto rdim = static_cast<Eigen::Index>(b.raw_dim);
            transform.block(ro, co, rdim, 1) = b.smoother->null_basis().col(1);
            transform.block(ro, co + 1, rdim, rdim - 2) = b.smoother->range_basis();
        } else {
            transform(ro, co) = 1.0;
        }
    }
    const MatrixXd gram = transform.transpose() * raw_gram * transform;
    const VectorXd cross = transform.transpose() * raw_cross;

    // Centered fitted components at the training points, one vector per term.
    std::vector<double> centers(blocks.size(), 0.0);
    auto components_of = [&](const VectorXd& theta) {
        VectorXd raw = transform * theta;
        std::vector<std::vector<double>> f(blocks.size());
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            const auto& b = blocks[j];
            if (b.spline) {
                f[j] = b.smoother->design().apply(
                    raw.segment(static_cast<Eigen::Index>(b.raw_offset), static_cast<Eigen::Index>(b.raw_dim)));
                centers[j] = std::accumulate(f[j].begin(), f[j].end(), 0.0) / static_cast<double>(n);
                for (double& v : f[j]) v -= centers[j];
            } else {
                f[j].resize(n);
                double slope = raw(static_cast<Eigen::Index>(b.raw_offset));
                for (std::size_t i = 0; i < n; ++i) f[j][i] = slope * (covariates[j][i] - b.mean);
            }
        }
        return f;
    };

    std::vector<std::vector<double>> comps(blocks.size(), std::vector<double>(n, 0.0));
    VectorXd theta = VectorXd::Zero(dd);
    MatrixXd system;
    bool ridge = false;
    AdditiveFit out;
    std::vector<double> partial(n);

    for (std::size_t cycle = 1; cycle <= config.max_cycles; ++cycle) {
        // Re-select each smooth's lambda on its partial residuals.
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            auto& b = blocks[j];
            if (!b.spline) continue;
            for (std::size_t i = 0; i < n; ++i) {
                double s = y[i] - y_mean;
                for (std::size_t k = 0; k < blocks.size(); ++k)
                    if (k != j) s -= comps[k][i];
                partial[i] = s;
            }
            auto pr = b.smoother->project(partial);
            auto score = b.smoother->select(pr, config.lambda_grid);
            b.lambda = score.lambda;
            b.gcv = score.gcv;
        }

        // Backfitting fixed point for these lambdas.
        system = gram;
        for (const auto& b : blocks) {
            if (!b.spline) continue;
            auto o = static_cast<Eigen::Index>(b.offset) + 1, k = static_cast<Eigen::Index>(b.dim) - 1;
            system.diagonal().segment(o, k).array() += b.lambda;
        }
        auto llt = factorize(system, ridge);
        theta = llt.solve(cross);
        auto next = components_of(theta);

        double change = 0.0;
        for (std::size_t j = 0; j < blocks.size(); ++j)
            for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[j][i] - comps[j][i]));
        comps = std::move(next);
        out.cycles = cycle;
        if (change < config.tolerance) {
            out.converged = true;
            break;
        }
    }

    // Per-term effective degrees of freedom from the joint influence matrix.
    MatrixXd influence = factorize(system, ridge).solve(gram);

    out.intercept = theta(0) + std::accumulate(centers.begin(), centers.end(), 0.0);
    out.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double f = out.intercept;
        for (const auto& c : comps) f += c[i];
        out.residuals[i] = y[i] - f;
    }

    VectorXd raw = transform * theta;
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        const auto& b = blocks[j];
        AdditiveTerm term;
        auto o = static_cast<Eigen::Index>(b.offset), k = static_cast<Eigen::Index>(b.dim);
        double edf = influence.diagonal().segment(o, k).sum();
        if (b.spline) {
            term.kind = AdditiveTerm::Kind::Spline;
            VectorXd beta = raw.segment(static_cast<Eigen::Index>(b.raw_offset), static_cast<Eigen::Index>(b.raw_dim));
            term.spline.basis = b.smoother->basis();
            term.spline.coefficients.assign(beta.data(), beta.data() + beta.size());
            term.spline.lambda = b.lambda;
            term.spline.edf = edf;
            term.spline.gcv = b.gcv;
            term.spline.residuals = out.residuals;
            term.spline.ridge_applied = ridge || b.smoother->ridge_applied();
            term.center = centers[j];
        } else {
            term.kind = AdditiveTerm::Kind::Linear;
            term.slope = raw(static_cast<Eigen::Index>(b.raw_offset));
            term.center = term.slope * b.mean;
        }
        out.terms.push_back(std::move(term));
    }
    return out;
}

std::string format_fit(const PenalizedSplineFit& fit, const std::string& prefix) {
    auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ' ';
            s += format_double(v[i]);
        }
        return s;
    };
    std::string out;
    out += prefix + ".degree = " + std::to_string(fit.basis.degree) + "\n";
    out += prefix + ".boundary = " + format_double(fit.basis.boundary.first) + " " +
           format_double(fit.basis.boundary.second) + "\n";
    out += prefix + ".knots = " + list(fit.basis.knots) + "\n";
    out += prefix + ".coefficients = " + list(fit.coefficients) + "\n";
    out += prefix + ".lambda = " + format_double(fit.lambda) + "\n";
    out += prefix + ".edf = " + format_double(fit.edf) + "\n";
    out += prefix + ".gcv = " + format_double(fit.gcv) + "\n";
    out += prefix + ".residuals = " + list(fit.residuals) + "\n";
    return out;
}

std::string format_fit(const AdditiveFit& fit, const std::string& prefix) {
    std::string out;
    out += prefix + ".intercept = " + format_double(fit.intercept) + "\n";
    out += prefix + ".terms = " + std::to_string(fit.terms.size()) + "\n";
    out += prefix + ".converged = " + std::string(fit.converged ? "true" : "false") + "\n";
    for (std::size_t j = 0; j < fit.terms.size(); ++j) {
        const auto& t = fit.terms[j];
        std::string p = prefix + ".term" + std::to_string(j + 1);
        if (t.kind == AdditiveTerm::Kind::Linear) {
            out += p + ".kind = linear\n";
            out += p + ".slope = " + format_double(t.slope) + "\n";
            out += p + ".center = " + format_double(t.center) + "\n";
        } else {
            out += p + ".kind = spline\n";
            PenalizedSplineFit copy = t.spline;
            copy.residuals.clear();
            out += format_fit(copy, p);
        }
    }
    return out;
}

}  // namespace frontdoor::spline
