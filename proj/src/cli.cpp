#include "frontdoor/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "frontdoor/causal_graph.hpp"
#include "frontdoor/dataset.hpp"
#include "frontdoor/estimator.hpp"
#include "frontdoor/mice.hpp"
#include "frontdoor/rng.hpp"
#include "frontdoor/spline.hpp"
#include "frontdoor/stats.hpp"
#include "frontdoor/svg.hpp"

namespace frontdoor::cli {

namespace fs = std::filesystem;

namespace {

// Grid points inside this interval make up the region where the estimate
// should be unbiased; points outside are extrapolation.
constexpr double kCoreLo = -2.0, kCoreHi = 2.0;

std::string fixed(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string percent(double v) { return fixed(100.0 * v, 2) + "%"; }

std::size_t to_count(long long v, const std::string& key) {
    if (v < 0) throw Error(Errc::InvalidConfig, key + " must be nonnegative");
    return static_cast<std::size_t>(v);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw Error(Errc::Io, "cannot create output directory " + dir);
}

void save_config(const RunConfig& cfg) {
    ensure_dir(cfg.output_dir);
    write_text(Layout{cfg.output_dir}.config(), cfg.to_keyvalues().format());
}

std::vector<Dataset> read_imputed(const Layout& layout, std::size_t m) {
    std::vector<Dataset> out;
    for (std::size_t k = 1; k <= m; ++k) out.push_back(read_csv(layout.imputed(k)));
    return out;
}

estimate::EffectTable read_effect(const std::string& path) {
    return estimate::effect_from_csv(read_text(path));
}

struct ErrorSummary {
    std::size_t points = 0;
    double max_abs = 0.0;
    double mean_abs = 0.0;
    double mean_signed = 0.0;
};

ErrorSummary core_errors(const estimate::EffectEstimate& est, const scm::ScmConfig& scm) {
    ErrorSummary s;
    for (std::size_t g = 0; g < est.grid.size(); ++g) {
        const double x = est.grid[g];
        if (x < kCoreLo - 1e-9 || x > kCoreHi + 1e-9) continue;
        const double e = est.pooled_ace[g] - scm::oracle_ace(scm, x);
        s.max_abs = std::max(s.max_abs, std::abs(e));
        s.mean_abs += std::abs(e);
        s.mean_signed += e;
        ++s.points;
    }
    if (s.points) {
        s.mean_abs /= static_cast<double>(s.points);
        s.mean_signed /= static_cast<double>(s.points);
    }
    return s;
}

// Up to k distinct indices from [0, n), in increasing order.
std::vector<std::size_t> subsample(std::size_t n, std::size_t k, RandomStream& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.index(n - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

svg::Layer line(std::vector<double> x, std::vector<double> y, std::string color, std::string label,
                bool dashed = false) {
    svg::Layer l;
    l.kind = svg::Layer::Kind::Line;
    l.x = std::move(x);
    l.y = std::move(y);
    l.color = std::move(color);
    l.label = std::move(label);
    l.dashed = dashed;
    return l;
}

svg::Layer points(std::vector<double> x, std::vector<double> y, std::string color, std::string label = {}) {
    svg::Layer l;
    l.kind = svg::Layer::Kind::Points;
    l.x = std::move(x);
    l.y = std::move(y);
    l.color = std::move(color);
    l.label = std::move(label);
    return l;
}

svg::Layer band(std::vector<double> x, std::vector<double> lo, std::vector<double> hi, std::string color,
                std::string label) {
    svg::Layer l;
    l.kind = svg::Layer::Kind::Band;
    l.x = std::move(x);
    l.y = std::move(lo);
    l.y_upper = std::move(hi);
    l.color = std::move(color);
    l.label = std::move(label);
    return l;
}

constexpr const char* kTruthColor = "#222222";
constexpr const char* kMiColor = "#1f6fb4";
constexpr const char* kCcColor = "#d4582a";
constexpr const char* kDataColor = "#7a7a7a";

}  // namespace

GridSpec GridSpec::parse(const std::string& text) {
    auto bad = [&] { return Error(Errc::InvalidConfig, "grid must look like lo:hi:count, got '" + text + "'"); };
    auto first = text.find(':');
    auto second = first == std::string::npos ? first : text.find(':', first + 1);
    if (second == std::string::npos) throw bad();
    auto number = [&](std::string_view s) {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) throw bad();
        return v;
    };
    std::string_view sv = text;
    GridSpec g;
    g.lo = number(sv.substr(0, first));
    g.hi = number(sv.substr(first + 1, second - first - 1));
    auto count_text = sv.substr(second + 1);
    unsigned long long count = 0;
    auto [p, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc{} || p != count_text.data() + count_text.size() || count == 0) throw bad();
    g.count = static_cast<std::size_t>(count);
    if (g.hi < g.lo || (g.count > 1 && g.hi == g.lo)) throw bad();
    return g;
}

std::string GridSpec::format() const { return format_double(lo) + ":" + format_double(hi) + ":" + std::to_string(count); }

std::vector<double> GridSpec::points() const { return estimate::linear_grid(lo, hi, count); }

RunConfig RunConfig::from_keyvalues(const KeyValues& kv) {
    RunConfig c;
    long long seed = kv.get_int("seed", static_cast<long long>(c.seed));
    if (seed < 0) throw Error(Errc::InvalidConfig, "seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.n = to_count(kv.get_int("n", static_cast<long long>(c.n)), "n");
    c.m = to_count(kv.get_int("m", static_cast<long long>(c.m)), "m");
    if (kv.has("grid")) c.grid = GridSpec::parse(kv.get("grid", ""));
    c.scm = scm::ScmConfig::from_keyvalues(kv, "scm.");
    c.output_dir = kv.get("out", c.output_dir);
    c.subsample = to_count(kv.get_int("subsample", static_cast<long long>(c.subsample)), "subsample");
    c.cycles = to_count(kv.get_int("cycles", static_cast<long long>(c.cycles)), "cycles");
    c.donors = to_count(kv.get_int("donors", static_cast<long long>(c.donors)), "donors");
    c.band_draws = to_count(kv.get_int("band_draws", static_cast<long long>(c.band_draws)), "band_draws");
    if (c.n == 0) throw Error(Errc::InvalidConfig, "n must be positive");
    if (c.m == 0) throw Error(Errc::InvalidConfig, "m must be positive");
    if (c.band_draws == 0) throw Error(Errc::InvalidConfig, "band_draws must be positive");
    if (c.output_dir.empty()) throw Error(Errc::InvalidConfig, "out must not be empty");
    return c;
}

KeyValues RunConfig::to_keyvalues() const {
    KeyValues kv;
    kv.set("seed", std::to_string(seed));
    kv.set("n", std::to_string(n));
    kv.set("m", std::to_string(m));
    kv.set("grid", grid.format());
    kv.set("out", output_dir);
    kv.set("subsample", std::to_string(subsample));
    kv.set("cycles", std::to_string(cycles));
    kv.set("donors", std::to_string(donors));
    kv.set("band_draws", std::to_string(band_draws));
    scm.to_keyvalues(kv, "scm.");
    return kv;
}

std::string Layout::imputed(std::size_t k) const {
    std::string num = std::to_string(k);
    if (num.size() < 2) num.insert(0, 2 - num.size(), '0');
    return dir + "/imputed_" + num + ".csv";
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    cfg.scm.validate();
    save_config(cfg);
    const Layout layout{cfg.output_dir};
    auto rows = scm::generate_population(cfg.scm, cfg.n, cfg.seed);
    auto observed = scm::apply_missingness(cfg.scm, rows, cfg.seed);
    write_csv(scm::population_table(rows), layout.population());
    write_csv(observed, layout.observed());
    auto s = scm::summarize_missingness(observed);
    out << "rows: " << s.rows << "\n";
    out << "x missing: " << percent(s.x_missing) << "\n";
    out << "z missing: " << percent(s.z_missing) << "\n";
    out << "both missing: " << percent(s.both_missing) << "\n";
    out << "wrote " << layout.population() << " and " << layout.observed() << "\n";
}

void cmd_identify(const std::string& graph_path, const std::string& treatment, const std::vector<std::string>& given,
                  std::ostream& out) {
    auto g = graph::load_graph(graph_path);
    g.id(treatment);
    auto children = g.children_of(treatment);
    auto confounded = graph::confounded_children(g, treatment);
    out << "identifiable: " << (confounded.empty() ? "true" : "false") << "\n";
    out << "children of " << treatment << ":";
    for (const auto& c : children) out << " " << c;
    out << (children.empty() ? " none\n" : "\n");
    for (const auto& c : children) {
        bool hit = std::find(confounded.begin(), confounded.end(), c) != confounded.end();
        out << "child " << c << (hit ? " has a bidirected path to " : " has no bidirected path to ") << treatment
            << "\n";
    }

    graph::NodeSet cond;
    for (const auto& v : given)
        if (g.contains(v)) cond.push_back(v);
    std::string cond_text;
    for (const auto& v : cond) cond_text += (cond_text.empty() ? "" : ", ") + v;
    for (const auto& node : g.nodes()) {
        if (node.name.rfind("M_", 0) != 0) continue;
        const std::string value = node.name.substr(2);
        if (!g.contains(value)) continue;
        // Conditioning on the value node itself would make the question moot.
        if (std::find(cond.begin(), cond.end(), value) != cond.end()) continue;
        bool given_holds = graph::mar_holds(g, value, node.name, cond);
        bool plain_holds = graph::mar_holds(g, value, node.name, {});
        out << "MAR " << node.name << " _||_ " << value << " | " << (cond.empty() ? "{}" : cond_text) << ": "
            << (given_holds ? "holds" : "fails") << "\n";
        out << "MAR " << node.name << " _||_ " << value << " | {}: " << (plain_holds ? "holds" : "fails") << "\n";
    }
}

void cmd_impute(const RunConfig& cfg, std::ostream& out) {
    const Layout layout{cfg.output_dir};
    auto observed = read_csv(layout.observed());
    mi::ImputationConfig ic;
    ic.m = cfg.m;
    ic.cycles = cfg.cycles;
    ic.donors = cfg.donors;
    ic.seed = cfg.seed;
    ic.validate();

    const auto& design = graph::design_model();
    bool mar = graph::mar_holds(design, "X", "M_X", {"Y"}) && graph::mar_holds(design, "Z", "M_Z", {"Y"});
    out << "missing at random given y on the design graph: " << (mar ? "yes" : "no") << "\n";

    auto result = mi::run_mice(observed, ic);
    save_config(cfg);
    for (std::size_t k = 0; k < result.completed.size(); ++k) write_csv(result.completed[k], layout.imputed(k + 1));
    auto diag = mi::imputation_diagnostics(result);
    write_text(layout.diagnostics(), mi::diagnostics_csv(diag));

    std::string trace = "chain,cycle,variable,mean,sd\n";
    for (const auto& t : result.trace)
        trace += std::to_string(t.chain) + "," + std::to_string(t.cycle) + "," + t.variable + "," +
                 format_double(t.mean) + "," + format_double(t.sd) + "\n";
    write_text(layout.trace(), trace);

    for (const auto& name : result.variables) {
        double ks = 0.0;
        std::size_t count = 0, missing = 0;
        for (const auto& row : diag)
            if (row.variable == name && row.side == "imputed") {
                ks += row.ks;
                missing = row.count;
                ++count;
            }
        out << name << ": " << missing << " imputed cells, mean KS observed vs imputed "
            << fixed(count ? ks / static_cast<double>(count) : 0.0, 3) << "\n";
    }
    out << "wrote " << result.completed.size() << " completed datasets to " << cfg.output_dir << "\n";
}

void cmd_estimate(const RunConfig& cfg, std::ostream& out) {
    const Layout layout{cfg.output_dir};
    auto observed = read_csv(layout.observed());
    auto completed = read_imputed(layout, cfg.m);
    const auto grid = cfg.grid.points();
    std::vector<double> oracle;
    for (double x : grid) oracle.push_back(scm::oracle_ace(cfg.scm, x));

    estimate::EstimatorConfig ec;
    ec.seed = cfg.seed;
    ec.distribution_draws = cfg.band_draws;
    auto mi = estimate::estimate_effect(completed, grid, ec);
    auto cc = estimate::complete_case_effect(observed, grid, ec);
    save_config(cfg);
    write_text(layout.effect_mi(), estimate::effect_csv(mi, oracle));
    write_text(layout.effect_cc(), estimate::effect_csv(cc, oracle));
    out << "grid: " << grid.size() << " points over [" << format_double(cfg.grid.lo) << ", "
        << format_double(cfg.grid.hi) << "]\n";
    out << "imputations: " << mi.imputations() << "\n";
    out << "complete rows: " << observed.complete_cases().rows() << " of " << observed.rows() << "\n";
    out << "wrote " << layout.effect_mi() << " and " << layout.effect_cc() << "\n";
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    const Layout layout{cfg.output_dir};
    auto mi = read_effect(layout.effect_mi()).estimate;
    auto cc = read_effect(layout.effect_cc()).estimate;
    if (mi.grid != cc.grid) throw Error(Errc::SizeMismatch, "effect tables use different grids");
    auto population = scm::population_rows(read_csv(layout.population()));
    auto observed = read_csv(layout.observed());
    if (population.size() != observed.rows())
        throw Error(Errc::SizeMismatch, "population and observed tables have different row counts");
    auto completed = read_imputed(layout, mi.imputations());

    std::string table = "x,oracle_ace,mi_ace,cc_ace,mi_error,cc_error\n";
    for (std::size_t g = 0; g < mi.grid.size(); ++g) {
        double o = scm::oracle_ace(cfg.scm, mi.grid[g]);
        table += format_double(mi.grid[g]) + "," + format_double(o) + "," + format_double(mi.pooled_ace[g]) + "," +
                 format_double(cc.pooled_ace[g]) + "," + format_double(mi.pooled_ace[g] - o) + "," +
                 format_double(cc.pooled_ace[g] - o) + "\n";
    }
    write_text(layout.evaluation(), table);

    auto report = [&](const char* name, const ErrorSummary& s) {
        out << name << ": max abs error " << fixed(s.max_abs) << ", mean abs error " << fixed(s.mean_abs)
            << ", mean signed error " << fixed(s.mean_signed) << " over " << s.points << " grid points in ["
            << format_double(kCoreLo) << ", " << format_double(kCoreHi) << "]\n";
    };
    auto mi_err = core_errors(mi, cfg.scm), cc_err = core_errors(cc, cfg.scm);
    report("multiple_imputation", mi_err);
    report("complete_case", cc_err);
    out << "complete-case over-estimation: mean signed error " << fixed(cc_err.mean_signed) << " ("
        << (cc_err.mean_signed > 0 ? "over" : "not over") << "), ratio to MI mean abs error "
        << fixed(mi_err.mean_abs > 0 ? cc_err.mean_signed / mi_err.mean_abs : 0.0, 2) << "\n";
    for (std::size_t g = 0; g < mi.grid.size(); ++g) {
        const double x = mi.grid[g];
        if (x >= kCoreLo - 1e-9 && x <= kCoreHi + 1e-9) continue;
        if (std::abs(x) < std::max(std::abs(mi.grid.front()), std::abs(mi.grid.back())) - 1e-9) continue;
        out << "extrapolation at x = " << format_double(x) << ": oracle " << fixed(scm::oracle_ace(cfg.scm, x))
            << ", multiple imputation " << fixed(mi.pooled_ace[g]) << ", complete case " << fixed(cc.pooled_ace[g])
            << "\n";
    }

    // Imputed cells against the values the simulator masked.
    for (const char* name : {"x", "z"}) {
        const std::size_t c = observed.column(name);
        std::vector<double> truth;
        for (std::size_t i = 0; i < observed.rows(); ++i)
            if (!observed.observed(c, i)) truth.push_back(name[0] == 'x' ? population[i].x : population[i].z);
        if (truth.empty()) continue;
        double ks = 0.0;
        for (const auto& d : completed) {
            std::vector<double> imputed;
            for (std::size_t i = 0; i < observed.rows(); ++i)
                if (!observed.observed(c, i)) imputed.push_back(*d.at(d.column(name), i));
            ks += stats::ks_statistic(imputed, truth);
        }
        out << name << ": KS imputed vs masked true values " << fixed(ks / static_cast<double>(completed.size()), 3)
            << " (mean over " << completed.size() << " datasets)\n";
    }
    out << "wrote " << layout.evaluation() << "\n";
}

void cmd_plot(const RunConfig& cfg, std::ostream& out) {
    const Layout layout{cfg.output_dir};
    auto observed = read_csv(layout.observed());
    auto mi_table = read_effect(layout.effect_mi());
    auto cc_table = read_effect(layout.effect_cc());
    const auto& mi = mi_table.estimate;
    const auto& cc = cc_table.estimate;
    RandomStream rng(cfg.seed, Stream::Plotting);

    // Scatterplot matrix of a subsample of the fully observed rows.
    auto complete = observed.complete_cases();
    auto picked = subsample(complete.rows(), cfg.subsample, rng);
    const std::vector<std::string> names{"x", "z", "y"};
    std::vector<std::vector<double>> cols(3);
    for (std::size_t j = 0; j < 3; ++j) {
        auto all = complete.complete_values(complete.column(names[j]));
        for (auto i : picked) cols[j].push_back(all[i]);
    }
    std::vector<svg::Panel> matrix;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) {
            svg::Panel p;
            if (r == c) p.caption = names[r];
            else p.layers.push_back(points(cols[c], cols[r], kMiColor));
            if (r == 2) p.x_label = names[c];
            if (c == 0) p.y_label = names[r];
            matrix.push_back(std::move(p));
        }
    write_text(layout.figure("fig3_scatter_matrix"), svg::render(matrix, 3, 240, 220));

    // True effect against the observational conditional mean.
    std::vector<double> xs, ys;
    const std::size_t cx = observed.column("x"), cy = observed.column("y");
    for (std::size_t i = 0; i < observed.rows(); ++i)
        if (observed.observed(cx, i)) {
            xs.push_back(*observed.at(cx, i));
            ys.push_back(*observed.at(cy, i));
        }
    auto basis = spline::build_basis(xs, 20);
    auto conditional = spline::select_lambda(ys, xs, basis, spline::SmoothingConfig{}.lambda_grid);
    auto fine = estimate::linear_grid(cfg.grid.lo, cfg.grid.hi, 121);
    std::vector<double> truth, cond;
    for (double x : fine) {
        truth.push_back(scm::oracle_ace(cfg.scm, x));
        cond.push_back(conditional.predict(x));
    }
    std::vector<double> px, py;
    for (auto i : subsample(xs.size(), cfg.subsample, rng)) {
        px.push_back(xs[i]);
        py.push_back(ys[i]);
    }
    svg::Panel fig4;
    fig4.title = "Causal effect and observational mean";
    fig4.x_label = "x";
    fig4.y_label = "y";
    fig4.layers.push_back(points(px, py, kDataColor, "observations"));
    fig4.layers.push_back(line(fine, truth, kTruthColor, "E(Y | do(X = x))"));
    fig4.layers.push_back(line(fine, cond, kCcColor, "E(Y | X = x)", true));
    write_text(layout.figure("fig4_truth_vs_conditional"), svg::render({fig4}, 1, 560, 400));

    // Estimated effects and causal quantiles against the truth.
    std::vector<double> true_q05, true_q95;
    for (std::size_t g = 0; g < mi.grid.size(); ++g) {
        auto draws = scm::intervene_generate(cfg.scm, mi.grid[g], 100000, derive_seed(cfg.seed, {g}));
        auto q = stats::quantiles(draws, std::vector<double>{0.05, 0.95});
        true_q05.push_back(q[0]);
        true_q95.push_back(q[1]);
    }
    std::vector<double> grid_truth;
    for (double x : mi.grid) grid_truth.push_back(scm::oracle_ace(cfg.scm, x));
    svg::Panel ace;
    ace.title = "Average causal effect";
    ace.x_label = "x";
    ace.y_label = "E(Y | do(X = x))";
    ace.layers.push_back(line(mi.grid, grid_truth, kTruthColor, "true"));
    ace.layers.push_back(line(mi.grid, mi.pooled_ace, kMiColor, "multiple imputation"));
    ace.layers.push_back(line(cc.grid, cc.pooled_ace, kCcColor, "complete case", true));
    svg::Panel dist;
    dist.title = "5% and 95% quantiles of p(Y | do(X = x))";
    dist.x_label = "x";
    dist.y_label = "y";
    dist.layers.push_back(band(mi.grid, mi.q05, mi.q95, kMiColor, "multiple imputation"));
    dist.layers.push_back(line(mi.grid, true_q05, kTruthColor, "true"));
    dist.layers.push_back(line(mi.grid, true_q95, kTruthColor, ""));
    dist.layers.push_back(line(cc.grid, cc.q05, kCcColor, "complete case", true));
    dist.layers.push_back(line(cc.grid, cc.q95, kCcColor, "", true));
    write_text(layout.figure("fig5_effects"), svg::render({ace, dist}, 1, 560, 360));

    out << "scatter matrix: " << picked.size() << " rows\n";
    out << "wrote " << layout.figure("fig3_scatter_matrix") << ", " << layout.figure("fig4_truth_vs_conditional")
        << " and " << layout.figure("fig5_effects") << "\n";
}

int exit_code(Errc code) noexcept {
    switch (code) {
    case Errc::InvalidConfig:
    case Errc::InvalidCount:
    case Errc::UnknownNode:
    case Errc::OverlappingSets:
        return Usage;
    case Errc::TooFewDistinctValues:
    case Errc::SingularSystem:
    case Errc::AllMissingColumn:
    case Errc::NothingToImpute:
    case Errc::EmptyResidualPool:
    case Errc::TooFewCompleteRows:
        return NumericFailure;
    default:
        return InputMissing;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Frontdoor causal effect estimation with multiple imputation", "frontdoor-lab"};
    app.require_subcommand(1);

    struct Flags {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> n, m, subsample;
        std::optional<std::string> out, grid;
    } flags;
    std::string graph_path;
    std::string treatment = "X";
    std::vector<std::string> given{"Y"};

    auto add_run_flags = [&](CLI::App* sub, bool with_n, bool with_m, bool with_grid, bool with_subsample) {
        sub->add_option("--config", flags.config, "Key-value config file");
        sub->add_option("--seed", flags.seed, "Root random seed");
        sub->add_option("--out", flags.out, "Output directory");
        if (with_n) sub->add_option("--n", flags.n, "Number of rows to simulate");
        if (with_m) sub->add_option("--m", flags.m, "Number of imputations");
        if (with_grid) sub->add_option("--grid", flags.grid, "Evaluation grid lo:hi:count");
        if (with_subsample) sub->add_option("--subsample", flags.subsample, "Rows in the scatter plots");
    };
    auto* simulate = app.add_subcommand("simulate", "Simulate population and observed tables");
    add_run_flags(simulate, true, false, false, false);
    auto* identify = app.add_subcommand("identify", "Check identifiability and missing-at-random on a graph");
    identify->add_option("--graph", graph_path, "Graph file")->required();
    identify->add_option("--treatment", treatment, "Treatment node");
    identify->add_option("--given", given, "Conditioning set for the missing-at-random checks");
    auto* impute = app.add_subcommand("impute", "Multiply impute the observed table");
    add_run_flags(impute, false, true, false, false);
    auto* estimate = app.add_subcommand("estimate", "Estimate the causal effect curve");
    add_run_flags(estimate, false, true, true, false);
    auto* evaluate = app.add_subcommand("evaluate", "Compare estimates with the true effect");
    add_run_flags(evaluate, false, false, false, false);
    auto* plot = app.add_subcommand("plot", "Draw the figures as SVG");
    add_run_flags(plot, false, false, false, true);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Success;
    } catch (const CLI::ParseError& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: Usage: " << msg << "\n";
        return Usage;
    }

    try {
        if (identify->parsed()) {
            cmd_identify(graph_path, treatment, given, out);
            return Success;
        }

        KeyValues kv;
        if (!flags.config.empty()) {
            kv = KeyValues::load(flags.config);
        } else if (!simulate->parsed()) {
            // Later stages pick up the configuration the earlier ones stored.
            std::string dir = flags.out.value_or(RunConfig{}.output_dir);
            if (fs::exists(Layout{dir}.config())) kv = KeyValues::load(Layout{dir}.config());
        }
        if (flags.seed) kv.set("seed", std::to_string(*flags.seed));
        if (flags.n) kv.set("n", std::to_string(*flags.n));
        if (flags.m) kv.set("m", std::to_string(*flags.m));
        if (flags.subsample) kv.set("subsample", std::to_string(*flags.subsample));
        if (flags.out) kv.set("out", *flags.out);
        if (flags.grid) kv.set("grid", *flags.grid);
        const RunConfig cfg = RunConfig::from_keyvalues(kv);

        if (simulate->parsed()) cmd_simulate(cfg, out);
        else if (impute->parsed()) cmd_impute(cfg, out);
        else if (estimate->parsed()) cmd_estimate(cfg, out);
        else if (evaluate->parsed()) cmd_evaluate(cfg, out);
        else if (plot->parsed()) cmd_plot(cfg, out);
        return Success;
    } catch (const Error& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        err << "error: " << errc_name(e.code()) << ": " << msg << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        err << "error: Io: " << e.what() << "\n";
        return InputMissing;
    }
}

}  // namespace frontdoor::cli
