#ifndef FRONTDOOR_CLI_HPP
#define FRONTDOOR_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "frontdoor/error.hpp"
#include "frontdoor/keyvalue.hpp"
#include "frontdoor/scm.hpp"

namespace frontdoor::cli {

enum ExitCode : int { Success = 0, Usage = 2, InputMissing = 3, NumericFailure = 4 };

/// `lo:hi:count`, count equally spaced points.
struct GridSpec {
    double lo = -3.0;
    double hi = 3.0;
    std::size_t count = 41;

    /// Throws InvalidConfig.
    static GridSpec parse(const std::string& text);
    std::string format() const;
    std::vector<double> points() const;
};

/// Everything a run depends on. Stored as `run_config.txt` in the output
/// directory by every stage, so later stages and reruns see the same values.
struct RunConfig {
    std::uint64_t seed = 1;
    std::size_t n = 20000;
    std::size_t m = 10;
    GridSpec grid;
    scm::ScmConfig scm;
    std::string output_dir = "out";
    std::size_t subsample = 500;
    std::size_t cycles = 10;
    std::size_t donors = 5;
    std::size_t band_draws = 20000;

    /// Keys: seed, n, m, grid, out, subsample, cycles, donors, band_draws and
    /// scm.<name> for the structural model. Throws InvalidConfig.
    static RunConfig from_keyvalues(const KeyValues& kv);
    KeyValues to_keyvalues() const;
};

/// Paths of the artifacts inside an output directory.
struct Layout {
    std::string dir;

    std::string config() const { return dir + "/run_config.txt"; }
    std::string population() const { return dir + "/population.csv"; }
    std::string observed() const { return dir + "/observed.csv"; }
    std::string imputed(std::size_t k) const;  // 1-based: imputed_01.csv, ...
    std::string diagnostics() const { return dir + "/imputation_diagnostics.csv"; }
    std::string trace() const { return dir + "/imputation_trace.csv"; }
    std::string effect_mi() const { return dir + "/effect_mi.csv"; }
    std::string effect_cc() const { return dir + "/effect_cc.csv"; }
    std::string evaluation() const { return dir + "/evaluation.csv"; }
    std::string figure(const std::string& name) const { return dir + "/" + name + ".svg"; }
};

/// The stages. Each reads its inputs from cfg.output_dir, writes its outputs
/// there, prints a short report to `out`, and throws frontdoor::Error.
void cmd_simulate(const RunConfig& cfg, std::ostream& out);
/// `treatment` defaults to X; MAR verdicts are printed for every pair of
/// nodes V and M_V, conditional on `given` and unconditionally.
void cmd_identify(const std::string& graph_path, const std::string& treatment, const std::vector<std::string>& given,
                  std::ostream& out);
void cmd_impute(const RunConfig& cfg, std::ostream& out);
void cmd_estimate(const RunConfig& cfg, std::ostream& out);
void cmd_evaluate(const RunConfig& cfg, std::ostream& out);
void cmd_plot(const RunConfig& cfg, std::ostream& out);

int exit_code(Errc code) noexcept;

/// Entry point of frontdoor-lab; args excludes the program name. Errors are
/// reported on `err` as one line: `error: <code>: <message>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frontdoor::cli

#endif
