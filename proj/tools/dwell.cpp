// dwell <experiment> [--config file.json] [overrides]
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dwell/config.hpp"
#include "dwell/experiments.hpp"
#include "dwell/output.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Entanglement of two-site Bose-Hubbard states: thermal, quench, dissipative and EoF-bound sweeps"};
    app.set_version_flag("--version", std::string(dwell::kToolVersion));

    std::vector<std::string> names;
    for (const auto& [_, name] : dwell::kExperimentNames) names.emplace_back(name);

    std::string experiment;
    std::string config_path;
    dwell::ConfigOverrides o;
    bool quiet = false;

    app.add_option("experiment", experiment, "Experiment to run")->required()->check(CLI::IsMember(names));
    app.add_option("--config", config_path, "JSON config; defaults are used for anything it omits");
    app.add_option("--n", o.n, "Particle numbers: 1,2,3 or 1:5[:step]");
    app.add_option("--beta", o.beta, "Inverse temperatures: list or start:stop:step");
    app.add_option("--j-over-u", o.j_over_u, "J/U grid: list or start:stop:step");
    app.add_option("--gamma", o.gamma, "Dissipation rates: list or start:stop:step");
    app.add_option("--t-max", o.t_max, "Evolution time in units of 1/U");
    app.add_option("--samples", o.samples, "Number of time samples");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--format", o.format, "csv or json");
    app.add_flag("-q,--quiet", quiet, "Do not list written files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        const auto kind = dwell::parse_experiment(experiment);
        auto cfg = config_path.empty() ? dwell::default_config(*kind) : dwell::load_config(config_path, kind);
        dwell::apply_overrides(cfg, o);
        const auto tables = dwell::run_experiment(cfg);
        const auto files = dwell::write_tables(tables, cfg, dwell::make_metadata(cfg));
        if (!quiet)
            for (const auto& f : files) std::cout << f.string() << '\n';
        return kExitOk;
    } catch (const dwell::ConfigError& e) {
        std::cerr << "dwell: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const dwell::NumericalError& e) {
        std::cerr << "dwell: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const dwell::IoError& e) {
        std::cerr << "dwell: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        // Library preconditions, e.g. a degenerate initial ground state.
        std::cerr << "dwell: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "dwell: internal error: " << e.what() << '\n';
        return 1;
    }
}
