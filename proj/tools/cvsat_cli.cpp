// cvsat: scenario-driven front end for the satellite entanglement models.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cvsat/errors.hpp"
#include "cvsat/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidation = 4;

struct CommonFlags {
    std::string scenario_path;
    std::string out;
    int workers = 1;
    std::optional<std::uint64_t> seed;
    std::optional<int> quad_nodes;
    std::optional<int> quad_subdiv;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("scenario", f.scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out, "Output path (default: output.path from the scenario, else stdout)");
    cmd->add_option("--workers", f.workers, "Worker threads; output does not depend on it")
        ->check(CLI::Range(1, 1024));
    cmd->add_option("--seed", f.seed, "Monte Carlo seed override");
    cmd->add_option("--quad-nodes", f.quad_nodes, "Gauss-Legendre nodes per panel");
    cmd->add_option("--quad-subdiv", f.quad_subdiv, "Panels on the deflection range");
}

cvsat::Scenario load(const CommonFlags& f, bool allow_coarse) {
    auto sc = cvsat::load_scenario(f.scenario_path, true);
    if (f.quad_nodes) sc.quad.nodes_1d = *f.quad_nodes;
    if (f.quad_subdiv) sc.quad.subdivisions = *f.quad_subdiv;
    if (f.seed && sc.mc) sc.mc->seed = *f.seed;
    if (!f.out.empty()) sc.output_path = f.out;
    sc.validate(allow_coarse);
    return sc;
}

/// Writes through a temporary buffer so a failed run never leaves a partial file.
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw cvsat::ConfigError("output.path", "cannot open '" + path + "' for writing");
    }
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian entanglement over satellite fading channels"};
    app.require_subcommand(1);

    CommonFlags sweep_flags, ps_flags, eff_flags, val_flags;
    auto* sweep = app.add_subcommand("sweep", "E_LN of each scheme over the (sigma_b, r) grid");
    add_common(sweep, sweep_flags);
    auto* postselect = app.add_subcommand("postselect", "Direct scheme with classical or quantum post-selection");
    add_common(postselect, ps_flags);
    auto* effective = app.add_subcommand("effective", "Effective loss-channel parameters and scheme ordering");
    add_common(effective, eff_flags);
    auto* validate = app.add_subcommand("validate", "Convergence, physicality and Monte Carlo checks");
    add_common(validate, val_flags);

    double rate_p = 0.0;
    double rate_tx = 0.0;
    auto* rate = app.add_subcommand("rate", "Post-selected pair rate P_s * tx_rate");
    rate->add_option("--p", rate_p, "Success probability")->required();
    rate->add_option("--tx-hz", rate_tx, "Transmission rate in Hz")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*sweep) {
            const auto sc = load(sweep_flags, false);
            std::ostringstream out;
            cvsat::write_sweep_csv(out, cvsat::run_sweep(sc, sweep_flags.workers), false);
            emit(sc.output_path, out.str());
        } else if (*postselect) {
            const auto sc = load(ps_flags, false);
            std::ostringstream out;
            cvsat::write_sweep_csv(out, cvsat::run_postselect(sc, ps_flags.workers), true);
            emit(sc.output_path, out.str());
        } else if (*effective) {
            const auto sc = load(eff_flags, false);
            std::ostringstream out;
            cvsat::write_effective_csv(out, cvsat::run_effective(sc, eff_flags.workers));
            emit(sc.output_path, out.str());
        } else if (*validate) {
            const auto sc = load(val_flags, true);
            const auto report = cvsat::validate_scenario(sc, val_flags.workers);
            // The report goes to --out when given; the scenario's CSV path is not reused.
            emit(val_flags.out, report.to_json() + "\n");
            return report.passed() ? kExitOk : kExitValidation;
        } else if (*rate) {
            std::cout << cvsat::format_number(cvsat::rate_estimate(rate_p, rate_tx)) << "\n";
        }
    } catch (const cvsat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cvsat::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cvsat::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
