#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nmpgain/cli/commands.hpp"

namespace cli = nmpgain::cli;

namespace {

// Remembers whether the option appeared on the command line.
struct OptionalDouble {
    double value = 0.0;
    CLI::Option* opt = nullptr;

    void add(CLI::App* app, const std::string& name, const std::string& help) {
        opt = app->add_option(name, value, help);
    }
    [[nodiscard]] std::optional<double> get() const {
        return opt && opt->count() > 0 ? std::optional<double>(value) : std::nullopt;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Security-metric gains and performance limits for LTI systems with non-minimum-phase zeros"};
    app.set_version_flag("--version", std::string(cli::kToolName) + " " + cli::kToolVersion);
    app.require_subcommand(1);

    cli::AnalyzeOptions an;
    OptionalDouble an_tau;
    bool an_json = false;
    auto* analyze = app.add_subcommand("analyze", "Gains, classical bracket and NMP limitation bound for one system");
    analyze->add_option("config", an.config_path, "System config (JSON)")->required();
    auto* json_flag = analyze->add_flag("--json", an_json, "Write the report as JSON (default)");
    analyze->add_flag("--csv", an.csv, "Write the report as key,value CSV")->excludes(json_flag);
    analyze->add_option("--axis-tol", an.axis_tol, "Imaginary-axis classification tolerance");
    analyze->add_option("--out", an.out, "Report path; '-' for stdout");
    an_tau.add(analyze, "--tau", "Override the config's tau");

    cli::SweepOptions sw;
    auto* sweep = app.add_subcommand("sweep", "Sweep tau and write NMP-zero and bound CSVs");
    sweep->add_option("config", sw.config_path, "System config (JSON) using TAU")->required();
    sweep->add_option("--param", sw.param, "Swept parameter")->capture_default_str();
    sweep->add_option("--min", sw.min, "Range start")->capture_default_str();
    sweep->add_option("--max", sw.max, "Range end")->capture_default_str();
    sweep->add_option("--steps", sw.steps, "Number of grid points")->capture_default_str();
    sweep->add_option("--axis-tol", sw.axis_tol, "Imaginary-axis classification tolerance");
    sweep->add_option("--threads", sw.threads, "Worker threads (0: automatic)");
    sweep->add_option("--out", sw.out_dir, "Output directory");

    cli::BodeOptions bo;
    OptionalDouble bo_tau;
    auto* bode = app.add_subcommand("bode", "Magnitude of the coprime ratio and both transfer functions");
    bode->add_option("config", bo.config_path, "System config (JSON)")->required();
    bode->add_option("--wmin", bo.wmin, "Lowest frequency (rad/s)")->capture_default_str();
    bode->add_option("--wmax", bo.wmax, "Highest frequency (rad/s)")->capture_default_str();
    bode->add_option("--points", bo.points, "Log-spaced grid points")->capture_default_str();
    bode->add_option("--out", bo.out, "CSV path; '-' for stdout");
    bo_tau.add(bode, "--tau", "Override the config's tau");

    cli::WitnessOptions wi;
    OptionalDouble wi_horizon;
    OptionalDouble wi_dt;
    OptionalDouble wi_tau;
    auto* witness = app.add_subcommand("witness", "Simulate a stealthy attack or undetectable fault near the gain");
    witness->add_option("config", wi.config_path, "System config (JSON)")->required();
    wi_horizon.add(witness, "--horizon", "Simulation horizon (s)");
    wi_dt.add(witness, "--dt", "Integration step (s)");
    witness->add_option("--out", wi.out_dir, "Output directory");
    wi_tau.add(witness, "--tau", "Override the config's tau");

    cli::PoissonCheckOptions po;
    auto* poisson = app.add_subcommand("poisson-check", "Check the Poisson integral identity on random systems");
    poisson->add_option("--trials", po.trials, "Number of random systems")->capture_default_str();
    poisson->add_option("--seed", po.seed, "Base seed; trial i uses seed + i")->capture_default_str();
    poisson->add_flag("--adversarial", po.adversarial, "Add a near-boundary zero that must be rejected");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::kExitInvalidInput;
    }

    if (*analyze) {
        an.tau = an_tau.get();
        return cli::cmd_analyze(an, std::cout, std::cerr);
    }
    if (*sweep) {
        return cli::cmd_sweep(sw, std::cout, std::cerr);
    }
    if (*bode) {
        bo.tau = bo_tau.get();
        return cli::cmd_bode(bo, std::cout, std::cerr);
    }
    if (*witness) {
        wi.horizon = wi_horizon.get();
        wi.dt = wi_dt.get();
        wi.tau = wi_tau.get();
        return cli::cmd_witness(wi, std::cout, std::cerr);
    }
    return cli::cmd_poisson_check(po, std::cout, std::cerr);
}
