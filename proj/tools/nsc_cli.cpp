// nsc: nonstochastic control laboratory command-line driver.

#include "nsc/cli.hpp"

#include <CLI11.hpp>

#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Nonstochastic control laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::int64_t seed_override = -1;
    int jobs = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override, "override the config seed");
        sub->add_option("--jobs", jobs, "worker threads for sweeps");
    };

    auto* sysid = app.add_subcommand("sysid", "run exploration and system recovery");
    auto* control = app.add_subcommand("control", "run the full two-phase algorithm");
    auto* sweep = app.add_subcommand("regret-sweep", "regret scaling sweep over T");
    auto* verify = app.add_subcommand("verify", "run the lemma verification suite");
    auto* known = app.add_subcommand("known-gpc", "perturbation controller with known system");
    for (auto* sub : {sysid, control, sweep, verify, known}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    nsc::cli::Command cmd;
    if (sysid->parsed()) cmd.kind = nsc::cli::Command::Kind::kSysid;
    if (control->parsed()) cmd.kind = nsc::cli::Command::Kind::kControl;
    if (sweep->parsed()) cmd.kind = nsc::cli::Command::Kind::kRegretSweep;
    if (verify->parsed()) cmd.kind = nsc::cli::Command::Kind::kVerify;
    if (known->parsed()) cmd.kind = nsc::cli::Command::Kind::kKnownGpc;
    cmd.config_path = config_path;
    cmd.out_dir = out_dir;
    if (seed_override >= 0)
        cmd.seed_override = static_cast<std::uint64_t>(seed_override);
    cmd.jobs = jobs;
    return nsc::cli::run_command(cmd);
}
