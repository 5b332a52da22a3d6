// rcprob check <model.rcm> <spec.rcp> [options]
#include <iostream>

#include <CLI11.hpp>

#include "rcprob/run.h"

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic checking of RoboChart models against RoboCertProb properties"};
    app.require_subcommand(1);

    rcprob::RunPlan plan;
    std::string engine = "internal", kind;
    bool no_timing = false, quiet = false;

    CLI::App* check = app.add_subcommand("check", "Validate, build and check (or emit PRISM)");
    check->add_option("model", plan.model_path, "RoboChart model (.rcm)")->required();
    check->add_option("spec", plan.spec_path, "RoboCertProb specification (.rcp)")->required();
    check->add_option("--engine", engine, "internal | smc | emit")
        ->check(CLI::IsMember({"internal", "smc", "emit"}));
    check->add_option("--kind", kind, "dtmc | mdp (default mdp; dtmc for smc)")->check(CLI::IsMember({"dtmc", "mdp"}));
    check->add_option("--prop", plan.prop_glob, "property name glob");
    check->add_option("--out", plan.out_dir, "output directory");
    check->add_option("--seed", plan.seed, "simulation seed");
    check->add_option("--max-states", plan.max_states, "state cap per build")->check(CLI::PositiveNumber);
    check->add_option("--tol", plan.tol, "value-iteration tolerance")->check(CLI::PositiveNumber);
    check->add_option("--threads", plan.threads, "worker threads (0: all cores)");
    check->add_flag("--no-timing", no_timing, "write zero timings for byte-identical reports");
    check->add_flag("-q,--quiet", quiet, "do not print the report table");

    CLI11_PARSE(app, argc, argv);

    plan.engine = engine == "smc" ? rcprob::Engine::Smc : engine == "emit" ? rcprob::Engine::Emit : rcprob::Engine::Internal;
    if (!kind.empty()) plan.kind = kind == "dtmc" ? rcprob::ModelKind::Dtmc : rcprob::ModelKind::Mdp;
    plan.timings = !no_timing;

    rcprob::RunOutcome out = rcprob::run(plan);
    for (const auto& d : out.diagnostics) std::cerr << rcprob::to_json_line(d) << "\n";
    if (!quiet) {
        if (!out.records.empty()) std::cout << rcprob::report_table(rcprob::RunOutcome{0, {}, out.records, {}}, plan.timings);
        for (const auto& f : out.files) std::cout << "wrote " << f << "\n";
    }
    return out.exit_code;
}
