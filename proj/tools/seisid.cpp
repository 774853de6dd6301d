// seisid command line: LTI state-space identification of geoelectric
// potential signals driven by earthquake magnitudes.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <set>
#include <string>

#include "seisid/seisid.hpp"

namespace {

void add_rls_flags(CLI::App* cmd, seisid::RlsConfig& rls) {
    cmd->add_option("--lambda", rls.forgetting, "RLS forgetting factor in (0,1]")
        ->check(CLI::Range(1e-6, 1.0));
    cmd->add_option("--p0", rls.p0_scale, "initial covariance scale")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--stride", rls.trace_stride, "convergence trace snapshot stride")
        ->check(CLI::PositiveNumber);
}

void add_mode_flag(CLI::App* cmd, seisid::EvalMode& mode) {
    cmd->add_option_function<std::string>(
           "--mode",
           [&mode](const std::string& v) {
               mode = (v == "free-run") ? seisid::EvalMode::free_run : seisid::EvalMode::one_step;
           },
           "evaluation mode")
        ->check(CLI::IsMember({"one-step", "free-run"}))
        ->default_str("one-step");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LTI state-space identification of LTGP signals vs earthquake magnitude"};
    app.require_subcommand(1);

    seisid::SynthOptions synth;
    std::uint64_t seed_flag = 42;
    auto* synth_cmd = app.add_subcommand("synth", "generate a seeded synthetic dataset");
    synth_cmd->add_option("--spec", synth.spec_path, "synth spec file (key = value)")
        ->required()
        ->check(CLI::ExistingFile);
    synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();
    auto* seed_opt = synth_cmd->add_option("--seed", seed_flag, "override the spec file seed");

    seisid::IdentifyOptions ident;
    auto* ident_cmd = app.add_subcommand("identify", "identify one LTI model from data files");
    ident_cmd->add_option("--ltgp", ident.ltgp_path, "LTGP csv")->required()->check(CLI::ExistingFile);
    ident_cmd->add_option("--catalog", ident.catalog_path, "catalog csv")
        ->required()
        ->check(CLI::ExistingFile);
    ident_cmd->add_option("--out", ident.out_dir, "output directory")->required();
    ident_cmd->add_option("--order", ident.order, "model order")
        ->check(CLI::IsMember({2, 4}));
    ident_cmd->add_option("--train-len", ident.train_len,
                          "train on the first N samples, evaluate on the rest (0 = full series)");
    ident_cmd->add_flag("--svg", ident.svg, "emit line plots");
    add_rls_flags(ident_cmd, ident.rls);
    add_mode_flag(ident_cmd, ident.mode);

    seisid::ScenarioOptions scen;
    std::string overlap = "concatenate";
    auto* scen_cmd = app.add_subcommand("scenario", "run experimental scenario 1 or 2");
    scen_cmd->add_option("which", scen.which, "scenario number")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    scen_cmd->add_option("--ltgp", scen.ltgp_path, "LTGP csv")->required()->check(CLI::ExistingFile);
    scen_cmd->add_option("--catalog", scen.catalog_path, "catalog csv")
        ->required()
        ->check(CLI::ExistingFile);
    scen_cmd->add_option("--out", scen.out_dir, "output directory")->required();
    scen_cmd->add_option("--areas", scen.areas_path, "area config (name + 4 bounds per line)")
        ->check(CLI::ExistingFile);
    scen_cmd->add_option("--window-hours", scen.window.half_width_hours, "event window half width")
        ->check(CLI::PositiveNumber);
    scen_cmd
        ->add_option("--overlap", overlap, "window overlap policy")
        ->check(CLI::IsMember({"concatenate", "union"}));
    scen_cmd->add_option("--train-len", scen.train_len, "scenario 1 training length");
    scen_cmd->add_option("--train-fraction", scen.train_fraction, "scenario 2 training fraction")
        ->check(CLI::Range(0.0, 1.0));
    scen_cmd->add_flag("--svg", scen.svg, "emit line plots");
    add_rls_flags(scen_cmd, scen.rls);
    add_mode_flag(scen_cmd, scen.mode);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    }

    try {
        if (synth_cmd->parsed()) {
            if (seed_opt->count() > 0) synth.seed = seed_flag;
            seisid::cmd_synth(synth);
        } else if (ident_cmd->parsed()) {
            seisid::cmd_identify(ident);
        } else {
            scen.window.overlap_policy = (overlap == "union") ? seisid::OverlapPolicy::merge_union
                                                              : seisid::OverlapPolicy::concatenate;
            seisid::cmd_scenario(scen);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << seisid::error_category(e) << ": " << e.what() << "\n";
        return 1;
    }
    return 0;
}
