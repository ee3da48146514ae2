#include <exception>
#include <iostream>

#include "CLI11.hpp"

#include "fairmoo/commands.hpp"
#include "fairmoo/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Fairness-aware evolutionary training of small binary classifiers"};
    app.require_subcommand(1);

    fairmoo::TrainOptions train;
    auto* t = app.add_subcommand("train", "Run seeded evolutionary trials from a spec file");
    t->add_option("--spec", train.spec_path, "experiment spec, key = value lines")->required();
    t->add_option("--out", train.out_dir, "output directory, overrides the spec's 'out'");

    fairmoo::EnsembleOptions ens;
    auto* e =
        app.add_subcommand("ensemble", "Select and score ensembles from a population dump");
    e->add_option("--spec", ens.spec_path, "spec that produced the dump (rebuilds the splits)")
        ->required();
    e->add_option("--population", ens.population_path, "trial population dump (.jsonl)")
        ->required();
    e->add_option("--out", ens.out_dir, "output directory")->required();
    e->add_option("--strategy", ens.strategies,
                  "EnsAll, EnsBest, EnsKnee or EnsDiv; repeatable, default from the spec");
    e->add_option("--size", ens.size, "member budget for EnsKnee/EnsDiv");
    e->add_option("--criteria", ens.criteria, "report columns, comma separated tags");

    fairmoo::ReportOptions rep;
    auto* r = app.add_subcommand("report", "Pool run directories into indicator tables");
    r->add_option("dirs", rep.run_dirs, "one run directory per compared configuration")
        ->required();
    r->add_option("--out", rep.out_dir, "output directory")->required();
    r->add_option("--objectives", rep.objectives, "projection tags, default all criteria");
    r->add_option("--baseline", rep.baseline_path,
                  "key = value point; adds the dominance proportion table");
    r->add_option("--alpha-sig", rep.alpha_sig, "rank-sum significance level")
        ->capture_default_str();

    fairmoo::SynthOptions syn;
    auto* s = app.add_subcommand("synth", "Write a synthetic biased dataset CSV");
    s->add_option("--n", syn.n, "rows")->capture_default_str();
    s->add_option("--dim", syn.dim, "feature count")->capture_default_str();
    s->add_option("--bias", syn.bias, "positive-rate gap between the two groups")
        ->capture_default_str();
    s->add_option("--seed", syn.seed, "generator seed")->capture_default_str();
    s->add_option("--out", syn.out_path, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? 0 : 1;
    }

    try {
        if (t->parsed()) fairmoo::cmd_train(train);
        if (e->parsed()) fairmoo::cmd_ensemble(ens);
        if (r->parsed()) fairmoo::cmd_report(rep);
        if (s->parsed()) fairmoo::cmd_synth(syn);
    } catch (const fairmoo::ConfigError& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return 1;
    } catch (const fairmoo::DataError& err) {
        std::cerr << "data error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 3;
    }
    return 0;
}
