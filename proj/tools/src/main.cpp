#include <polyharm/runner.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
    using namespace polyharm::runner;
    CLI::App app{"polyharm: periodic polyharmonic operators, perturbation series and spectral scans"};
    app.require_subcommand(1);
    std::string config_path;
    std::string output;
    bool quiet = false;
    const std::map<std::string, std::string> about{
        {"params", "derive and check the exponent cascade"},
        {"classify", "resonance level of each point"},
        {"predict", "known parts F_0..F_k at each point"},
        {"verify", "order sweep against the windowed oracle"},
        {"resonant-check", "resonance block against the oracle"},
        {"simple-check", "simple-set membership and margins"},
        {"bloch", "eigenvector coefficients against the series"},
        {"bands", "band functions over a quasimomentum grid"},
        {"gaps", "gap report with grid-doubling stability"},
        {"isoenergetic", "roots of F(x) = rho^{2l} along rays"},
        {"measure", "Monte Carlo resonance fractions on |x| = rho"},
    };
    for (const auto& name : subcommands()) {
        auto it = about.find(name);
        auto* sub = app.add_subcommand(name, it == about.end() ? std::string{} : it->second);
        sub->add_option("config", config_path, "experiment config (YAML)")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", output, "output directory (overrides run.output)");
        sub->add_flag("-q,--quiet", quiet, "suppress the summary on stdout");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }
    const std::string name = app.get_subcommands().front()->get_name();

    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const polyharm::Error& e) {
        std::cerr << e.what() << '\n';
        return exit_code_for(e.code());
    }
    RunOptions opts;
    opts.output_dir = output;
    opts.quiet = quiet;
    const RunResult r = run(name, cfg, opts, std::cout);
    for (const auto& a : r.artifacts)
        if (!quiet) std::cout << "wrote " << a << '\n';
    if (r.exit_code != kOk) std::cerr << "polyharm " << name << ": " << r.message << '\n';
    return r.exit_code;
}
