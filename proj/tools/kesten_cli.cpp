#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "kesten/errors.hpp"
#include "kesten/experiment.hpp"
#include "kesten/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitDomain = 4;

struct GlobalFlags {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
    bool quiet = false;
};

struct TheoryFlags {
    std::string kind = "binary";
    std::optional<double> sigma;
    std::optional<double> alpha0;
    std::optional<double> alpha1;
    double bound = 1.0;
    std::optional<double> q0;
    std::optional<double> a;
};

void add_common(CLI::App* cmd, GlobalFlags& g, bool config_required) {
    auto* opt = cmd->add_option("--config", g.config, "JSON configuration file");
    if (config_required) {
        opt->required();
    }
    cmd->add_option("--out", g.out, "Output directory");
    cmd->add_option("--seed", g.seed, "Master seed (overrides the config)");
    cmd->add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--quiet", g.quiet, "Suppress progress messages");
}

kesten::CommandOptions make_options(const GlobalFlags& g, bool default_out) {
    kesten::CommandOptions o;
    o.out_dir = g.out.empty() ? (default_out ? std::filesystem::path(".") : std::filesystem::path())
                              : std::filesystem::path(g.out);
    o.seed = g.seed;
    o.workers = g.workers;
    o.log = g.quiet ? nullptr : &std::cerr;
    return o;
}

int run_theory(const GlobalFlags& g, const TheoryFlags& t) {
    using kesten::Json;
    Json request;
    if (!g.config.empty()) {
        request = kesten::read_json_file(g.config);
    }
    if (!request.contains("process")) {
        Json p;
        p["kind"] = t.kind;
        if (t.sigma) p["sigma"] = *t.sigma;
        if (t.alpha0) p["alpha0"] = *t.alpha0;
        if (t.alpha1) p["alpha1"] = *t.alpha1;
        p["bound"] = t.bound;
        request["process"] = p;
    }
    if (t.q0) request["q0"] = *t.q0;
    if (t.a) request["a"] = *t.a;
    const auto process = kesten::process_from_json(request.at("process"));
    const double q0 = kesten::config::number(request, "q0", "theory");
    const double a = kesten::config::number(request, "a", "theory");
    const Json out = kesten::cmd_theory(process, q0, a, make_options(g, false));
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo and closed-form analysis of the budget map x -> x (1 + r q0) + a"};
    app.require_subcommand(1);

    GlobalFlags g;
    TheoryFlags t;

    auto* simulate = app.add_subcommand("simulate", "Run an ensemble and write snapshots and histograms");
    add_common(simulate, g, true);
    auto* sweep = app.add_subcommand("sweep", "Measure x_mp over an (a, q0) grid and fit c");
    add_common(sweep, g, true);
    auto* compare = app.add_subcommand("compare", "Compare a sweep and a stationary ensemble with theory");
    add_common(compare, g, true);
    auto* theory = app.add_subcommand("theory", "Print the closed-form predictions as JSON");
    add_common(theory, g, false);
    theory->add_option("--kind", t.kind, "binary | uniform | normal | arch1");
    theory->add_option("--sigma", t.sigma, "Normal: standard deviation");
    theory->add_option("--alpha0", t.alpha0, "ARCH(1): alpha0");
    theory->add_option("--alpha1", t.alpha1, "ARCH(1): alpha1");
    theory->add_option("--bound", t.bound, "Truncation half-width");
    theory->add_option("--q0", t.q0, "Risk propensity");
    theory->add_option("--a", t.a, "Additive income");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            kesten::cmd_simulate(g.config, make_options(g, true));
        } else if (sweep->parsed()) {
            kesten::cmd_sweep(g.config, make_options(g, true));
        } else if (compare->parsed()) {
            kesten::cmd_compare(g.config, make_options(g, true));
        } else if (theory->parsed()) {
            return run_theory(g, t);
        }
    } catch (const kesten::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const kesten::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const kesten::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const kesten::EstimationError& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
