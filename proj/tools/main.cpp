// Command-line front end.  Every subcommand accepts --config <file> with flat
// `key = value` lines (same names as the flags, no leading dashes); explicit
// flags win over the file, unknown keys are rejected by name.

#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "kmre/cli.hpp"

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// flat `key = value` lines; '#' starts a comment; flags already given on the
// command line keep their values
void apply_flat_config(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::runtime_error("config: line " + std::to_string(lineno) +
                                     " is not 'key = value'");
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (!opt || key == "config")
            throw std::runtime_error("config: unknown key '" + key + "'");
        if (opt->count() > 0) continue; // command line wins
        opt->add_result(value);
        try {
            opt->run_callback();
        } catch (const CLI::Error&) {
            throw std::runtime_error("config: bad value for key '" + key + "': " + value);
        }
    }
}

void add_config(CLI::App* cmd) {
    auto store = std::make_shared<std::string>();
    cmd->add_option("--config", *store, "flat key = value config file; flags override");
    cmd->parse_complete_callback([cmd, store] {
        if (!store->empty()) apply_flat_config(cmd, *store);
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-edge bit-flip chain toolkit"};
    app.require_subcommand(1);

    kmre::SimulateParams sim;
    auto* c_sim = app.add_subcommand("simulate", "run the chain and estimate the drift speed");
    c_sim->add_option("--domain-len", sim.domain_len, "window length in bits");
    c_sim->add_option("--n-jumps", sim.n_jumps, "stop after this many leading flips");
    c_sim->add_option("--t-max", sim.t_max, "stop at this simulated time instead");
    c_sim->add_option("--pattern", sim.pattern, "coin|single|allones:<r>|bits:<01...>");
    c_sim->add_option("--seed", sim.seed, "rng seed");
    c_sim->add_option("--batches", sim.batches, "batch count for the stderr estimate");
    c_sim->add_option("--out", sim.out, "JSON report path");
    c_sim->add_option("--trace-csv", sim.trace_csv, "write the jump trace (n,sigma,jump)");
    add_config(c_sim);

    kmre::ValidateLemmasParams val;
    auto* c_val = app.add_subcommand("validate-lemmas",
                                     "first-jump pmf and stochastic-dominance validation");
    c_val->add_option("--samples", val.samples, "samples per start configuration");
    c_val->add_option("--seed", val.seed, "rng seed");
    c_val->add_option("--threads", val.threads, "worker threads (0 = hardware)");
    c_val->add_option("--threshold-max", val.threshold_max, "largest survival threshold");
    c_val->add_option("--z", val.z, "margin width in binomial sigmas");
    c_val->add_option("--out", val.out, "JSON report path");
    c_val->add_option("--tables-csv", val.tables_csv_prefix,
                      "prefix for law-table CSVs (columns: support,value)");
    add_config(c_val);

    kmre::LowerBoundParams lb;
    auto* c_lb = app.add_subcommand("lower-bound", "reward-tree recursion lower bound");
    c_lb->add_option("--depth", lb.depth, "tree depth (leaves at [2^depth, 2^{depth+1}))");
    c_lb->add_option("--bad-set", lb.bad_set_path, "bad-set file (default: stock set)");
    c_lb->add_flag("--unit-base", lb.unit_base_at_one, "use (a,b)(1) = (0,1) instead of (0,0)");
    c_lb->add_option("--out", lb.out, "JSON report path");
    c_lb->add_option("--leaf-csv", lb.leaf_csv, "write leaf ratios as CSV (x,a,b,ratio)");
    add_config(c_lb);

    kmre::UpperBoundParams ub;
    auto* c_ub = app.add_subcommand("upper-bound", "harmonic series / quadrature upper bound");
    c_ub->add_option("--cutoff", ub.cutoff, "double-series truncation (J = K)");
    c_ub->add_option("--tol", ub.tol, "quadrature tolerance");
    c_ub->add_option("--mc-samples", ub.mc_samples, "sampling cross-check size (0 = skip)");
    c_ub->add_option("--seed", ub.seed, "rng seed for the cross-check");
    c_ub->add_option("--out", ub.out, "JSON report path");
    add_config(c_ub);

    kmre::KmExactParams ke;
    auto* c_ke = app.add_subcommand("km-exact", "exact expected-step DP and identities");
    c_ke->add_option("--n", ke.n, "largest dimension to sweep");
    c_ke->add_option("--identity-n-max", ke.identity_n_max, "identity check up to this n");
    c_ke->add_option("--out", ke.out, "JSON report path");
    c_ke->add_option("--curve-csv", ke.curve_csv, "write (n, e_n, lower, upper) rows");
    add_config(c_ke);

    kmre::KmMcParams km;
    auto* c_km = app.add_subcommand("km-mc", "Monte-Carlo expected steps from uniform starts");
    c_km->add_option("--n", km.n, "dimension");
    c_km->add_option("--replicas", km.replicas, "independent replicas");
    c_km->add_option("--seed", km.seed, "rng seed");
    c_km->add_option("--threads", km.threads, "worker threads (0 = hardware)");
    c_km->add_option("--out", km.out, "JSON report path");
    add_config(c_km);

    kmre::DualityParams du;
    auto* c_du = app.add_subcommand("duality", "coupling rank/kernel duality check");
    c_du->add_option("--n", du.n, "dimension");
    c_du->add_option("--t", du.t, "steps");
    c_du->add_option("--exact", du.exact, "exact enumeration (true) or sampling (false)");
    c_du->add_option("--samples", du.samples, "sequence samples in mc mode");
    c_du->add_option("--seed", du.seed, "rng seed");
    c_du->add_option("--out", du.out, "JSON report path");
    add_config(c_du);

    kmre::WindowCensusParams wc;
    auto* c_wc = app.add_subcommand("window-census", "pattern frequencies of a bit window");
    c_wc->add_option("--domain-len", wc.domain_len, "window length in bits");
    c_wc->add_option("--offset", wc.offset, "window offset");
    c_wc->add_option("--width", wc.width, "window width in bits");
    c_wc->add_option("--samples", wc.samples, "renormalized-state samples");
    c_wc->add_option("--pattern", wc.pattern, "starting pattern");
    c_wc->add_option("--seed", wc.seed, "rng seed");
    c_wc->add_option("--out", wc.out, "JSON report path");
    c_wc->add_option("--csv", wc.csv, "write per-pattern counts as CSV (pattern,count,frequency)");
    add_config(c_wc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "{\"error\": \"%s\"}\n", e.what());
        return 2;
    }

    try {
        kmre::json rep;
        if (*c_sim) rep = kmre::run_simulate(sim);
        else if (*c_val) rep = kmre::run_validate_lemmas(val);
        else if (*c_lb) rep = kmre::run_lower_bound(lb);
        else if (*c_ub) rep = kmre::run_upper_bound(ub);
        else if (*c_ke) rep = kmre::run_km_exact(ke);
        else if (*c_km) rep = kmre::run_km_mc(km);
        else if (*c_du) rep = kmre::run_duality(du);
        else if (*c_wc) rep = kmre::run_window_census(wc);
        std::printf("%s\n", rep.dump(2).c_str());
        return kmre::all_checks_pass(rep) ? 0 : 1;
    } catch (const std::exception& e) {
        kmre::json err{{"error", e.what()}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return 2;
    }
}
