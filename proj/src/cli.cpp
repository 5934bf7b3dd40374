#include "kmre/cli.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "kmre/estimators.hpp"
#include "kmre/harmonic.hpp"
#include "kmre/km.hpp"
#include "kmre/reward_tree.hpp"
#include "kmre/series_bounds.hpp"

namespace kmre {

namespace {

uint32_t effective_threads(uint32_t requested) {
    if (requested) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

} // namespace

Pattern parse_pattern(const std::string& text) {
    if (text == "coin") return Pattern::coin();
    if (text == "single") return Pattern::single_one();
    if (text.rfind("allones:", 0) == 0) {
        const long r = std::stol(text.substr(8));
        if (r < 1) throw std::invalid_argument("pattern: allones run must be >= 1");
        return Pattern::all_ones(uint32_t(r));
    }
    if (text.rfind("bits:", 0) == 0) return Pattern::explicit_bits(text.substr(5));
    throw std::invalid_argument("pattern: expected coin|single|allones:<r>|bits:<01...>");
}

json run_simulate(const SimulateParams& p) {
    Rng rng(p.seed);
    Pattern pattern = parse_pattern(p.pattern);
    ChainState state(pattern, p.domain_len, &rng);
    StopRule stop = p.t_max > 0 ? StopRule::time_limit(p.t_max)
                                : StopRule::leading_flips(p.n_jumps);
    JumpTrace trace = state.run(rng, stop);

    json results;
    results["n_jumps"] = trace.records.size();
    results["total_events"] = trace.total_events;
    results["final_time"] = trace.final_time;
    results["truncation_hit"] = trace.truncation_hit;
    results["absorbed"] = trace.absorbed;
    results["validity"] = !trace.truncation_hit;
    json checks;
    if (!trace.records.empty() && !trace.truncation_hit) {
        SpeedEstimate est = speed_estimate(trace, p.batches);
        est.seed = p.seed;
        results["spd_sigma"] = est.spd_sigma;
        results["spd_count"] = est.spd_count;
        results["stderr_sigma"] = est.stderr_sigma;
        results["batches"] = est.batches;
        results["checkpoint_min"] = est.checkpoint_min;
        results["checkpoint_max"] = est.checkpoint_max;
        json cps = json::array();
        for (auto [n, spd] : est.checkpoints) cps.push_back({{"n", n}, {"spd", spd}});
        results["checkpoints"] = cps;
        checks["speed_positive"] = est.spd_sigma > 0;
        checks["normalizations_agree_5pct"] =
            std::abs(est.spd_sigma / est.spd_count - 1.0) < 0.05;
    }
    checks["no_truncation"] = !trace.truncation_hit;

    if (!p.trace_csv.empty()) {
        std::ostringstream csv;
        csv << "n,sigma,jump\n";
        for (size_t i = 0; i < trace.records.size(); ++i)
            csv << (i + 1) << ',' << trace.records[i].sigma << ',' << trace.records[i].jump
                << '\n';
        write_text_file(p.trace_csv, csv.str());
    }

    json params{{"domain_len", p.domain_len}, {"n_jumps", p.n_jumps},   {"t_max", p.t_max},
                {"pattern", p.pattern},       {"batches", p.batches}};
    json rep = make_report("simulate", p.seed, params, results, checks);
    write_json(output_path(p.out, "simulate.json"), rep);
    return rep;
}

json run_validate_lemmas(const ValidateLemmasParams& p) {
    const uint32_t threads = effective_threads(p.threads);
    Rng rng(p.seed);
    json results;
    json checks;

    // first-jump pmf from all-ones starts
    json jump_section = json::array();
    for (uint32_t r : {2u, 3u, 5u, 10u}) {
        Rng sub = rng.derive(100 + r);
        auto counts = sample_jump1(Pattern::all_ones(r), 64, p.samples, sub, r);
        LawTable law = jump1_law_exact(r);
        double worst_z = 0;
        double mean = 0;
        for (uint32_t k = 1; k <= r; ++k) {
            const double expect = law.values[k - 1];
            const double got = double(counts[k]) / double(p.samples);
            const double sd = std::sqrt(expect * (1 - expect) / double(p.samples));
            worst_z = std::max(worst_z, std::abs(got - expect) / sd);
            mean += double(k) * got;
        }
        const double law_mean = harmonic(r);
        double law_var = 0;
        for (uint32_t k = 1; k <= r; ++k)
            law_var += (double(k) - law_mean) * (double(k) - law_mean) * law.values[k - 1];
        const double mean_z =
            std::abs(mean - law_mean) / std::sqrt(law_var / double(p.samples));
        const bool pass = worst_z <= p.z && mean_z <= p.z;
        jump_section.push_back({{"r", r},
                                {"worst_cell_z", worst_z},
                                {"mean_z", mean_z},
                                {"empirical_mean", mean},
                                {"exact_mean", law_mean},
                                {"pass", pass}});
        checks["jump1_r" + std::to_string(r)] = pass;
    }
    results["jump1"] = jump_section;

    // zeros*(Y_1) dominated by Theta.  The bound needs ones to the right of
    // the leading block, so the checked starts carry a coin tail; bare
    // all-ones starts are reported too: there the first flip floods the zero
    // tail with probability 1/r and zeros*(Y_1) escapes every threshold.
    json zs_section = json::array();
    const auto theta_ref = theta_survival_table(p.threshold_max);
    for (uint32_t r : {1u, 3u, 8u}) {
        Rng sub = rng.derive(200 + r);
        std::string bits(r, '1');
        Rng tail_rng = rng.derive(250 + r);
        while (bits.size() < 1024) bits += tail_rng.coin() ? '1' : '0';
        auto sample = sample_zeros_star_y1(Pattern::explicit_bits(bits), 1024, p.samples, sub,
                                           p.threshold_max, threads);
        auto rep = dominance_check_z(sample.survival, theta_ref, p.samples, p.z);
        zs_section.push_back({{"r", r},
                              {"tail", "coin"},
                              {"pass", rep.pass},
                              {"max_violation", rep.max_violation},
                              {"argmax", rep.argmax},
                              {"censored", sample.censored}});
        checks["zeros_star_dom_r" + std::to_string(r)] = rep.pass;
    }
    results["zeros_star_dominance"] = zs_section;

    json atom_section = json::array();
    for (uint32_t r : {1u, 3u, 8u}) {
        Rng sub = rng.derive(270 + r);
        const uint64_t n_atom = std::max<uint64_t>(p.samples / 10, 1000);
        auto sample = sample_zeros_star_y1(Pattern::all_ones(r), 1024, n_atom, sub,
                                           p.threshold_max, threads);
        auto rep = dominance_check_z(sample.survival, theta_ref, n_atom, p.z);
        atom_section.push_back({{"r", r},
                                {"escape_mass", double(sample.censored) / double(n_atom)},
                                {"expected_atom", 1.0 / double(r)},
                                {"dominated_by_theta", rep.pass}});
    }
    results["zeros_star_all_ones_tail"] = atom_section;

    // ones(Y_1) from a zeros_j start dominated by S + j
    json ones_section = json::array();
    const LawTable s_pmf = s_total_pmf(p.threshold_max + 2);
    for (uint32_t j : {1u, 2u, 5u}) {
        Rng sub = rng.derive(300 + j);
        std::string bits = "1" + std::string(j, '0') + "1";
        auto sample = sample_ones_y1(Pattern::explicit_bits(bits), 1024, p.samples, sub,
                                     p.threshold_max, threads);
        auto ref = s_plus_survival(s_pmf, j, p.threshold_max);
        auto rep = dominance_check_z(sample.survival, ref, p.samples, p.z);
        ones_section.push_back({{"j", j},
                                {"pass", rep.pass},
                                {"max_violation", rep.max_violation},
                                {"argmax", rep.argmax},
                                {"censored", sample.censored}});
        checks["ones_dom_j" + std::to_string(j)] = rep.pass;
    }
    results["ones_dominance"] = ones_section;

    if (!p.tables_csv_prefix.empty()) {
        write_text_file(p.tables_csv_prefix + "_theta_survival.csv",
                        law_table_csv(theta_ref));
        write_text_file(p.tables_csv_prefix + "_s_pmf.csv", law_table_csv(s_pmf));
        for (uint32_t r : {2u, 3u, 5u, 10u})
            write_text_file(p.tables_csv_prefix + "_jump1_r" + std::to_string(r) + ".csv",
                            law_table_csv(jump1_law_exact(r)));
    }

    json params{{"samples", p.samples},
                {"threshold_max", p.threshold_max},
                {"z", p.z},
                {"threads", threads}};
    json rep = make_report("validate-lemmas", p.seed, params, results, checks);
    write_json(output_path(p.out, "validate_lemmas.json"), rep);
    return rep;
}

json run_lower_bound(const LowerBoundParams& p) {
    BadSet bad = p.bad_set_path.empty() ? default_bad_set() : load_bad_set(p.bad_set_path);
    RewardTable table = reward_table(p.depth, bad, {p.unit_base_at_one});
    LeafMinimum lm = leaf_minimum(table);
    json results;
    results["depth"] = p.depth;
    results["bad_size"] = bad.size();
    results["x_min"] = lm.x_min;
    results["min_ratio"] = lm.ratio;
    results["bound"] = 1.0 + lm.ratio;
    results["recursion_residual"] = recursion_residual(table);
    if ((1u << p.depth) > 72) { // the diagnostic scan starts above vertex 71
        LeafMinimum im = internal_minimum(table);
        results["internal_min_x"] = im.x_min;
        results["internal_min_ratio"] = im.ratio;
    }

    json checks;
    checks["bound_at_least_one"] = (1.0 + lm.ratio) >= 1.0;
    checks["recursion_residual_small"] = results["recursion_residual"].get<double>() < 1e-9;

    if (!p.leaf_csv.empty()) {
        std::ostringstream csv;
        csv << "x,a,b,ratio\n";
        const uint32_t lo = 1u << p.depth, hi = 2u << p.depth;
        for (uint32_t x = lo; x < hi; ++x)
            csv << x << ',' << table.a[x] << ',' << table.b[x] << ','
                << (table.a[x] / table.b[x]) << '\n';
        write_text_file(p.leaf_csv, csv.str());
    }

    json params{{"depth", p.depth},
                {"bad_set", p.bad_set_path.empty() ? "stock" : p.bad_set_path},
                {"unit_base_at_one", p.unit_base_at_one}};
    json rep = make_report("lower-bound", 0, params, results, checks);
    write_json(output_path(p.out, "lower_bound.json"), rep);
    return rep;
}

json run_upper_bound(const UpperBoundParams& p) {
    UpperBoundResult ub = upper_bound(p.cutoff, p.cutoff, p.tol);
    json results;
    results["theta2"] = ub.theta2.value;
    results["theta2_tail"] = ub.theta2.tail_estimate;
    results["truncation_j"] = ub.theta2.truncation_j;
    results["truncation_k"] = ub.theta2.truncation_k;
    results["hs1"] = ub.hs1.value; // the integral, i.e. E H_{S+1} - 1
    results["hs1_tol"] = ub.hs1.abs_tol;
    results["quad_panels"] = ub.hs1.panel_count;
    results["bound"] = ub.bound;
    results["error_budget"] = ub.total_budget;

    json checks;
    checks["bound_below_292"] = ub.bound < 2.92;
    checks["bound_plus_budget_below_292"] = ub.bound + ub.total_budget < 2.92;
    checks["theta2_in_interval"] = ub.theta2.value > 1.9 && ub.theta2.value < 2.0;

    if (p.mc_samples > 0) {
        Rng rng(p.seed);
        auto mc_hs1 = mc_h_s_plus_1_minus_1(p.mc_samples, rng);
        auto mc_t2 = mc_h_theta2(p.mc_samples, rng);
        results["mc_hs1_mean"] = mc_hs1.mean;
        results["mc_hs1_stderr"] = mc_hs1.stderr_;
        results["mc_theta2_mean"] = mc_t2.mean;
        results["mc_theta2_stderr"] = mc_t2.stderr_;
        results["mc_theta_cap_hits"] = mc_t2.theta_cap_hits;
        checks["mc_hs1_within_3sigma"] =
            std::abs(mc_hs1.mean - ub.hs1.value) <= 3 * mc_hs1.stderr_ + ub.hs1.abs_tol;
        checks["mc_theta2_within_3sigma"] =
            std::abs(mc_t2.mean - ub.theta2.value) <=
            3 * mc_t2.stderr_ + ub.theta2.tail_estimate;
    }

    json params{{"cutoff", p.cutoff}, {"tol", p.tol}, {"mc_samples", p.mc_samples}};
    json rep = make_report("upper-bound", p.seed, params, results, checks);
    write_json(output_path(p.out, "upper_bound.json"), rep);
    return rep;
}

json run_km_exact(const KmExactParams& p) {
    if (p.n < 1 || p.n > 24) throw std::invalid_argument("km-exact: n must be in [1,24]");
    json results;
    json rows = json::array();
    bool bounds_ok = true;
    std::ostringstream csv;
    csv << "n,e_n,lower,upper\n";
    for (uint32_t n = 1; n <= p.n; ++n) {
        const double en = expected_steps_dp(n);
        const EnBounds b = en_bounds(n);
        const bool ok = b.lower <= en && en <= b.upper;
        bounds_ok = bounds_ok && ok;
        rows.push_back({{"n", n}, {"e_n", en}, {"lower", b.lower}, {"upper", b.upper}});
        csv << n << ',' << en << ',' << b.lower << ',' << b.upper << '\n';
    }
    results["e_n"] = rows;

    const ConventionResolution conv = resolve_lstar_convention(std::min(p.n, 6u));
    results["lstar_convention"] = to_string(conv.selected);
    results["conv_residual_selected"] = conv.max_residual_selected;
    results["conv_residual_rejected"] = conv.max_residual_rejected;
    double worst_identity = 0;
    json idrows = json::array();
    for (uint32_t n = 1; n <= std::min(p.identity_n_max, p.n); ++n) {
        IdentityReport ir = step_count_identity(n, conv.selected);
        idrows.push_back({{"n", n}, {"residual", ir.residual}});
        worst_identity = std::max(worst_identity, ir.residual);
    }
    results["identity"] = idrows;

    json checks;
    checks["bounds_hold"] = bounds_ok;
    checks["identity_residual_below_1e10"] = worst_identity < 1e-10;

    if (!p.curve_csv.empty()) write_text_file(p.curve_csv, csv.str());
    json params{{"n", p.n}, {"identity_n_max", p.identity_n_max}};
    json rep = make_report("km-exact", 0, params, results, checks);
    write_json(output_path(p.out, "km_exact.json"), rep);
    return rep;
}

json run_km_mc(const KmMcParams& p) {
    Rng rng(p.seed);
    const uint32_t threads = effective_threads(p.threads);
    McEnEstimate est = en_simulate(p.n, p.replicas, rng, threads);
    json results;
    results["n"] = p.n;
    results["replicas"] = p.replicas;
    results["e_n_mc"] = est.mean;
    results["stderr"] = est.stderr_;
    results["e_over_n2"] = est.mean / (double(p.n) * double(p.n));
    json checks;
    if (p.n <= 20) {
        const double exact = expected_steps_dp(p.n);
        results["e_n_exact"] = exact;
        checks["matches_exact_4sigma"] = std::abs(est.mean - exact) <= 4 * est.stderr_;
    }
    json params{{"n", p.n}, {"replicas", p.replicas}, {"threads", threads}};
    json rep = make_report("km-mc", p.seed, params, results, checks);
    write_json(output_path(p.out, "km_mc.json"), rep);
    return rep;
}

json run_duality(const DualityParams& p) {
    Rng rng(p.seed);
    const DualOrientation orient = resolve_dual_orientation();
    DualityReport dr = duality_check(p.n, p.t, p.exact, p.samples, rng, orient);
    json results;
    results["n"] = p.n;
    results["t"] = p.t;
    results["mode"] = p.exact ? "exact" : "mc";
    results["orientation"] = to_string(orient);
    results["sequences"] = dr.sequences;
    results["max_residual_single"] = dr.max_residual_single;
    results["max_residual_set"] = dr.max_residual_set;
    results["linearity_mismatches"] = dr.linearity_mismatches;
    if (!p.exact) results["mc_stderr"] = dr.mc_stderr;
    json checks;
    if (p.exact) {
        checks["single_identity"] = dr.max_residual_single < 1e-12;
        checks["set_identity"] = dr.max_residual_set < 1e-12;
    }
    checks["linear"] = dr.linearity_mismatches == 0;
    json params{{"n", p.n}, {"t", p.t}, {"exact", p.exact}, {"samples", p.samples}};
    json rep = make_report("duality", p.seed, params, results, checks);
    write_json(output_path(p.out, "duality.json"), rep);
    return rep;
}

json run_window_census(const WindowCensusParams& p) {
    Rng rng(p.seed);
    Pattern pattern = parse_pattern(p.pattern);
    ChainState state(pattern, p.domain_len, &rng);
    auto census = window_census(state, rng, p.offset, p.width, p.samples);
    auto classes = complement_classes(census, p.width);
    uint64_t total = 0;
    for (auto& [k, v] : census) total += v;

    json results;
    results["total_samples"] = total;
    json raw = json::object(), cls = json::object();
    for (auto& [k, v] : census) raw[std::to_string(k)] = v;
    for (auto& [k, v] : classes) cls[std::to_string(k)] = v;
    results["patterns"] = raw;
    results["complement_classes"] = cls;

    if (!p.csv.empty()) {
        std::ostringstream csv;
        csv << "pattern,count,frequency\n";
        for (auto& [k, v] : census)
            csv << k << ',' << v << ',' << (total ? double(v) / double(total) : 0.0) << '\n';
        write_text_file(p.csv, csv.str());
    }

    json params{{"domain_len", p.domain_len}, {"offset", p.offset},   {"width", p.width},
                {"samples", p.samples},       {"pattern", p.pattern}};
    json rep = make_report("window-census", p.seed, params, results, json::object());
    write_json(output_path(p.out, "window_census.json"), rep);
    return rep;
}

} // namespace kmre
