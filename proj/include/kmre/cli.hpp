#pragma once
// Experiment runners behind the command-line front end.  Each returns the
// JSON report it also writes to disk; embedded checks decide the exit code.

#include <cstdint>
#include <string>

#include "kmre/chain.hpp"
#include "kmre/report.hpp"

namespace kmre {

// "coin" | "single" | "allones:<r>" | "bits:<01...>"
Pattern parse_pattern(const std::string& text);

struct SimulateParams {
    uint32_t domain_len = 4096;
    uint64_t n_jumps = 1000000;
    double t_max = 0; // 0 = unused
    std::string pattern = "coin";
    uint64_t seed = 1;
    uint32_t batches = 32;
    std::string out;       // JSON path; default <outdir>/simulate.json
    std::string trace_csv; // optional CSV (n, sigma, jump)
};
json run_simulate(const SimulateParams& p);

struct ValidateLemmasParams {
    uint64_t samples = 100000;
    uint64_t seed = 1;
    uint32_t threads = 0; // 0 = hardware
    int64_t threshold_max = 50;
    double z = 4.0;
    std::string out;
    std::string tables_csv_prefix; // optional law-table dumps
};
json run_validate_lemmas(const ValidateLemmasParams& p);

struct LowerBoundParams {
    int depth = 18;
    std::string bad_set_path; // empty = stock set
    bool unit_base_at_one = false;
    std::string out;
    std::string leaf_csv; // optional leaf-ratio dump
};
json run_lower_bound(const LowerBoundParams& p);

struct UpperBoundParams {
    uint64_t cutoff = 10000; // J = K
    double tol = 1e-6;
    uint64_t mc_samples = 0; // 0 = skip the sampling cross-check
    uint64_t seed = 1;
    std::string out;
};
json run_upper_bound(const UpperBoundParams& p);

struct KmExactParams {
    uint32_t n = 12;
    uint32_t identity_n_max = 8;
    std::string out;
    std::string curve_csv; // optional (n, e_n, lower, upper) rows
};
json run_km_exact(const KmExactParams& p);

struct KmMcParams {
    uint32_t n = 1000;
    uint64_t replicas = 64;
    uint64_t seed = 1;
    uint32_t threads = 0;
    std::string out;
};
json run_km_mc(const KmMcParams& p);

struct DualityParams {
    uint32_t n = 3;
    uint32_t t = 4;
    bool exact = true;
    uint64_t samples = 10000;
    uint64_t seed = 1;
    std::string out;
};
json run_duality(const DualityParams& p);

struct WindowCensusParams {
    uint32_t domain_len = 4096;
    uint32_t offset = 2048;
    uint32_t width = 1;
    uint64_t samples = 100000;
    std::string pattern = "coin";
    uint64_t seed = 1;
    std::string out;
    std::string csv; // optional per-pattern counts
};
json run_window_census(const WindowCensusParams& p);

} // namespace kmre
