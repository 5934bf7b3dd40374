#pragma once
// Speed estimation from jump traces, the closed-form laws driving the chain
// (first-jump pmf, the heavy-tailed dominating variables Theta and S), and
// stochastic-dominance validation of empirical survival curves against them.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kmre/chain.hpp"
#include "kmre/rng.hpp"

namespace kmre {

// ---------------------------------------------------------------------------
// law tables

struct LawTable {
    enum class Kind { Jump1, Theta, SIncrement, STotal, Empirical };
    Kind kind = Kind::Empirical;
    bool survival = false;          // values are P(X >= support[i]) if true, pmf otherwise
    std::vector<int64_t> support;
    std::vector<double> values;
};

// pmf of the first jump from a state with j leading ones:
// P(jump = k) = 1/(k(k+1)) for k < j, P(jump = j) = 1/j; mean H_j.
LawTable jump1_law_exact(int64_t j);

// P(Theta >= j) = H_j / j
double theta_survival(int64_t j);
LawTable theta_survival_table(int64_t j_max);

// S-walk increments: P(inc = k) = 2/((k+1)(k+2)), k >= 1
double s_increment_pmf(int64_t k);
LawTable s_increment_table(int64_t k_max);

// pmf of S itself (a geometric(mean 2)-length sum of increments), computed
// from the generating-function recursion 2 p_m = sum_k c_k p_{m-k}, p_0 = 1/2.
LawTable s_total_pmf(int64_t m_max);
// P(S + shift >= t) for each threshold, from the exact pmf
LawTable s_plus_survival(const LawTable& s_pmf, int64_t shift, int64_t t_max);

// conditional bound P(zeros*(Y_1) >= j | jump_1 = k) <= (k+1)/(k+j)
double conditional_zeros_bound(int64_t k, int64_t j);

// CSV rendering, columns "support,value" with a kind header comment
std::string law_table_csv(const LawTable& table);

// ---------------------------------------------------------------------------
// samplers (inversion); Theta has a hard support cap with a hit counter

constexpr uint64_t kThetaSupportCap = 1000000000ull;

uint64_t sample_theta(Rng& rng, uint64_t* cap_hits = nullptr);
uint64_t sample_s_increment(Rng& rng);
uint64_t sample_S(Rng& rng);

// ---------------------------------------------------------------------------
// dominance

struct DominanceReport {
    bool pass = false;
    double max_violation = 0;   // max over support of emp - (ref + margin)
    int64_t argmax = 0;
    double z = 0;
    uint64_t n_samples = 0;
};

// pass iff empirical survival <= reference survival + binomial margin at every
// support point; margin = z * sqrt(ref(1-ref)/n) + 1/(2n), z from `confidence`.
DominanceReport dominance_check(const LawTable& empirical, const LawTable& reference,
                                uint64_t n_samples, double confidence);
DominanceReport dominance_check_z(const LawTable& empirical, const LawTable& reference,
                                  uint64_t n_samples, double z);

double inverse_normal_cdf(double p);

// ---------------------------------------------------------------------------
// speed

struct SpeedEstimate {
    uint64_t n_jumps = 0;
    double spd_sigma = 0;   // sum(jump) / sigma_n
    double spd_count = 0;   // sum(jump) / n
    double stderr_sigma = 0;
    uint32_t batches = 0;
    uint64_t seed = 0;
    // running spd at checkpoints n = 2^k, plus min/max past the burn-in;
    // no limit is claimed, these are liminf/limsup proxies only.
    std::vector<std::pair<uint64_t, double>> checkpoints;
    double checkpoint_min = 0;
    double checkpoint_max = 0;
};

SpeedEstimate speed_estimate(const JumpTrace& trace, uint32_t batches = 32);

// ---------------------------------------------------------------------------
// sampling harness for the first renormalized step Y_1

struct SurvivalSample {
    LawTable survival;        // empirical survival on thresholds [1..t_max]
    uint64_t n_samples = 0;
    uint64_t censored = 0;    // runs that touched the window edge (counted as >= every threshold)
};

// empirical pmf of jump_1 from a fresh `pattern` start; counts[k] for k in [1, k_max]
std::vector<uint64_t> sample_jump1(const Pattern& pattern, uint32_t domain_len, uint64_t n,
                                   Rng& rng, uint32_t k_max);

// empirical survival of zeros*(Y_1) on thresholds 1..t_max
SurvivalSample sample_zeros_star_y1(const Pattern& pattern, uint32_t domain_len, uint64_t n,
                                    Rng& rng, int64_t t_max, uint32_t n_threads = 1);

// empirical survival of ones(Y_1) on thresholds 1..t_max
SurvivalSample sample_ones_y1(const Pattern& pattern, uint32_t domain_len, uint64_t n,
                              Rng& rng, int64_t t_max, uint32_t n_threads = 1);

} // namespace kmre
