#include "kmre/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "kmre/harmonic.hpp"

namespace kmre {

// ---------------------------------------------------------------------------
// law tables

LawTable jump1_law_exact(int64_t j) {
    if (j < 1) throw std::invalid_argument("jump1_law_exact: j must be >= 1");
    LawTable t;
    t.kind = LawTable::Kind::Jump1;
    t.survival = false;
    t.support.reserve(size_t(j));
    t.values.reserve(size_t(j));
    for (int64_t k = 1; k < j; ++k) {
        t.support.push_back(k);
        t.values.push_back(1.0 / (double(k) * double(k + 1)));
    }
    t.support.push_back(j);
    t.values.push_back(1.0 / double(j));
    return t;
}

double theta_survival(int64_t j) {
    if (j < 1) throw std::invalid_argument("theta_survival: j must be >= 1");
    return harmonic(j) / double(j);
}

LawTable theta_survival_table(int64_t j_max) {
    if (j_max < 1) throw std::invalid_argument("theta_survival_table: j_max must be >= 1");
    LawTable t;
    t.kind = LawTable::Kind::Theta;
    t.survival = true;
    for (int64_t j = 1; j <= j_max; ++j) {
        t.support.push_back(j);
        t.values.push_back(theta_survival(j));
    }
    return t;
}

double s_increment_pmf(int64_t k) {
    if (k < 1) throw std::invalid_argument("s_increment_pmf: k must be >= 1");
    return 2.0 / (double(k + 1) * double(k + 2));
}

LawTable s_increment_table(int64_t k_max) {
    if (k_max < 1) throw std::invalid_argument("s_increment_table: k_max must be >= 1");
    LawTable t;
    t.kind = LawTable::Kind::SIncrement;
    t.survival = false;
    for (int64_t k = 1; k <= k_max; ++k) {
        t.support.push_back(k);
        t.values.push_back(s_increment_pmf(k));
    }
    return t;
}

LawTable s_total_pmf(int64_t m_max) {
    if (m_max < 0) throw std::invalid_argument("s_total_pmf: m_max must be >= 0");
    LawTable t;
    t.kind = LawTable::Kind::STotal;
    t.survival = false;
    std::vector<double> p(size_t(m_max) + 1, 0.0);
    p[0] = 0.5;
    for (int64_t m = 1; m <= m_max; ++m) {
        double acc = 0;
        for (int64_t k = 1; k <= m; ++k) acc += s_increment_pmf(k) * p[size_t(m - k)];
        p[size_t(m)] = 0.5 * acc;
    }
    for (int64_t m = 0; m <= m_max; ++m) {
        t.support.push_back(m);
        t.values.push_back(p[size_t(m)]);
    }
    return t;
}

LawTable s_plus_survival(const LawTable& s_pmf, int64_t shift, int64_t t_max) {
    if (s_pmf.kind != LawTable::Kind::STotal || s_pmf.survival)
        throw std::invalid_argument("s_plus_survival: expected the S pmf table");
    LawTable t;
    t.kind = LawTable::Kind::STotal;
    t.survival = true;
    // P(S + shift >= thr) = 1 - sum_{m < thr - shift} P(S = m)
    double cdf = 0;
    std::vector<double> surv_at; // survival of S at integer levels 0..
    surv_at.reserve(s_pmf.values.size() + 1);
    surv_at.push_back(1.0);
    for (double v : s_pmf.values) {
        cdf += v;
        surv_at.push_back(std::max(0.0, 1.0 - cdf));
    }
    for (int64_t thr = 1; thr <= t_max; ++thr) {
        int64_t level = thr - shift; // need S >= level
        double s;
        if (level <= 0) s = 1.0;
        else if (size_t(level) < surv_at.size()) s = surv_at[size_t(level)];
        else throw std::invalid_argument("s_plus_survival: pmf table too short for t_max");
        t.support.push_back(thr);
        t.values.push_back(s);
    }
    return t;
}

double conditional_zeros_bound(int64_t k, int64_t j) {
    if (k < 1 || j < 1) throw std::invalid_argument("conditional_zeros_bound: k, j must be >= 1");
    double v = double(k + 1) / double(k + j);
    return v > 1.0 ? 1.0 : v;
}

std::string law_table_csv(const LawTable& table) {
    static const char* names[] = {"jump1", "theta", "s_increment", "s_total", "empirical"};
    std::string out = "# kind=";
    out += names[size_t(table.kind)];
    out += table.survival ? " survival\n" : " pmf\n";
    out += "support,value\n";
    char line[64];
    for (size_t i = 0; i < table.support.size(); ++i) {
        std::snprintf(line, sizeof line, "%lld,%.17g\n", (long long)table.support[i],
                      table.values[i]);
        out += line;
    }
    return out;
}

// ---------------------------------------------------------------------------
// samplers

uint64_t sample_theta(Rng& rng, uint64_t* cap_hits) {
    const double u = rng.u01();
    // largest j with H_j / j >= u  (survival is strictly decreasing)
    auto surv = [](uint64_t j) { return harmonic(int64_t(j)) / double(j); };
    if (u > surv(2)) return 1;
    uint64_t lo = 2, hi = 4;
    bool capped = false;
    while (surv(hi) >= u) {
        lo = hi;
        if (hi >= kThetaSupportCap) { capped = true; break; }
        hi = std::min<uint64_t>(hi * 2, kThetaSupportCap);
    }
    if (capped) {
        if (cap_hits) ++*cap_hits;
        return kThetaSupportCap;
    }
    while (lo + 1 < hi) {
        uint64_t mid = lo + (hi - lo) / 2;
        if (surv(mid) >= u) lo = mid;
        else hi = mid;
    }
    return lo;
}

uint64_t sample_s_increment(Rng& rng) {
    // survival P(inc >= k) = 2/(k+1): invert
    const double u = rng.u01();
    double x = 2.0 / u - 1.0;
    if (x < 1.0) return 1;
    if (x >= 9.0e18) return 9000000000000000000ull;
    return uint64_t(x);
}

uint64_t sample_S(Rng& rng) {
    uint64_t s = 0;
    while (rng.coin()) s += sample_s_increment(rng); // G-1 failures before a success
    return s;
}

// ---------------------------------------------------------------------------
// dominance

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p in (0,1)");
    // Acklam's rational approximation, |rel err| < 1.15e-9
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
        q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

DominanceReport dominance_check_z(const LawTable& empirical, const LawTable& reference,
                                  uint64_t n_samples, double z) {
    if (!empirical.survival || !reference.survival)
        throw std::invalid_argument("dominance_check: both tables must be survival tables");
    if (empirical.support != reference.support)
        throw std::invalid_argument("dominance_check: mismatched supports");
    if (n_samples == 0) throw std::invalid_argument("dominance_check: n_samples must be > 0");
    DominanceReport rep;
    rep.z = z;
    rep.n_samples = n_samples;
    rep.max_violation = -1e300;
    for (size_t i = 0; i < empirical.support.size(); ++i) {
        double ref = reference.values[i];
        double margin = z * std::sqrt(std::max(ref * (1 - ref), 0.0) / double(n_samples)) +
                        0.5 / double(n_samples);
        double v = empirical.values[i] - (ref + margin);
        if (v > rep.max_violation) {
            rep.max_violation = v;
            rep.argmax = empirical.support[i];
        }
    }
    rep.pass = rep.max_violation <= 0;
    return rep;
}

DominanceReport dominance_check(const LawTable& empirical, const LawTable& reference,
                                uint64_t n_samples, double confidence) {
    return dominance_check_z(empirical, reference, n_samples, inverse_normal_cdf(confidence));
}

// ---------------------------------------------------------------------------
// speed

SpeedEstimate speed_estimate(const JumpTrace& trace, uint32_t batches) {
    if (trace.records.empty()) throw std::invalid_argument("speed_estimate: empty trace");
    if (trace.truncation_hit) throw std::invalid_argument("speed_estimate: truncated trace");
    if (batches < 2) batches = 2;
    SpeedEstimate est;
    est.n_jumps = trace.records.size();
    est.batches = batches;

    double total = 0;
    uint64_t next_cp = 1;
    double cp_min = 1e300, cp_max = -1e300;
    const uint64_t burn_in = std::min<uint64_t>(1024, est.n_jumps / 8 + 1);
    for (size_t i = 0; i < trace.records.size(); ++i) {
        total += trace.records[i].jump;
        uint64_t n = i + 1;
        if (n == next_cp || n == trace.records.size()) {
            double spd = total / trace.records[i].sigma;
            est.checkpoints.emplace_back(n, spd);
            if (n >= burn_in) {
                cp_min = std::min(cp_min, spd);
                cp_max = std::max(cp_max, spd);
            }
            if (n == next_cp) next_cp *= 2;
        }
    }
    est.checkpoint_min = cp_min;
    est.checkpoint_max = cp_max;

    const double sigma_n = trace.records.back().sigma;
    est.spd_sigma = total / sigma_n;
    est.spd_count = total / double(est.n_jumps);

    // batch means over sigma-normalized speeds
    if (est.n_jumps >= batches) {
        const uint64_t per = est.n_jumps / batches;
        std::vector<double> bm;
        bm.reserve(batches);
        double prev_sigma = 0;
        uint64_t idx = 0;
        for (uint32_t b = 0; b < batches; ++b) {
            uint64_t endi = (b == batches - 1) ? est.n_jumps : (idx + per);
            double jumps = 0;
            for (; idx < endi; ++idx) jumps += trace.records[idx].jump;
            double dsigma = trace.records[endi - 1].sigma - prev_sigma;
            prev_sigma = trace.records[endi - 1].sigma;
            bm.push_back(jumps / dsigma);
        }
        double mean = 0;
        for (double v : bm) mean += v;
        mean /= bm.size();
        double var = 0;
        for (double v : bm) var += (v - mean) * (v - mean);
        var /= (bm.size() - 1);
        est.stderr_sigma = std::sqrt(var / bm.size());
    }
    return est;
}

// ---------------------------------------------------------------------------
// Y_1 sampling harness

std::vector<uint64_t> sample_jump1(const Pattern& pattern, uint32_t domain_len, uint64_t n,
                                   Rng& rng, uint32_t k_max) {
    std::vector<uint64_t> counts(k_max + 1, 0);
    ChainState state(pattern, domain_len, &rng);
    for (uint64_t i = 0; i < n; ++i) {
        state.reset(pattern, &rng);
        for (;;) {
            Event ev = state.step(rng);
            if (ev.is_leading) {
                if (ev.jump <= k_max) ++counts[ev.jump];
                break;
            }
        }
    }
    return counts;
}

namespace {

// Collect first-step observables in parallel shards; hist[v] counts samples
// with value exactly v, hist[t_max+1] pools everything >= t_max+1 (censored
// window-edge measurements land there too, they exceed any tested threshold).
struct ShardResult {
    std::vector<uint64_t> hist;
    uint64_t censored = 0;
};

template <typename Measure>
SurvivalSample sample_y1_statistic(const Pattern& pattern, uint32_t domain_len, uint64_t n,
                                   Rng& rng, int64_t t_max, uint32_t n_threads,
                                   Measure&& measure) {
    if (t_max < 1) throw std::invalid_argument("sample_y1: t_max must be >= 1");
    if (n_threads < 1) n_threads = 1;
    std::vector<ShardResult> shards(n_threads);
    auto work = [&](uint32_t tid, uint64_t count, Rng shard_rng) {
        auto& out = shards[tid];
        out.hist.assign(size_t(t_max) + 2, 0);
        ChainState state(pattern, domain_len, &shard_rng);
        for (uint64_t i = 0; i < count; ++i) {
            state.reset(pattern, &shard_rng);
            for (;;) {
                Event ev = state.step(shard_rng);
                if (ev.is_leading) break;
            }
            auto [value, censored] = measure(state);
            if (censored) {
                ++out.censored;
                ++out.hist[size_t(t_max) + 1];
            } else {
                ++out.hist[size_t(std::min<int64_t>(value, t_max + 1))];
            }
        }
    };
    const Rng stream_base(rng.next()); // advance the caller's stream so repeated calls differ
    if (n_threads == 1) {
        work(0, n, stream_base.derive(1));
    } else {
        std::vector<std::thread> pool;
        uint64_t per = n / n_threads;
        for (uint32_t t = 0; t < n_threads; ++t) {
            uint64_t count = (t == n_threads - 1) ? n - per * (n_threads - 1) : per;
            pool.emplace_back(work, t, count, stream_base.derive(t + 1));
        }
        for (auto& th : pool) th.join();
    }

    std::vector<uint64_t> hist(size_t(t_max) + 2, 0);
    uint64_t censored = 0;
    for (const auto& s : shards) {
        censored += s.censored;
        for (size_t i = 0; i < hist.size(); ++i) hist[i] += s.hist[i];
    }

    SurvivalSample out;
    out.n_samples = n;
    out.censored = censored;
    out.survival.kind = LawTable::Kind::Empirical;
    out.survival.survival = true;
    uint64_t ge = 0;
    std::vector<uint64_t> ge_at(size_t(t_max) + 2, 0);
    for (int64_t v = t_max + 1; v >= 1; --v) {
        ge += hist[size_t(v)];
        ge_at[size_t(v)] = ge;
    }
    for (int64_t thr = 1; thr <= t_max; ++thr) {
        out.survival.support.push_back(thr);
        out.survival.values.push_back(double(ge_at[size_t(thr)]) / double(n));
    }
    return out;
}

} // namespace

SurvivalSample sample_zeros_star_y1(const Pattern& pattern, uint32_t domain_len, uint64_t n,
                                    Rng& rng, int64_t t_max, uint32_t n_threads) {
    return sample_y1_statistic(pattern, domain_len, n, rng, t_max, n_threads,
                               [](const ChainState& y1) -> std::pair<int64_t, bool> {
                                   uint32_t L = y1.domain_len();
                                   uint32_t q = y1.ones_run();
                                   if (q >= L - 1) return {0, true};
                                   uint32_t p = y1.raw_bits().first_one_from(q);
                                   if (p >= L) return {0, true}; // no 1 found in window
                                   return {int64_t(p - q), false};
                               });
}

SurvivalSample sample_ones_y1(const Pattern& pattern, uint32_t domain_len, uint64_t n,
                              Rng& rng, int64_t t_max, uint32_t n_threads) {
    return sample_y1_statistic(pattern, domain_len, n, rng, t_max, n_threads,
                               [](const ChainState& y1) -> std::pair<int64_t, bool> {
                                   uint32_t L = y1.domain_len();
                                   uint32_t q = y1.ones_run();
                                   if (q >= L - 1) return {0, true};
                                   return {int64_t(q), false};
                               });
}

} // namespace kmre
