#include "kmre/km.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "kmre/bits.hpp"
#include "kmre/harmonic.hpp"

namespace kmre {

// ---------------------------------------------------------------------------
// CubeState

static uint32_t word_count(uint32_t n) { return (n + 63) / 64; }

CubeState CubeState::zero(uint32_t n) {
    if (n < 1) throw std::invalid_argument("CubeState: n must be >= 1");
    return {n, std::vector<uint64_t>(word_count(n), 0)};
}

CubeState CubeState::uniform(uint32_t n, Rng& rng) {
    CubeState s = zero(n);
    for (auto& word : s.w) word = rng.next();
    const uint32_t tail = n % 64;
    if (tail) s.w.back() &= (~0ull >> (64 - tail));
    return s;
}

CubeState CubeState::ones_suffix(uint32_t n, uint32_t r) {
    if (r > n) throw std::invalid_argument("ones_suffix: r > n");
    CubeState s = zero(n);
    for (uint32_t i = n - r; i < n; ++i) s.set(i, true);
    return s;
}

CubeState CubeState::ones_prefix(uint32_t n, uint32_t r) {
    if (r > n) throw std::invalid_argument("ones_prefix: r > n");
    CubeState s = zero(n);
    for (uint32_t i = 0; i < r; ++i) s.set(i, true);
    return s;
}

uint32_t CubeState::popcount() const {
    uint32_t c = 0;
    for (uint64_t word : w) c += uint32_t(std::popcount(word));
    return c;
}

bool CubeState::is_zero() const {
    for (uint64_t word : w)
        if (word) return false;
    return true;
}

void CubeState::flip_suffix(uint32_t i) {
    const uint32_t wi = i / 64, bi = i % 64;
    w[wi] ^= ~0ull << bi;
    for (uint32_t k = wi + 1; k < w.size(); ++k) w[k] = ~w[k];
    const uint32_t tail = n % 64;
    if (tail) w.back() &= (~0ull >> (64 - tail));
}

uint32_t CubeState::select_one(uint32_t k) const {
    for (uint32_t wi = 0; wi < w.size(); ++wi) {
        const uint32_t c = uint32_t(std::popcount(w[wi]));
        if (k < c) return wi * 64 + uint32_t(select64(w[wi], k));
        k -= c;
    }
    throw std::logic_error("select_one: k out of range");
}

uint64_t CubeState::value_bits() const {
    if (n > 64) throw std::invalid_argument("value_bits: n must be <= 64");
    uint64_t v = 0;
    for (uint32_t i = 0; i < n; ++i) v = (v << 1) | uint64_t(get(i));
    return v;
}

uint32_t random_edge_step(CubeState& state, Rng& rng) {
    const uint32_t m = state.popcount();
    if (m == 0) throw std::logic_error("random_edge_step: zero state is absorbing");
    const uint32_t i = state.select_one(uint32_t(rng.below(m)));
    state.flip_suffix(i);
    return i;
}

SuppressedStep suppressed_step(CubeState& state, Rng& rng) {
    SuppressedStep out;
    out.coordinate = uint32_t(rng.below(state.n));
    out.effective = state.get(out.coordinate);
    if (out.effective) state.flip_suffix(out.coordinate);
    return out;
}

// ---------------------------------------------------------------------------
// exact DPs.  States are word values with index 0 as MSB, so the transition
// "flip set bit j (significance) and everything below" is v ^ (2^{j+1}-1) and
// strictly decreases v; one ascending pass suffices.

std::vector<double> expected_steps_table(uint32_t n) {
    if (n < 1 || n > 24) throw std::invalid_argument("expected_steps: n must be in [1,24]");
    const uint64_t size = 1ull << n;
    std::vector<double> steps(size, 0.0);
    for (uint64_t v = 1; v < size; ++v) {
        double acc = 0;
        uint64_t rest = v;
        while (rest) {
            const int j = std::countr_zero(rest);
            acc += steps[v ^ ((2ull << j) - 1)];
            rest &= rest - 1;
        }
        steps[v] = 1.0 + acc / double(std::popcount(v));
    }
    return steps;
}

double expected_steps_dp(uint32_t n) {
    const auto steps = expected_steps_table(n);
    double acc = 0;
    for (double s : steps) acc += s;
    return acc / double(steps.size());
}

EnBounds en_bounds(uint32_t n) {
    EnBounds b;
    b.lower = double(n) * double(n) / (4.0 * harmonic(int64_t(n) + 1) - 1.0);
    b.upper = double(n) * double(n + 1) / 2.0;
    return b;
}

std::string to_string(LStarConvention c) {
    return c == LStarConvention::PadLeftZeros ? "pad-left-zeros" : "standalone-length-r";
}

double l_star_dp(uint32_t r, uint32_t n, LStarConvention convention) {
    if (r < 1 || r > n) throw std::invalid_argument("l_star_dp: need 1 <= r <= n");
    if (n > 24) throw std::invalid_argument("l_star_dp: n must be <= 24");
    const double n_eff = convention == LStarConvention::PadLeftZeros ? double(n) : double(r);
    const uint64_t size = 1ull << r;
    std::vector<double> l(size, 0.0);
    for (uint64_t v = 1; v < size; ++v) {
        double acc = 0;
        uint64_t rest = v;
        while (rest) {
            const int j = std::countr_zero(rest);
            acc += l[v ^ ((2ull << j) - 1)];
            rest &= rest - 1;
        }
        const uint32_t m = uint32_t(std::popcount(v));
        l[v] = n_eff / double(m) + acc / double(m);
    }
    return l[size - 1];
}

IdentityReport step_count_identity(uint32_t n, LStarConvention convention) {
    IdentityReport rep;
    rep.n = n;
    rep.convention = convention;
    rep.e_n = expected_steps_dp(n);
    double acc = 0;
    for (uint32_t r = 1; r <= n; ++r) acc += l_star_dp(r, n, convention);
    rep.lstar_average = acc / (2.0 * double(n));
    rep.residual = std::abs(rep.e_n - rep.lstar_average);
    return rep;
}

ConventionResolution resolve_lstar_convention(uint32_t n_max) {
    if (n_max < 2 || n_max > 16) throw std::invalid_argument("resolve_lstar_convention: n_max in [2,16]");
    double worst_pad = 0, worst_alone = 0;
    for (uint32_t n = 1; n <= n_max; ++n) {
        worst_pad = std::max(worst_pad, step_count_identity(n, LStarConvention::PadLeftZeros).residual);
        worst_alone =
            std::max(worst_alone, step_count_identity(n, LStarConvention::StandaloneLengthR).residual);
    }
    const double tol = 1e-10;
    const bool pad_ok = worst_pad < tol, alone_ok = worst_alone < tol;
    if (pad_ok == alone_ok)
        throw std::runtime_error("resolve_lstar_convention: identity does not discriminate");
    ConventionResolution res;
    res.n_max = n_max;
    if (pad_ok) {
        res.selected = LStarConvention::PadLeftZeros;
        res.max_residual_selected = worst_pad;
        res.max_residual_rejected = worst_alone;
    } else {
        res.selected = LStarConvention::StandaloneLengthR;
        res.max_residual_selected = worst_alone;
        res.max_residual_rejected = worst_pad;
    }
    return res;
}

McEnEstimate en_simulate(uint32_t n, uint64_t replicas, Rng& rng, uint32_t n_threads) {
    if (n < 1) throw std::invalid_argument("en_simulate: n must be >= 1");
    if (replicas < 2) throw std::invalid_argument("en_simulate: need at least 2 replicas");
    if (n_threads < 1) n_threads = 1;
    McEnEstimate est;
    est.replicas = replicas;
    est.seed = rng.seed();

    const Rng stream_base(rng.next());
    std::vector<double> sums(n_threads, 0.0), sumsqs(n_threads, 0.0);
    auto work = [&](uint32_t tid, uint64_t count, Rng shard_rng) {
        double sum = 0, sumsq = 0;
        for (uint64_t i = 0; i < count; ++i) {
            CubeState s = CubeState::uniform(n, shard_rng);
            uint64_t steps = 0;
            while (!s.is_zero()) {
                random_edge_step(s, shard_rng);
                ++steps;
            }
            sum += double(steps);
            sumsq += double(steps) * double(steps);
        }
        sums[tid] = sum;
        sumsqs[tid] = sumsq;
    };
    if (n_threads == 1) {
        work(0, replicas, stream_base.derive(1));
    } else {
        std::vector<std::thread> pool;
        const uint64_t per = replicas / n_threads;
        for (uint32_t t = 0; t < n_threads; ++t) {
            const uint64_t count = (t == n_threads - 1) ? replicas - per * (n_threads - 1) : per;
            pool.emplace_back(work, t, count, stream_base.derive(t + 1));
        }
        for (auto& th : pool) th.join();
    }
    double sum = 0, sumsq = 0;
    for (uint32_t t = 0; t < n_threads; ++t) {
        sum += sums[t];
        sumsq += sumsqs[t];
    }
    est.mean = sum / double(replicas);
    const double var = std::max(0.0, sumsq / double(replicas) - est.mean * est.mean);
    est.stderr_ = std::sqrt(var / double(replicas));
    return est;
}

// ---------------------------------------------------------------------------
// GF(2) coupling

Gf2Matrix::Gf2Matrix(uint32_t n) : n_(n), words_(word_count(n)) {
    if (n < 1) throw std::invalid_argument("Gf2Matrix: n must be >= 1");
    rows_.assign(size_t(n_) * words_, 0);
    for (uint32_t i = 0; i < n_; ++i) rows_[size_t(i) * words_ + i / 64] |= 1ull << (i % 64);
}

bool Gf2Matrix::get(uint32_t row, uint32_t col) const {
    return (rows_[size_t(row) * words_ + col / 64] >> (col % 64)) & 1;
}

void Gf2Matrix::set(uint32_t row, uint32_t col, bool v) {
    uint64_t& word = rows_[size_t(row) * words_ + col / 64];
    if (v) word |= 1ull << (col % 64);
    else word &= ~(1ull << (col % 64));
}

void Gf2Matrix::apply_coupling(uint32_t c) {
    if (c >= n_) throw std::invalid_argument("apply_coupling: coordinate out of range");
    std::vector<uint64_t> pivot(rows_.begin() + size_t(c) * words_,
                                rows_.begin() + size_t(c + 1) * words_);
    for (uint32_t i = c; i < n_; ++i) {
        uint64_t* row = rows_.data() + size_t(i) * words_;
        for (uint32_t k = 0; k < words_; ++k) row[k] ^= pivot[k];
    }
}

CubeState Gf2Matrix::apply(const CubeState& x) const {
    if (x.n != n_) throw std::invalid_argument("Gf2Matrix::apply: dimension mismatch");
    CubeState out = CubeState::zero(n_);
    for (uint32_t i = 0; i < n_; ++i) {
        const uint64_t* row = rows_.data() + size_t(i) * words_;
        uint64_t acc = 0;
        for (uint32_t k = 0; k < words_; ++k) acc ^= row[k] & x.w[k];
        out.set(i, std::popcount(acc) & 1);
    }
    return out;
}

bool Gf2Matrix::row_nonzero(uint32_t row) const {
    const uint64_t* r = rows_.data() + size_t(row) * words_;
    for (uint32_t k = 0; k < words_; ++k)
        if (r[k]) return true;
    return false;
}

namespace {

// rank of packed rows via elimination with column pivoting
uint32_t gf2_rank(std::vector<uint64_t>& rows, uint32_t n_rows, uint32_t words) {
    uint32_t rank = 0;
    for (uint32_t col = 0; col < words * 64 && rank < n_rows; ++col) {
        const uint32_t wi = col / 64;
        const uint64_t m = 1ull << (col % 64);
        uint32_t pivot = n_rows;
        for (uint32_t r = rank; r < n_rows; ++r) {
            if (rows[size_t(r) * words + wi] & m) {
                pivot = r;
                break;
            }
        }
        if (pivot == n_rows) continue;
        for (uint32_t k = 0; k < words; ++k)
            std::swap(rows[size_t(pivot) * words + k], rows[size_t(rank) * words + k]);
        for (uint32_t r = 0; r < n_rows; ++r) {
            if (r != rank && (rows[size_t(r) * words + wi] & m))
                for (uint32_t k = 0; k < words; ++k)
                    rows[size_t(r) * words + k] ^= rows[size_t(rank) * words + k];
        }
        ++rank;
    }
    return rank;
}

} // namespace

uint32_t Gf2Matrix::rank() const {
    std::vector<uint64_t> copy = rows_;
    return gf2_rank(copy, n_, words_);
}

Gf2Matrix::SpanInfo Gf2Matrix::row_subset_span(const std::vector<uint32_t>& rows) const {
    // Work with one extra column holding the all-ones target: solvability of
    // W x = 1 over GF(2) is rank(W) == rank([W | 1]).
    const uint32_t aug_words = word_count(n_ + 1);
    std::vector<uint64_t> sub(size_t(rows.size()) * aug_words, 0);
    for (size_t r = 0; r < rows.size(); ++r) {
        const uint64_t* src = rows_.data() + size_t(rows[r]) * words_;
        for (uint32_t k = 0; k < words_; ++k) sub[r * aug_words + k] = src[k];
        sub[r * aug_words + n_ / 64] |= 1ull << (n_ % 64); // target column
    }
    std::vector<uint64_t> plain = sub;
    for (size_t r = 0; r < rows.size(); ++r)
        plain[r * aug_words + n_ / 64] &= ~(1ull << (n_ % 64));
    SpanInfo info;
    info.rank = gf2_rank(plain, uint32_t(rows.size()), aug_words);
    std::vector<uint64_t> augmented = sub;
    const uint32_t aug_rank = gf2_rank(augmented, uint32_t(rows.size()), aug_words);
    info.all_ones_in_span = (aug_rank == info.rank);
    return info;
}

// ---------------------------------------------------------------------------
// duality

std::string to_string(DualOrientation o) {
    return o == DualOrientation::OnesSuffix ? "ones-suffix" : "ones-prefix";
}

DualityReport duality_check(uint32_t n, uint32_t t, bool exact, uint64_t samples, Rng& rng,
                            DualOrientation orientation) {
    DualityReport rep;
    rep.n = n;
    rep.t = t;
    rep.exact = exact;
    rep.orientation = orientation;
    if (n < 1) throw std::invalid_argument("duality_check: n must be >= 1");
    double seq_count_d = std::pow(double(n), double(t));
    if (exact && (n > 4 || t > 8 || seq_count_d > 70000.0))
        throw std::invalid_argument("duality_check: exact enumeration limited to n<=4, t<=8");
    if (n > 20) throw std::invalid_argument("duality_check: state enumeration limited to n<=20");

    const uint64_t n_states = 1ull << n;
    const uint64_t n_seq = exact ? uint64_t(seq_count_d + 0.5) : samples;
    rep.sequences = n_seq;

    // dual start words per coordinate r (1-based r = index r-1)
    std::vector<CubeState> xr;
    for (uint32_t r = 1; r <= n; ++r)
        xr.push_back(orientation == DualOrientation::OnesSuffix ? CubeState::ones_suffix(n, r)
                                                                : CubeState::ones_prefix(n, r));

    std::vector<double> lhs_bit(n, 0), rhs_bit(n, 0);
    const uint32_t n_subsets = uint32_t((1u << n) - 1);
    std::vector<double> lhs_set(n_subsets + 1, 0), rhs_set(n_subsets + 1, 0);

    std::vector<uint32_t> seq(t, 0);
    std::vector<uint64_t> ends(n_states); // bit-packed end state per start value
    for (uint64_t s = 0; s < n_seq; ++s) {
        if (exact) {
            uint64_t v = s;
            for (uint32_t i = 0; i < t; ++i) {
                seq[i] = uint32_t(v % n);
                v /= n;
            }
        } else {
            for (uint32_t i = 0; i < t; ++i) seq[i] = uint32_t(rng.below(n));
        }

        // shared-randomness suppressed walk from every start (value-packed,
        // index 0 = MSB so "suffix from c" is the low (n - c) value bits)
        for (uint64_t x = 0; x < n_states; ++x) {
            uint64_t state = x;
            for (uint32_t i = 0; i < t; ++i) {
                const uint32_t c = seq[i];
                const uint64_t bit = 1ull << (n - 1 - c);
                if (state & bit) state ^= (bit << 1) - 1;
            }
            ends[x] = state;
        }

        Gf2Matrix M(n);
        for (uint32_t i = 0; i < t; ++i) M.apply_coupling(seq[i]);

        // trajectory/matrix agreement on every start (exercises linearity)
        for (uint64_t x = 0; x < n_states; ++x) {
            CubeState cs = CubeState::zero(n);
            for (uint32_t i = 0; i < n; ++i) cs.set(i, (x >> (n - 1 - i)) & 1);
            if (M.apply(cs).value_bits() != ends[x]) ++rep.linearity_mismatches;
        }

        // single-bit: P_uniform(bit r at t) vs (1/2) P(x^r not yet absorbed)
        for (uint32_t r = 0; r < n; ++r) {
            uint64_t count = 0;
            const uint64_t bit = 1ull << (n - 1 - r);
            for (uint64_t x = 0; x < n_states; ++x) count += bool(ends[x] & bit);
            lhs_bit[r] += double(count) / double(n_states);
            rhs_bit[r] += 0.5 * double(!M.apply(xr[r]).is_zero());
        }

        // set identity: P_uniform(all ones on A at t) vs 2^{-rank} indicator
        for (uint32_t A = 1; A <= n_subsets; ++A) {
            uint64_t mask = 0;
            std::vector<uint32_t> rows;
            for (uint32_t r = 0; r < n; ++r) {
                if (A & (1u << r)) {
                    mask |= 1ull << (n - 1 - r);
                    rows.push_back(r);
                }
            }
            uint64_t count = 0;
            for (uint64_t x = 0; x < n_states; ++x) count += ((ends[x] & mask) == mask);
            lhs_set[A] += double(count) / double(n_states);

            // rows of the trajectory matrix: end states from x^{r+1}, r in A
            Gf2Matrix W(n);
            std::vector<uint32_t> wrows;
            for (size_t k = 0; k < rows.size(); ++k) {
                const CubeState end = M.apply(xr[rows[k]]);
                for (uint32_t c = 0; c < n; ++c) W.set(uint32_t(k), c, end.get(c));
                wrows.push_back(uint32_t(k));
            }
            const auto span = W.row_subset_span(wrows);
            rhs_set[A] += span.all_ones_in_span ? std::ldexp(1.0, -int(span.rank)) : 0.0;
        }
    }

    for (uint32_t r = 0; r < n; ++r)
        rep.max_residual_single = std::max(
            rep.max_residual_single, std::abs(lhs_bit[r] - rhs_bit[r]) / double(n_seq));
    for (uint32_t A = 1; A <= n_subsets; ++A)
        rep.max_residual_set =
            std::max(rep.max_residual_set, std::abs(lhs_set[A] - rhs_set[A]) / double(n_seq));
    if (!exact) rep.mc_stderr = 0.5 / std::sqrt(double(n_seq));
    return rep;
}

DualOrientation resolve_dual_orientation() {
    Rng dummy(1);
    double worst_suffix = 0, worst_prefix = 0;
    for (auto [n, t] : {std::pair<uint32_t, uint32_t>{2, 1}, {2, 2}, {3, 3}}) {
        worst_suffix = std::max(worst_suffix,
                                duality_check(n, t, true, 0, dummy, DualOrientation::OnesSuffix)
                                    .max_residual_single);
        worst_prefix = std::max(worst_prefix,
                                duality_check(n, t, true, 0, dummy, DualOrientation::OnesPrefix)
                                    .max_residual_single);
    }
    const double tol = 1e-12;
    const bool suffix_ok = worst_suffix < tol, prefix_ok = worst_prefix < tol;
    if (suffix_ok == prefix_ok)
        throw std::runtime_error("resolve_dual_orientation: enumeration does not discriminate");
    return suffix_ok ? DualOrientation::OnesSuffix : DualOrientation::OnesPrefix;
}

} // namespace kmre
