#pragma once
// Finite bit-model of the cube walk: random-edge and suppressed-step moves,
// exact expected-step dynamic programs, the averaged step-count identity, and
// the simultaneous GF(2)-linear coupling with its rank/kernel duality checks.
//
// Coordinates are 1-based in reports, 0-based in code; index 0 is the
// leftmost (most significant) position and "right" means larger index.

#include <cstdint>
#include <string>
#include <vector>

#include "kmre/rng.hpp"

namespace kmre {

// bit word of length n, index 0 leftmost; flip_suffix(i) complements [i, n)
struct CubeState {
    uint32_t n = 0;
    std::vector<uint64_t> w;

    static CubeState zero(uint32_t n);
    static CubeState uniform(uint32_t n, Rng& rng);
    static CubeState ones_suffix(uint32_t n, uint32_t r);  // 1s on the last r coordinates
    static CubeState ones_prefix(uint32_t n, uint32_t r);  // 1s on the first r coordinates

    bool get(uint32_t i) const { return (w[i / 64] >> (i % 64)) & 1; }
    void set(uint32_t i, bool v) {
        if (v) w[i / 64] |= 1ull << (i % 64);
        else w[i / 64] &= ~(1ull << (i % 64));
    }
    uint32_t popcount() const;
    bool is_zero() const;
    void flip_suffix(uint32_t i);
    uint32_t select_one(uint32_t k) const; // index of k-th set bit
    uint64_t value_bits() const;           // n <= 64: numeric value, index 0 = MSB
};

// flip a uniformly chosen 1 and everything right of it; returns the index.
// Pre: nonzero state.
uint32_t random_edge_step(CubeState& state, Rng& rng);

struct SuppressedStep {
    uint32_t coordinate = 0;
    bool effective = false;
};

// pick a uniform coordinate; flip its suffix when it holds a 1, else no-op
SuppressedStep suppressed_step(CubeState& state, Rng& rng);

// exact expected number of effective random-edge steps to reach all-zeros,
// averaged over all 2^n starting words.  Pre: n <= 24.
double expected_steps_dp(uint32_t n);
std::vector<double> expected_steps_table(uint32_t n); // per-start expectations

// bounds n^2/(4 H_{n+1} - 1) <= E_n <= n(n+1)/2
struct EnBounds {
    double lower = 0, upper = 0;
};
EnBounds en_bounds(uint32_t n);

enum class LStarConvention {
    PadLeftZeros,      // the r ones sit in an n-cube; steps draw from all n coordinates
    StandaloneLengthR, // the walk lives in an r-cube
};
std::string to_string(LStarConvention c);

// expected suppressed-inclusive step count from the all-ones word of length r
// to the minimum.  Pre: r <= n <= 24.
double l_star_dp(uint32_t r, uint32_t n, LStarConvention convention);

struct IdentityReport {
    uint32_t n = 0;
    LStarConvention convention = LStarConvention::PadLeftZeros;
    double e_n = 0;
    double lstar_average = 0; // (1/2n) sum_r L*(x^r, n)
    double residual = 0;
};

IdentityReport step_count_identity(uint32_t n, LStarConvention convention);

struct ConventionResolution {
    LStarConvention selected = LStarConvention::PadLeftZeros;
    double max_residual_selected = 0;
    double max_residual_rejected = 0;
    uint32_t n_max = 0;
};

// Exact DP at n <= n_max decides which step-counting convention satisfies the
// averaged identity; throws if neither (or both) fit within 1e-10.
ConventionResolution resolve_lstar_convention(uint32_t n_max = 6);

struct McEnEstimate {
    double mean = 0;
    double stderr_ = 0;
    uint64_t replicas = 0;
    uint64_t seed = 0;
};

McEnEstimate en_simulate(uint32_t n, uint64_t replicas, Rng& rng, uint32_t n_threads = 1);

// ---------------------------------------------------------------------------
// GF(2) coupling

class Gf2Matrix {
public:
    explicit Gf2Matrix(uint32_t n); // identity
    uint32_t dim() const { return n_; }

    bool get(uint32_t row, uint32_t col) const;
    void set(uint32_t row, uint32_t col, bool v);

    // left-compose with the coordinate-`c` coupling map: rows [c, n) absorb
    // the old row c (row c itself becomes zero when it had the pivot).
    void apply_coupling(uint32_t c);

    // image of a starting word under the composed map
    CubeState apply(const CubeState& x) const;

    bool row_nonzero(uint32_t row) const;
    uint32_t rank() const;

    // rank of the submatrix of the given rows, and whether the all-ones
    // vector over those rows lies in its column span
    struct SpanInfo {
        uint32_t rank = 0;
        bool all_ones_in_span = false;
    };
    SpanInfo row_subset_span(const std::vector<uint32_t>& rows) const;

private:
    uint32_t n_;
    uint32_t words_;
    std::vector<uint64_t> rows_; // row-major, words_ per row
};

enum class DualOrientation { OnesSuffix, OnesPrefix };
std::string to_string(DualOrientation o);

struct DualityReport {
    uint32_t n = 0, t = 0;
    bool exact = true;
    uint64_t sequences = 0;
    DualOrientation orientation = DualOrientation::OnesSuffix;
    double max_residual_single = 0; // bit-r identity, max over r
    double max_residual_set = 0;    // rank-weighted identity, max over subsets A
    uint64_t linearity_mismatches = 0;
    double mc_stderr = 0;           // mc mode only
};

// Exact mode enumerates all n^t coordinate sequences (pre: feasible size) and
// verifies, with shared randomness, the single-bit and rank-weighted set
// identities plus trajectory/matrix agreement on every start.
DualityReport duality_check(uint32_t n, uint32_t t, bool exact, uint64_t samples, Rng& rng,
                            DualOrientation orientation = DualOrientation::OnesSuffix);

// Decide the orientation of the dual start words by exact enumeration.
DualOrientation resolve_dual_orientation();

} // namespace kmre
