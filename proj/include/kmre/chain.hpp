#pragma once
// Event-driven simulation of the bit-flip chain, normalized so the leading 1
// sits at local index 0.  Clocks exist only at 1 bits: a ring waits
// Exp(#ones) and picks a uniform one (rings at 0 bits change nothing, and by
// memorylessness the reduction is exact).  A ring at index 0 is a leading
// event: the run length of leading ones is the jump, the window then shifts
// by that amount and fills with zeros on the right.
//
// Validity: bits inside the window evolve exactly (sites to the right never
// influence them); measurements are trustworthy until a leading-one run
// touches the right edge, which sets truncation_hit.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmre/bits.hpp"
#include "kmre/rng.hpp"

namespace kmre {

struct Pattern {
    enum class Kind { AllOnes, SingleOne, Coin, Explicit };
    Kind kind = Kind::SingleOne;
    uint32_t run = 1;           // AllOnes prefix length
    std::vector<bool> bits;     // Explicit

    static Pattern all_ones(uint32_t r) { return {Kind::AllOnes, r, {}}; }
    static Pattern single_one() { return {Kind::SingleOne, 1, {}}; }
    static Pattern coin() { return {Kind::Coin, 0, {}}; }
    static Pattern explicit_bits(const std::string& s);
};

struct Event {
    double dt = 0;
    uint32_t position = 0;
    bool is_leading = false;
    uint32_t jump = 0; // leading events only; run of leading ones at flip time
};

struct JumpRecord {
    double sigma;
    uint32_t jump;
};

struct JumpTrace {
    std::vector<JumpRecord> records;
    bool truncation_hit = false;
    bool absorbed = false;
    double final_time = 0;
    uint64_t total_events = 0;
};

struct StopRule {
    uint64_t n_leading_flips = 0;                // 0 means "no count limit"
    std::optional<double> t_max;

    static StopRule leading_flips(uint64_t n) { return {n, std::nullopt}; }
    static StopRule time_limit(double t) { return {0, t}; }
};

class ChainState {
public:
    // Normalized state on a window of `domain_len` bits; pattern must start
    // with a 1 and fit the window.  A Coin pattern needs the rng.
    ChainState(const Pattern& pattern, uint32_t domain_len, Rng* rng = nullptr);

    uint32_t domain_len() const { return bits_.length(); }
    int64_t origin_offset() const { return origin_; }
    bool truncation_hit() const { return truncated_; }
    uint32_t ones_count() const { return bits_.ones(); }
    bool bit(uint32_t i) const { return bits_.get(i); }

    // run of leading 1s: inf{j>=1 : bit(j)=0}; == domain_len when censored
    uint32_t ones_run() const;
    // zeros immediately after the leading 1: -1 + inf{j>=1 : bit(j)=1}
    uint32_t zeros_run() const;
    // zeros after the first block of ones; >= 1 always
    uint32_t zeros_star() const;

    // One effective event.  Pre: nonzero state.
    Event step(Rng& rng);

    // Simulate until the stop rule, absorption or truncation.
    JumpTrace run(Rng& rng, const StopRule& stop);

    // Reset to a fresh pattern, keeping the allocation.
    void reset(const Pattern& pattern, Rng* rng = nullptr);

    uint64_t window(uint32_t offset, uint32_t width) const {
        return bits_.read_window(offset, width);
    }

    const FlipBits& raw_bits() const { return bits_; }

private:
    FlipBits bits_;
    int64_t origin_ = 0;
    bool truncated_ = false;

    void load(const Pattern& pattern, Rng* rng);
};

// Pattern frequencies of a width-bit window sampled at the renormalized
// states Y_0, Y_1, ..., Y_{n_samples-1}.  Keys read the window MSB-first.
std::map<uint64_t, uint64_t> window_census(ChainState& state, Rng& rng, uint32_t offset,
                                           uint32_t width, uint64_t n_samples);

// Fold a raw census into complement-identified classes (a pattern and its
// complement share the class keyed by the smaller value).
std::map<uint64_t, uint64_t> complement_classes(const std::map<uint64_t, uint64_t>& census,
                                                uint32_t width);

} // namespace kmre
