#include "kmre/chain.hpp"

#include <stdexcept>

namespace kmre {

Pattern Pattern::explicit_bits(const std::string& s) {
    Pattern p;
    p.kind = Kind::Explicit;
    p.bits.reserve(s.size());
    for (char c : s) {
        if (c == '0') p.bits.push_back(false);
        else if (c == '1') p.bits.push_back(true);
        else throw std::invalid_argument("Pattern: bits must be 0/1");
    }
    return p;
}

ChainState::ChainState(const Pattern& pattern, uint32_t domain_len, Rng* rng)
    : bits_(domain_len) {
    if (domain_len < 2) throw std::invalid_argument("ChainState: domain_len must be >= 2");
    load(pattern, rng);
}

void ChainState::load(const Pattern& pattern, Rng* rng) {
    const uint32_t L = bits_.length();
    bits_.clear();
    switch (pattern.kind) {
        case Pattern::Kind::AllOnes: {
            if (pattern.run < 1 || pattern.run > L)
                throw std::invalid_argument("ChainState: all-ones run must be in [1, L]");
            std::vector<bool> b(pattern.run, true);
            bits_.assign(b);
            break;
        }
        case Pattern::Kind::SingleOne:
            bits_.set(0, true);
            break;
        case Pattern::Kind::Coin: {
            if (!rng) throw std::invalid_argument("ChainState: coin pattern needs an rng");
            std::vector<bool> b(L);
            b[0] = true;
            for (uint32_t i = 1; i < L; ++i) b[i] = rng->coin();
            bits_.assign(b);
            break;
        }
        case Pattern::Kind::Explicit: {
            if (pattern.bits.size() > L)
                throw std::invalid_argument("ChainState: pattern longer than domain");
            if (pattern.bits.empty() || !pattern.bits[0])
                throw std::invalid_argument("ChainState: pattern must begin with a 1");
            bits_.assign(pattern.bits);
            break;
        }
    }
    origin_ = 0;
    truncated_ = false;
}

void ChainState::reset(const Pattern& pattern, Rng* rng) { load(pattern, rng); }

uint32_t ChainState::ones_run() const {
    if (bits_.ones() == 0) throw std::logic_error("ones_run: all-zero state");
    return bits_.first_zero_from(1);
}

uint32_t ChainState::zeros_run() const {
    if (bits_.ones() == 0) throw std::logic_error("zeros_run: all-zero state");
    uint32_t p = bits_.first_one_from(1);
    return p - 1;
}

uint32_t ChainState::zeros_star() const {
    uint32_t q = ones_run();
    if (q >= bits_.length()) return bits_.length(); // censored
    uint32_t p = bits_.first_one_from(q);
    return p - q; // == domain_len - q when censored; callers treat >= len-q as censored
}

Event ChainState::step(Rng& rng) {
    const uint32_t m = bits_.ones();
    if (m == 0) throw std::logic_error("step: absorbed (all-zero state)");
    Event ev;
    ev.dt = rng.exponential(double(m));
    const uint32_t k = uint32_t(rng.below(m));
    if (k == 0) {
        // bit 0 is always 1 in a normalized state, so k == 0 is the leading clock
        if (!bits_.get(0)) throw std::logic_error("step: state lost normalization");
        ev.position = 0;
        ev.is_leading = true;
        const uint32_t run = bits_.first_zero_from(1);
        ev.jump = run;
        if (run >= bits_.length() - 1) truncated_ = true;
        bits_.flip_suffix(0);
        bits_.shift_left(run);
        origin_ += run;
    } else {
        ev.position = bits_.select_and_flip_suffix(k);
    }
    return ev;
}

JumpTrace ChainState::run(Rng& rng, const StopRule& stop) {
    JumpTrace trace;
    double t = 0;
    const uint64_t limit = stop.n_leading_flips;
    if (limit > 0) trace.records.reserve(limit);
    while (true) {
        if (limit > 0 && trace.records.size() >= limit) break;
        if (stop.t_max && t >= *stop.t_max) break;
        if (limit == 0 && !stop.t_max) break;
        if (bits_.ones() == 0) {
            trace.absorbed = true;
            break;
        }
        Event ev = step(rng);
        t += ev.dt;
        ++trace.total_events;
        if (truncated_) {
            // the run measurement at the edge is unreliable; stop without it
            trace.truncation_hit = true;
            break;
        }
        if (ev.is_leading) {
            if (stop.t_max && t >= *stop.t_max) break; // event past the horizon
            trace.records.push_back({t, ev.jump});
        }
    }
    trace.final_time = t;
    return trace;
}

std::map<uint64_t, uint64_t> window_census(ChainState& state, Rng& rng, uint32_t offset,
                                           uint32_t width, uint64_t n_samples) {
    if (offset + width > state.domain_len())
        throw std::invalid_argument("window_census: window outside domain");
    std::map<uint64_t, uint64_t> counts;
    if (width == 0 || n_samples == 0) return counts;
    ++counts[state.window(offset, width)];
    uint64_t taken = 1;
    while (taken < n_samples) {
        if (state.ones_count() == 0 || state.truncation_hit()) break;
        Event ev = state.step(rng);
        if (ev.is_leading) {
            ++counts[state.window(offset, width)];
            ++taken;
        }
    }
    return counts;
}

std::map<uint64_t, uint64_t> complement_classes(const std::map<uint64_t, uint64_t>& census,
                                                uint32_t width) {
    std::map<uint64_t, uint64_t> classes;
    const uint64_t mask = width == 64 ? ~0ull : ((1ull << width) - 1);
    for (const auto& [pat, n] : census) {
        uint64_t comp = ~pat & mask;
        classes[pat < comp ? pat : comp] += n;
    }
    return classes;
}

} // namespace kmre
