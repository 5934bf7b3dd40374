#pragma once
// Fixed-length bit sequence with O(log L) suffix complement, rank/select and
// first-zero/first-one queries, plus an O(L/64) physical left shift.
//
// Layout: a perfect binary tree over 64-bit words.  Every node keeps a ones
// count and a pending-complement flag; counts are always correct, a set flag
// means the node's children (or its word, for leaves) are stale.  Read paths
// never push flags, they carry the complement parity down instead.  A partly
// used last word can never acquire a flag (no whole-node flip covers it), so
// padding bits stay zero.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#if defined(__BMI2__)
#include <immintrin.h>
#endif

namespace kmre {

inline int select64(uint64_t x, unsigned k) {
    // position of the k-th (0-based) set bit; caller guarantees k < popcount(x)
#if defined(__BMI2__)
    return int(std::countr_zero(_pdep_u64(1ull << k, x)));
#else
    unsigned pos = 0;
    unsigned c = unsigned(std::popcount(uint32_t(x)));
    if (k >= c) { k -= c; pos += 32; x >>= 32; }
    c = unsigned(std::popcount(uint32_t(uint16_t(x))));
    if (k >= c) { k -= c; pos += 16; x >>= 16; }
    c = unsigned(std::popcount(uint32_t(uint8_t(x))));
    if (k >= c) { k -= c; pos += 8; x >>= 8; }
    for (;;) {
        if (x & 1) {
            if (k == 0) return int(pos);
            --k;
        }
        x >>= 1;
        ++pos;
    }
#endif
}

class FlipBits {
public:
    explicit FlipBits(uint32_t length) : len_(length) {
        if (length < 1) throw std::invalid_argument("FlipBits: length must be >= 1");
        uint32_t words = (length + 63) / 64;
        wcount_ = 1;
        while (wcount_ < words) wcount_ <<= 1;
        words_.assign(wcount_, 0);
        cnt_.assign(2 * wcount_, 0);
        flip_.assign(2 * wcount_, 0);
    }

    uint32_t length() const { return len_; }
    uint32_t ones() const { return cnt_[1]; }

    void clear() {
        std::fill(words_.begin(), words_.end(), 0);
        std::fill(cnt_.begin(), cnt_.end(), 0);
        std::fill(flip_.begin(), flip_.end(), 0);
    }

    void set(uint32_t i, bool v) {
        check_index(i);
        uint32_t w = i / 64;
        materialize_leaf_path(w);
        uint64_t m = 1ull << (i % 64);
        if (bool(words_[w] & m) != v) {
            words_[w] ^= m;
            update_leaf_count(w);
        }
    }

    bool get(uint32_t i) const {
        check_index(i);
        uint32_t node = 1, parity = 0, span = wcount_ * 64, lo = 0;
        while (node < wcount_) {
            parity ^= flip_[node];
            span >>= 1;
            if (i < lo + span) node = 2 * node;
            else { node = 2 * node + 1; lo += span; }
        }
        parity ^= flip_[node];
        uint64_t w = parity ? ~words_[node - wcount_] : words_[node - wcount_];
        return (w >> (i % 64)) & 1;
    }

    // Complement every bit in [from, length).  Push-free: complementing a
    // stored sub-range commutes with every pending flag above it, so only the
    // root-to-leaf path of `from` needs visiting (right siblings flip whole,
    // or descend once more when they straddle the logical end).
    void flip_suffix(uint32_t from) {
        if (from >= len_) return;
        uint32_t node = 1, lo = 0, span = wcount_ * 64;
        uint32_t path_node[32], path_span[32];
        int depth = 0;
        while (node < wcount_) {
            path_node[depth] = node;
            path_span[depth] = span;
            ++depth;
            span >>= 1;
            const uint32_t mid = lo + span;
            if (from < mid) {
                flip_whole(2 * node + 1, mid, span);
                node = 2 * node;
            } else {
                node = 2 * node + 1;
                lo = mid;
            }
        }
        flip_leaf_masked(node, lo, from);
        for (int d = depth - 1; d >= 0; --d) {
            const uint32_t nd = path_node[d];
            const uint32_t sum = cnt_[2 * nd] + cnt_[2 * nd + 1];
            cnt_[nd] = flip_[nd] ? path_span[d] - sum : sum;
        }
    }

    // Position of the k-th (0-based) set bit; caller guarantees k < ones().
    uint32_t select(uint32_t k) const {
        uint32_t node = 1, parity = 0, span = wcount_ * 64, lo = 0;
        while (node < wcount_) {
            parity ^= flip_[node];
            span >>= 1;
            uint32_t left = 2 * node;
            uint32_t eff = parity ? span - cnt_[left] : cnt_[left];
            if (k < eff) node = left;
            else { k -= eff; node = left + 1; lo += span; }
        }
        parity ^= flip_[node];
        uint64_t w = parity ? ~words_[node - wcount_] : words_[node - wcount_];
        return lo + select64(w, k);
    }

    // Locate the k-th set bit and complement everything from it rightwards in
    // one descent (the flip path is exactly the select path).  Returns the
    // selected position.  Caller guarantees k < ones().
    uint32_t select_and_flip_suffix(uint32_t k) {
        uint32_t node = 1, lo = 0, span = wcount_ * 64, parity = 0;
        uint32_t path_node[32], path_span[32];
        int depth = 0;
        if (len_ == wcount_ * 64) {
            // aligned capacity: every right sibling is fully flippable, so the
            // descent runs branch-free (conditional-move stores both ways)
            while (node < wcount_) {
                path_node[depth] = node;
                path_span[depth] = span;
                ++depth;
                parity ^= flip_[node];
                span >>= 1;
                const uint32_t left = 2 * node;
                const uint32_t eff = parity ? span - cnt_[left] : cnt_[left];
                const uint32_t right = k >= eff;
                const uint32_t sib = left + 1;
                cnt_[sib] = right ? cnt_[sib] : span - cnt_[sib];
                flip_[sib] ^= uint8_t(1 - right);
                k -= right ? eff : 0;
                lo += right ? span : 0;
                node = left + right;
            }
        } else {
            while (node < wcount_) {
                path_node[depth] = node;
                path_span[depth] = span;
                ++depth;
                parity ^= flip_[node];
                span >>= 1;
                const uint32_t left = 2 * node;
                const uint32_t eff = parity ? span - cnt_[left] : cnt_[left];
                if (k < eff) {
                    flip_whole(left + 1, lo + span, span);
                    node = left;
                } else {
                    k -= eff;
                    node = left + 1;
                    lo += span;
                }
            }
        }
        materialize_leaf(node);
        const uint32_t wi = node - wcount_;
        const uint64_t eff_word = parity ? ~words_[wi] : words_[wi];
        const uint32_t pos_in = uint32_t(select64(eff_word, k));
        const uint32_t b = (len_ < lo + 64 ? len_ : lo + 64) - lo;
        words_[wi] ^= mask_from(pos_in) & (b < 64 ? mask_below(b) : ~0ull);
        cnt_[node] = uint32_t(std::popcount(words_[wi]));
        for (int d = depth - 1; d >= 0; --d) {
            const uint32_t nd = path_node[d];
            const uint32_t sum = cnt_[2 * nd] + cnt_[2 * nd + 1];
            cnt_[nd] = flip_[nd] ? path_span[d] - sum : sum;
        }
        return lo + pos_in;
    }

    // Smallest p >= from with bit(p) == 0, or length() when none exists.
    uint32_t first_zero_from(uint32_t from) const {
        return first_from<false>(1, 0, wcount_ * 64, from, 0);
    }

    // Smallest p >= from with bit(p) == 1, or length() when none exists.
    uint32_t first_one_from(uint32_t from) const {
        return first_from<true>(1, 0, wcount_ * 64, from, 0);
    }

    uint32_t count_range(uint32_t lo, uint32_t hi) const {
        if (lo > hi || hi > len_) throw std::out_of_range("FlipBits::count_range");
        if (lo == hi) return 0;
        return count_node(1, 0, wcount_ * 64, lo, hi, 0);
    }

    // Shift whole content left by s bits, filling with zeros on the right.
    void shift_left(uint32_t s) {
        if (s == 0) return;
        materialize_all();
        if (s >= len_) {
            std::fill(words_.begin(), words_.end(), 0);
        } else {
            uint32_t ws = s / 64, bs = s % 64;
            for (uint32_t d = 0; d < wcount_; ++d) {
                uint64_t lo = (d + ws < wcount_) ? words_[d + ws] : 0;
                uint64_t hi = (d + ws + 1 < wcount_) ? words_[d + ws + 1] : 0;
                words_[d] = bs ? (lo >> bs) | (hi << (64 - bs)) : lo;
            }
            mask_tail();
        }
        rebuild_counts();
    }

    // Replace content with the given bits (index 0 first); rest zeroed.
    void assign(const std::vector<bool>& bits) {
        if (bits.size() > len_) throw std::invalid_argument("FlipBits::assign: too many bits");
        std::fill(words_.begin(), words_.end(), 0);
        std::fill(flip_.begin(), flip_.end(), 0);
        for (size_t i = 0; i < bits.size(); ++i)
            if (bits[i]) words_[i / 64] |= 1ull << (i % 64);
        rebuild_counts();
    }

    // width-bit window read MSB-first starting at `offset`.
    uint64_t read_window(uint32_t offset, uint32_t width) const {
        if (width > 64 || offset + width > len_) throw std::out_of_range("FlipBits::read_window");
        uint64_t v = 0;
        for (uint32_t i = 0; i < width; ++i)
            v = (v << 1) | uint64_t(get(offset + i));
        return v;
    }

private:
    uint32_t len_;
    uint32_t wcount_; // power of two
    std::vector<uint64_t> words_;
    std::vector<uint32_t> cnt_;
    std::vector<uint8_t> flip_;

    void check_index(uint32_t i) const {
        if (i >= len_) throw std::out_of_range("FlipBits: index out of range");
    }

    static uint64_t mask_from(uint32_t b) { return ~0ull << b; }                   // bits >= b
    static uint64_t mask_below(uint32_t b) { return b ? (~0ull >> (64 - b)) : 0; } // bits < b

    void mask_tail() {
        uint32_t w = len_ / 64, b = len_ % 64;
        if (b) words_[w] &= mask_below(b), ++w;
        for (; w < wcount_; ++w) words_[w] = 0;
    }

    void update_leaf_count(uint32_t w) {
        uint32_t node = wcount_ + w;
        cnt_[node] = uint32_t(std::popcount(words_[w]));
        for (node >>= 1; node; node >>= 1)
            cnt_[node] = cnt_[2 * node] + cnt_[2 * node + 1];
    }

    // Move node's pending flip one level down (children counts flip, their
    // flags toggle).  Node must be internal.
    void push(uint32_t node, uint32_t span) {
        if (!flip_[node]) return;
        uint32_t half = span / 2;
        for (uint32_t c = 2 * node; c <= 2 * node + 1; ++c) {
            cnt_[c] = half - cnt_[c];
            flip_[c] ^= 1;
        }
        flip_[node] = 0;
    }

    void materialize_leaf(uint32_t node) {
        if (flip_[node]) {
            words_[node - wcount_] = ~words_[node - wcount_];
            flip_[node] = 0;
        }
    }

    // complement bits [max(lo,from), min(lo+64, len_)) inside a leaf
    void flip_leaf_masked(uint32_t node, uint32_t lo, uint32_t from) {
        if (lo >= len_) return;
        materialize_leaf(node);
        const uint32_t w = node - wcount_;
        const uint32_t a = from > lo ? from - lo : 0;
        const uint32_t b = (len_ < lo + 64 ? len_ : lo + 64) - lo;
        words_[w] ^= mask_from(a) & (b < 64 ? mask_below(b) : ~0ull);
        cnt_[node] = uint32_t(std::popcount(words_[w]));
    }

    // complement the whole subtree range [lo, lo+span), clipped to len_
    void flip_whole(uint32_t node, uint32_t lo, uint32_t span) {
        if (lo >= len_) return;
        if (lo + span <= len_) {
            cnt_[node] = span - cnt_[node];
            flip_[node] ^= 1;
            return;
        }
        if (node >= wcount_) {
            flip_leaf_masked(node, lo, 0);
            return;
        }
        flip_whole(2 * node, lo, span / 2);
        flip_whole(2 * node + 1, lo + span / 2, span / 2);
        const uint32_t sum = cnt_[2 * node] + cnt_[2 * node + 1];
        cnt_[node] = flip_[node] ? span - sum : sum;
    }

    // `parity` is the pending-complement parity strictly above `node`:
    // cnt_[node] already reflects the node's own flag, the stored word at a
    // leaf does not.
    template <bool WantOne>
    uint32_t first_from(uint32_t node, uint32_t lo, uint32_t span, uint32_t from,
                        uint32_t parity) const {
        uint32_t hi = lo + span;
        if (hi <= from || lo >= len_) return len_;
        uint32_t eff = parity ? span - cnt_[node] : cnt_[node];
        if (WantOne ? eff == 0 : eff == span) return len_;
        uint32_t below = parity ^ flip_[node];
        if (node >= wcount_) {
            uint64_t w = below ? ~words_[node - wcount_] : words_[node - wcount_];
            if (!WantOne) w = ~w;
            uint32_t a = from > lo ? from - lo : 0;
            uint32_t b = (len_ < hi ? len_ : hi) - lo;
            w &= mask_from(a) & (b < 64 ? mask_below(b) : ~0ull);
            if (!w) return len_;
            return lo + uint32_t(std::countr_zero(w));
        }
        uint32_t r = first_from<WantOne>(2 * node, lo, span / 2, from, below);
        if (r < len_) return r;
        return first_from<WantOne>(2 * node + 1, lo + span / 2, span / 2, from, below);
    }

    uint32_t count_node(uint32_t node, uint32_t lo, uint32_t span, uint32_t l, uint32_t r,
                        uint32_t parity) const {
        uint32_t hi = lo + span;
        if (hi <= l || lo >= r) return 0;
        if (l <= lo && hi <= r && hi <= len_)
            return parity ? span - cnt_[node] : cnt_[node];
        uint32_t below = parity ^ flip_[node];
        if (node >= wcount_) {
            uint64_t w = below ? ~words_[node - wcount_] : words_[node - wcount_];
            uint32_t a = l > lo ? l - lo : 0;
            uint32_t b = ((r < hi ? r : hi) < len_ ? (r < hi ? r : hi) : len_) - lo;
            w &= mask_from(a) & (b < 64 ? mask_below(b) : ~0ull);
            return uint32_t(std::popcount(w));
        }
        return count_node(2 * node, lo, span / 2, l, r, below) +
               count_node(2 * node + 1, lo + span / 2, span / 2, l, r, below);
    }

    void materialize_leaf_path(uint32_t w) {
        uint32_t target = wcount_ + w;
        int h = std::countr_zero(wcount_);
        for (int d = h; d >= 1; --d) push(target >> d, 64u << d);
        materialize_leaf(target);
    }

    void materialize_all() {
        for (uint32_t node = 1; node < wcount_; ++node) push(node, subspan(node));
        for (uint32_t node = wcount_; node < 2 * wcount_; ++node) materialize_leaf(node);
    }

    uint32_t subspan(uint32_t node) const {
        uint32_t span = wcount_ * 64;
        while (node > 1) { span >>= 1; node >>= 1; }
        return span;
    }

    void rebuild_counts() {
        for (uint32_t w = 0; w < wcount_; ++w)
            cnt_[wcount_ + w] = uint32_t(std::popcount(words_[w]));
        for (uint32_t node = wcount_ - 1; node >= 1; --node) {
            cnt_[node] = cnt_[2 * node] + cnt_[2 * node + 1];
            if (node == 1) break;
        }
    }
};

} // namespace kmre
