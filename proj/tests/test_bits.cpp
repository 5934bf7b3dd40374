#include <doctest.h>

#include <vector>

#include "kmre/bits.hpp"
#include "kmre/rng.hpp"
#include "support/naive_chain.hpp"

using kmre::FlipBits;
using kmre::Rng;
using kmre::test::NaiveBits;

namespace {

void expect_equal(const FlipBits& fast, const NaiveBits& slow) {
    REQUIRE(fast.ones() == slow.ones());
    for (uint32_t i = 0; i < fast.length(); ++i) REQUIRE(fast.get(i) == slow.b[i]);
}

std::vector<bool> random_bits(uint32_t n, Rng& rng) {
    std::vector<bool> b(n);
    for (uint32_t i = 0; i < n; ++i) b[i] = rng.coin();
    return b;
}

} // namespace

TEST_CASE("select64 agrees with a bit scan") {
    Rng rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        uint64_t w = rng.next();
        if (trial < 64) w = 1ull << trial; // single-bit words
        const int pc = __builtin_popcountll(w);
        if (pc == 0) continue;
        const unsigned k = unsigned(rng.below(uint64_t(pc)));
        const int pos = kmre::select64(w, k);
        unsigned seen = 0;
        int expect = -1;
        for (int i = 0; i < 64; ++i) {
            if ((w >> i) & 1) {
                if (seen == k) {
                    expect = i;
                    break;
                }
                ++seen;
            }
        }
        REQUIRE(pos == expect);
    }
}

TEST_CASE("randomized mirror: flips, selects, shifts, queries") {
    for (uint32_t L : {5u, 31u, 64u, 100u, 257u, 1024u}) {
        Rng rng(1000 + L);
        FlipBits fast(L);
        NaiveBits slow(L);
        auto init = random_bits(L, rng);
        fast.assign(init);
        slow.b = init;
        expect_equal(fast, slow);

        for (int op = 0; op < 1500; ++op) {
            switch (rng.below(6)) {
                case 0: {
                    const uint32_t s = uint32_t(rng.below(L));
                    fast.flip_suffix(s);
                    slow.flip_suffix(s);
                    break;
                }
                case 1: {
                    const uint32_t i = uint32_t(rng.below(L));
                    const bool v = rng.coin();
                    fast.set(i, v);
                    slow.b[i] = v;
                    break;
                }
                case 2: {
                    if (fast.ones() == 0) break;
                    const uint32_t k = uint32_t(rng.below(fast.ones()));
                    REQUIRE(fast.select(k) == slow.select(k));
                    break;
                }
                case 3: {
                    const uint32_t s = uint32_t(rng.below(8));
                    fast.shift_left(s);
                    slow.shift_left(s);
                    break;
                }
                case 4: {
                    if (fast.ones() == 0) break;
                    const uint32_t k = uint32_t(rng.below(fast.ones()));
                    const uint32_t pos_slow = slow.select(k);
                    const uint32_t pos = fast.select_and_flip_suffix(k);
                    REQUIRE(pos == pos_slow);
                    slow.flip_suffix(pos_slow);
                    break;
                }
                default: {
                    const uint32_t i = uint32_t(rng.below(L));
                    REQUIRE(fast.first_zero_from(i) == slow.first_zero_from(i));
                    REQUIRE(fast.first_one_from(i) == slow.first_one_from(i));
                    const uint32_t a = uint32_t(rng.below(L));
                    const uint32_t b = a + uint32_t(rng.below(L - a + 1));
                    REQUIRE(fast.count_range(a, b) == slow.count_range(a, b));
                    break;
                }
            }
            if (op % 97 == 0) expect_equal(fast, slow);
        }
        expect_equal(fast, slow);
    }
}

TEST_CASE("suffix flip hand examples") {
    FlipBits f(5);
    f.assign({true, true, false, true, false}); // 11010
    f.flip_suffix(1);                           // -> 10101
    REQUIRE(f.get(0));
    REQUIRE(!f.get(1));
    REQUIRE(f.get(2));
    REQUIRE(!f.get(3));
    REQUIRE(f.get(4));

    FlipBits g(4);
    g.assign({true, false, false, false}); // 1000
    g.flip_suffix(0);                      // -> 0111
    REQUIRE(!g.get(0));
    REQUIRE(g.get(1));
    REQUIRE(g.get(2));
    REQUIRE(g.get(3));

    FlipBits h(3);
    h.assign({true, true, true}); // 111
    h.flip_suffix(2);             // -> 110
    REQUIRE(h.get(0));
    REQUIRE(h.get(1));
    REQUIRE(!h.get(2));
}

TEST_CASE("flip at a set bit strictly decreases the binary value") {
    Rng rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const uint32_t L = 3 + uint32_t(rng.below(120));
        NaiveBits before(L);
        before.b = random_bits(L, rng);
        if (before.ones() == 0) continue;
        NaiveBits after = before;
        const uint32_t k = uint32_t(rng.below(before.ones()));
        after.flip_suffix(after.select(k));
        REQUIRE(NaiveBits::compare(after, before) < 0);
    }
}

TEST_CASE("bounds checking") {
    FlipBits f(10);
    CHECK_THROWS(f.get(10));
    CHECK_THROWS(f.set(10, true));
    CHECK_THROWS(f.count_range(3, 11));
    CHECK_THROWS(FlipBits(0));
    CHECK_THROWS(f.read_window(8, 3));
}
