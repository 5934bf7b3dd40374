#pragma once
// Mean-reward / maturation-time recursion over binary expansions.  Vertices
// are positive integers; the moves from x clear one set bit and complement
// everything below it, so every move strictly decreases x and a single
// ascending pass fills the table.  The speed lower bound is 1 + the minimum
// of a(x)/b(x) over the deepest level.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_set>
#include <vector>

namespace kmre {

struct BadSet {
    std::unordered_set<uint32_t> members;

    bool contains(uint32_t x) const { return members.count(x) != 0; }
    size_t size() const { return members.size(); }
};

// moves from x: for each set bit j, x ^ (2^{j+1} - 1); list length = popcount(x)
std::vector<uint32_t> transitions(uint32_t x);

// one less than the length of the leading run of 1s in the binary expansion
uint32_t reward(uint32_t x);

struct RewardTable {
    int depth = 0;                 // leaves are [2^depth, 2^{depth+1})
    std::vector<double> a, b;      // indexed by x < 2^{depth+1}
    BadSet bad;
    bool unit_base_at_one = false; // alternative base (a,b)(1) = (0,1)
};

struct RewardTableOptions {
    // The stock convention zero-initializes (a,b) at x = 1; applying the
    // recursion at x = 1 instead gives (0,1).  Both are supported so the
    // effect can be reported.
    bool unit_base_at_one = false;
};

RewardTable reward_table(int depth, const BadSet& bad, RewardTableOptions opts = {});

struct LeafMinimum {
    uint32_t x_min = 0;
    double ratio = 0;
};

// argmin/min of a(x)/b(x) over leaves; ties break to the smallest x.
// Throws if any leaf has b = 0 (bad set touched a leaf, or depth 0).
LeafMinimum leaf_minimum(const RewardTable& table);

double lower_bound(const RewardTable& table);

// max |(a,b)(x) - recursion(x)| over a sample of non-bad vertices; diagnostic
double recursion_residual(const RewardTable& table, uint32_t stride = 101);

// the stock bad-node set shipped with the tool (also in data/default_bad_set.txt)
BadSet default_bad_set();

// one integer per line; '#' starts a comment
BadSet parse_bad_set(std::istream& in);
BadSet load_bad_set(const std::string& path);

// Diagnostic reproduction of the internal-node minimum scan (nodes x with
// 71 < x < 2^depth and b > 0).
LeafMinimum internal_minimum(const RewardTable& table);

// Experimental heuristic, not part of the certified bound: greedily zero the
// lowest-ratio internal vertices above `floor_node` and keep the change when
// the leaf minimum improves.
BadSet greedy_bad_set(int depth, uint32_t rounds, uint32_t per_round, uint32_t floor_node = 71);

} // namespace kmre
