#include "kmre/reward_tree.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace kmre {

std::vector<uint32_t> transitions(uint32_t x) {
    if (x == 0) throw std::invalid_argument("transitions: x must be >= 1");
    std::vector<uint32_t> out;
    out.reserve(size_t(std::popcount(x)));
    uint32_t rest = x;
    while (rest) {
        const int j = std::countr_zero(rest);
        out.push_back(x ^ ((2u << j) - 1));
        rest &= rest - 1;
    }
    return out;
}

uint32_t reward(uint32_t x) {
    if (x == 0) throw std::invalid_argument("reward: x must be >= 1");
    const int w = std::bit_width(x);
    const uint32_t shifted = x << (32 - w);
    return uint32_t(std::countl_one(shifted)) - 1;
}

RewardTable reward_table(int depth, const BadSet& bad, RewardTableOptions opts) {
    if (depth < 1) throw std::invalid_argument("reward_table: depth must be >= 1");
    if (depth > 26) throw std::invalid_argument("reward_table: depth too large");
    const uint32_t size = 2u << depth; // 2^{depth+1}
    RewardTable t;
    t.depth = depth;
    t.bad = bad;
    t.unit_base_at_one = opts.unit_base_at_one;
    t.a.assign(size, 0.0);
    t.b.assign(size, 0.0);
    if (opts.unit_base_at_one && !bad.contains(1)) t.b[1] = 1.0;

    for (uint32_t x = 2; x < size; ++x) {
        if (bad.contains(x)) continue;
        double sa = double(reward(x)), sb = 1.0;
        uint32_t rest = x;
        uint32_t n = 0;
        while (rest) {
            const int j = std::countr_zero(rest);
            const uint32_t y = x ^ ((2u << j) - 1);
            sa += t.a[y];
            sb += t.b[y];
            rest &= rest - 1;
            ++n;
        }
        t.a[x] = sa / double(n);
        t.b[x] = sb / double(n);
    }
    return t;
}

LeafMinimum leaf_minimum(const RewardTable& table) {
    const uint32_t lo = 1u << table.depth, hi = 2u << table.depth;
    LeafMinimum m;
    bool first = true;
    for (uint32_t x = lo; x < hi; ++x) {
        if (table.b[x] <= 0.0)
            throw std::domain_error("leaf_minimum: leaf with b = 0 (bad set touches a leaf)");
        const double r = table.a[x] / table.b[x];
        if (first || r < m.ratio) {
            m.x_min = x;
            m.ratio = r;
            first = false;
        }
    }
    return m;
}

double lower_bound(const RewardTable& table) { return 1.0 + leaf_minimum(table).ratio; }

double recursion_residual(const RewardTable& table, uint32_t stride) {
    if (stride == 0) stride = 1;
    double worst = 0;
    const uint32_t size = uint32_t(table.a.size());
    for (uint32_t x = 2; x < size; x += stride) {
        if (table.bad.contains(x)) continue;
        double sa = double(reward(x)), sb = 1.0;
        uint32_t n = 0;
        for (uint32_t y : transitions(x)) {
            sa += table.a[y];
            sb += table.b[y];
            ++n;
        }
        worst = std::max(worst, std::abs(table.a[x] - sa / n));
        worst = std::max(worst, std::abs(table.b[x] - sb / n));
    }
    return worst;
}

BadSet default_bad_set() {
    static const std::pair<uint32_t, uint32_t> ranges[] = {
        {2, 2},       {4, 5},       {8, 11},      {18, 23},     {36, 38},     {40, 47},
        {73, 75},     {80, 91},     {160, 175},   {178, 178},   {180, 183},   {324, 326},
        {328, 351},   {361, 363},   {656, 663},   {672, 695},   {697, 699},   {1322, 1323},
        {1346, 1375}, {1380, 1381}, {1384, 1391}, {2704, 2711}, {2720, 2743}, {2745, 2747},
        {5456, 5463}, {5465, 5467},
    };
    BadSet b;
    for (auto [lo, hi] : ranges)
        for (uint32_t x = lo; x <= hi; ++x) b.members.insert(x);
    return b;
}

BadSet parse_bad_set(std::istream& in) {
    BadSet b;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;
        std::string extra;
        uint64_t v = 0;
        try {
            size_t used = 0;
            v = std::stoull(tok, &used);
            if (used != tok.size()) throw std::invalid_argument("junk");
        } catch (...) {
            throw std::runtime_error("bad-set file: invalid integer at line " +
                                     std::to_string(lineno));
        }
        if (ss >> extra)
            throw std::runtime_error("bad-set file: trailing token at line " +
                                     std::to_string(lineno));
        if (v == 0 || v > 0xffffffffull)
            throw std::runtime_error("bad-set file: value out of range at line " +
                                     std::to_string(lineno));
        b.members.insert(uint32_t(v));
    }
    return b;
}

BadSet load_bad_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open bad-set file: " + path);
    return parse_bad_set(in);
}

LeafMinimum internal_minimum(const RewardTable& table) {
    const uint32_t hi = 1u << table.depth;
    LeafMinimum m;
    bool first = true;
    for (uint32_t x = 72; x < hi; ++x) {
        if (table.b[x] <= 0.0) continue;
        const double r = table.a[x] / table.b[x];
        if (first || r < m.ratio) {
            m.x_min = x;
            m.ratio = r;
            first = false;
        }
    }
    if (first) throw std::domain_error("internal_minimum: no internal node with b > 0");
    return m;
}

BadSet greedy_bad_set(int depth, uint32_t rounds, uint32_t per_round, uint32_t floor_node) {
    BadSet best;
    double best_ratio;
    {
        RewardTable t = reward_table(depth, best);
        best_ratio = leaf_minimum(t).ratio;
    }
    for (uint32_t round = 0; round < rounds; ++round) {
        RewardTable t = reward_table(depth, best);
        // candidates: internal nodes above the floor, ranked by ratio
        std::vector<std::pair<double, uint32_t>> cand;
        const uint32_t hi = 1u << depth;
        for (uint32_t x = floor_node + 1; x < hi; ++x) {
            if (t.bad.contains(x) || t.b[x] <= 0) continue;
            cand.emplace_back(t.a[x] / t.b[x], x);
        }
        std::partial_sort(cand.begin(), cand.begin() + std::min<size_t>(per_round, cand.size()),
                          cand.end());
        BadSet trial = best;
        for (size_t i = 0; i < cand.size() && i < per_round; ++i)
            trial.members.insert(cand[i].second);
        RewardTable t2 = reward_table(depth, trial);
        const double r2 = leaf_minimum(t2).ratio;
        if (r2 > best_ratio) {
            best = trial;
            best_ratio = r2;
        } else {
            break;
        }
    }
    return best;
}

} // namespace kmre
