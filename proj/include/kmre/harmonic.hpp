#pragma once
// Harmonic numbers H_n = sum_{j<=n} 1/j.  Exact cached summation for small n,
// asymptotic expansion beyond (error < 1e-12 for n > 1e6).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace kmre {

constexpr double kEulerGamma = 0.5772156649015328606;

namespace detail {
// Cache built once, grown on demand up to the fixed exact cutoff.
inline const std::vector<double>& harmonic_table() {
    static const std::vector<double> table = [] {
        std::vector<double> t(1000001);
        t[0] = 0.0;
        for (size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] + 1.0 / double(i);
        return t;
    }();
    return table;
}
} // namespace detail

inline double harmonic(int64_t n) {
    if (n < 0) throw std::invalid_argument("harmonic: negative n");
    const auto& t = detail::harmonic_table();
    if (uint64_t(n) < t.size()) return t[size_t(n)];
    double x = double(n);
    return std::log(x) + kEulerGamma + 1.0 / (2 * x) - 1.0 / (12 * x * x);
}

} // namespace kmre
