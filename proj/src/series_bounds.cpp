#include "kmre/series_bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kmre/estimators.hpp"
#include "kmre/harmonic.hpp"

namespace kmre {

double f_gen(double z) {
    if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("f_gen: z must be in (0,1)");
    if (z <= 1e-3) {
        // series: the closed form loses ~z^3 against ~z terms here
        double term = z, acc = 0;
        for (int k = 1; k <= 64; ++k) {
            acc += 2.0 * term / (double(k + 1) * (k + 2));
            term *= z;
            if (term < 1e-20) break;
        }
        return acc;
    }
    const double L = -std::log1p(-z);
    return (2 * z - z * z - 2 * (1 - z) * L) / (z * z);
}

double phi_gen(double z) {
    if (!(z >= 0.0 && z < 1.0)) throw std::invalid_argument("phi_gen: z must be in [0,1)");
    if (z == 0.0) return 0.5;
    return 1.0 / (2.0 - f_gen(z));
}

namespace {

// integrand z (1 - phi)/(1 - z) written as z (1-f) / ((1-z)(2-f));
// near z=1 use 1 - f = 2 u (log(1/u) - z) / z^2 with u = 1 - z, which is
// stable where "1 - f_gen(z)" would cancel.
double integrand_z(double z) {
    if (z <= 0.0) return 0.0;
    const double f = f_gen(z);
    return z * (1 - f) / ((1 - z) * (2 - f));
}

double integrand_from_u(double u, double v /* = -log(u) */) {
    const double z = 1.0 - u;
    const double one_minus_f = 2 * u * (v - z) / (z * z);
    const double two_minus_f = 1.0 + one_minus_f;
    return z * one_minus_f / (u * two_minus_f);
}

} // namespace

QuadratureResult e_h_s_plus_1(double tol) {
    if (tol < 1e-10) throw std::invalid_argument("e_h_s_plus_1: tol must be >= 1e-10");
    // piece 1: z in [0, 1/2]
    QuadratureResult p1 = integrate([](double z) { return integrand_z(z); }, 0.0, 0.5, tol / 2);
    // piece 2: z in [1/2, 1) via u = e^{ -v }, dz = e^{ -v } dv, v in [ln 2, V]
    const double V = 42.0;
    QuadratureResult p2 = integrate(
        [](double v) {
            const double u = std::exp(-v);
            return integrand_from_u(u, v) * u;
        },
        std::log(2.0), V, tol / 2);
    // truncated tail: integrand(v) <= (2 v + 2) e^{-v}, so the rest is tiny
    const double tail = (2 * V + 4) * std::exp(-V);
    QuadratureResult r;
    r.value = p1.value + p2.value;
    r.abs_tol = tol + tail;
    r.panel_count = p1.panel_count + p2.panel_count;
    return r;
}

SeriesResult e_h_theta2(uint64_t J, uint64_t K, double max_tail_budget) {
    if (J < 10 || K < 10) throw std::invalid_argument("e_h_theta2: cutoffs must be >= 10");
    std::vector<double> a(J + 1), b(K + 1);
    for (uint64_t j = 1; j <= J; ++j) a[j] = harmonic(int64_t(j)) / double(j);
    for (uint64_t k = 1; k <= K; ++k)
        b[k] = (harmonic(int64_t(k) + 1) - 1.0) / (double(k) * double(k + 1));
    std::vector<double> inv(J + K + 1);
    for (uint64_t m = 1; m <= J + K; ++m) inv[m] = 1.0 / double(m);

    double sum = 0;
    for (uint64_t k = 1; k <= K; ++k) {
        const double* invk = inv.data() + k;
        double inner = 0;
        for (uint64_t j = J; j >= 1; --j) inner += a[j] * invk[j];
        sum += b[k] * inner;
    }

    // tails (survival mass of Theta beyond K is P(Theta >= K+1) = H_{K+1}/(K+1)):
    //   rows j > J:  sum_{j>J} (H_j/j) * sum_k b_k/(j+k) <= sum_{j>J} (1+ln j)/(j(j+1))
    //                <= (2 + ln J)/J
    //   cols k > K:  1/(j+k) <= 1/(j+K+1), so bounded by
    //                P(Theta >= K+1) * (sum_{j<=J} a_j/(j+K+1) + row tail)
    const double jtail = (2.0 + std::log(double(J))) / double(J);
    double skj = 0;
    for (uint64_t j = 1; j <= J; ++j) skj += a[j] / double(j + K + 1);
    const double ptail = harmonic(int64_t(K) + 1) / double(K + 1);
    const double ktail = ptail * (skj + jtail);

    SeriesResult r;
    r.value = 1.0 + sum;
    r.truncation_j = J;
    r.truncation_k = K;
    r.tail_estimate = jtail + ktail;
    if (r.tail_estimate > max_tail_budget)
        throw std::invalid_argument("e_h_theta2: cutoffs too small for the requested tail budget");
    return r;
}

UpperBoundResult upper_bound(uint64_t J, uint64_t K, double tol) {
    UpperBoundResult r;
    r.theta2 = e_h_theta2(J, K);
    r.hs1 = e_h_s_plus_1(tol);
    r.bound = r.theta2.value + r.hs1.value;
    r.total_budget = r.theta2.tail_estimate + r.hs1.abs_tol;
    return r;
}

McEstimate mc_h_s_plus_1_minus_1(uint64_t n, Rng& rng) {
    McEstimate e;
    e.n = n;
    double sum = 0, sumsq = 0;
    for (uint64_t i = 0; i < n; ++i) {
        const double h = harmonic(int64_t(sample_S(rng)) + 1) - 1.0;
        sum += h;
        sumsq += h * h;
    }
    e.mean = sum / double(n);
    e.stderr_ = std::sqrt((sumsq / double(n) - e.mean * e.mean) / double(n));
    return e;
}

McEstimate mc_h_theta2(uint64_t n, Rng& rng) {
    McEstimate e;
    e.n = n;
    double sum = 0, sumsq = 0;
    for (uint64_t i = 0; i < n; ++i) {
        const uint64_t t = sample_theta(rng, &e.theta_cap_hits) +
                           sample_theta(rng, &e.theta_cap_hits);
        const double h = harmonic(int64_t(t));
        sum += h;
        sumsq += h * h;
    }
    e.mean = sum / double(n);
    e.stderr_ = std::sqrt((sumsq / double(n) - e.mean * e.mean) / double(n));
    return e;
}

McEstimate mc_h_theta2_plus_s(uint64_t n, Rng& rng) {
    McEstimate e;
    e.n = n;
    double sum = 0, sumsq = 0;
    for (uint64_t i = 0; i < n; ++i) {
        const uint64_t t = sample_theta(rng, &e.theta_cap_hits) +
                           sample_theta(rng, &e.theta_cap_hits) + sample_S(rng);
        const double h = harmonic(int64_t(t));
        sum += h;
        sumsq += h * h;
    }
    e.mean = sum / double(n);
    e.stderr_ = std::sqrt((sumsq / double(n) - e.mean * e.mean) / double(n));
    return e;
}

double e_h_theta() {
    // sum_k H_k / k^2 summed to 1e6 exactly, Euler-Maclaurin style tail after
    double s = 0;
    const int64_t M = 1000000;
    for (int64_t k = M; k >= 1; --k) {
        const double hk = harmonic(k);
        s += hk / (double(k) * double(k));
    }
    const double x = double(M);
    // integral_{M}^inf (ln t + gamma + 1/(2t)) / t^2 dt plus half the boundary term
    const double tail = (std::log(x) + kEulerGamma + 1.0) / x + 1.0 / (4 * x * x);
    return s + tail - 0.5 * (std::log(x) + kEulerGamma) / (x * x);
}

} // namespace kmre
