#pragma once
// Numeric evaluation of the drift-speed upper bound: the generating function
// of the S-walk increments, the harmonic integral E H_{S+1} - 1, the
// truncated harmonic double series with an explicit tail budget, and their
// Monte-Carlo cross-checks.

#include <cstdint>

#include "kmre/quadrature.hpp"
#include "kmre/rng.hpp"

namespace kmre {

// generating function of the S-walk increments,
// f(z) = sum_k 2 z^k / ((k+1)(k+2)) = (2z - z^2 - 2(1-z) log(1/(1-z))) / z^2.
// Power series is used for z <= 1e-3 where the closed form cancels.
double f_gen(double z);

// phi(z) = E z^S = 1 / (2 - f(z)); phi(0) = P(S = 0) = 1/2.
double phi_gen(double z);

// Integral of z (1 - phi(z)) / (1 - z) over (0,1), which equals E H_{S+1} - 1.
// Evaluates to ~0.918797.  The logarithmic endpoint at z=1 is handled by an
// exponential substitution, so tolerances down to 1e-10 are honored.
QuadratureResult e_h_s_plus_1(double tol);

struct SeriesResult {
    double value = 0;
    uint64_t truncation_j = 0;
    uint64_t truncation_k = 0;
    double tail_estimate = 0;
};

// Truncated double series 1 + sum_{j<=J,k<=K} (1/(j+k)) (H_j/j) (H_{k+1}-1)/(k(k+1))
// with a rigorous tail bound (H_m <= 1 + ln m based).  Throws when the tail
// bound exceeds max_tail_budget.
SeriesResult e_h_theta2(uint64_t J, uint64_t K, double max_tail_budget = 1e-2);

struct UpperBoundResult {
    SeriesResult theta2;
    QuadratureResult hs1;    // the integral, i.e. E H_{S+1} - 1
    double bound = 0;        // theta2.value + hs1.value
    double total_budget = 0; // theta2 tail + quadrature tolerance
};

UpperBoundResult upper_bound(uint64_t J = 10000, uint64_t K = 10000, double tol = 1e-6);

// Monte-Carlo companions (independent sampling route for the same constants).
struct McEstimate {
    double mean = 0;
    double stderr_ = 0;
    uint64_t n = 0;
    uint64_t theta_cap_hits = 0;
};

McEstimate mc_h_s_plus_1_minus_1(uint64_t n, Rng& rng); // E H_{S+1} - 1
McEstimate mc_h_theta2(uint64_t n, Rng& rng);           // E H_{Theta1+Theta2}
McEstimate mc_h_theta2_plus_s(uint64_t n, Rng& rng);    // E H_{Theta1+Theta2+S}
double e_h_theta();                                     // sum_k H_k / k^2

} // namespace kmre
