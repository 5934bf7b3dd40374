#pragma once
// Adaptive Simpson integration with an absolute-tolerance budget and a panel
// cap.  The usual 1/15 Richardson criterion decides refinement.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace kmre {

struct QuadratureResult {
    double value = 0;
    double abs_tol = 0;
    uint64_t panel_count = 0;
};

namespace detail {

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, uint64_t& panels,
                        uint64_t panel_cap) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    panels += 2;
    if (panels > panel_cap)
        throw std::runtime_error("adaptive_simpson: panel cap reached before tolerance");
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol)
        return left + right + delta / 15;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1, panels, panel_cap) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1, panels, panel_cap);
}

} // namespace detail

template <typename F>
QuadratureResult integrate(const F& f, double a, double b, double tol,
                           uint64_t panel_cap = 100000000) {
    QuadratureResult r;
    r.abs_tol = tol;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    r.panel_count = 3;
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    r.value = detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60, r.panel_count,
                                       panel_cap);
    return r;
}

} // namespace kmre
