#pragma once

// Independent reference computations used to freeze expected values in the
// tests. Nothing here shares code with the library's solvers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

/// Phi(z) through the Maclaurin series of erf (long double, |z| <= 5).
inline double normal_cdf_series(double z) {
    const long double x = static_cast<long double>(z) / std::sqrt(2.0L);
    long double term = x;  // x^{2n+1} (-1)^n / n!
    long double sum = 0.0L;
    for (int n = 0; n < 400; ++n) {
        sum += term / (2 * n + 1);
        term *= -x * x / (n + 1);
        if (std::fabs(term) < 1e-30L) break;
    }
    const long double erf = 2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum;
    return static_cast<double>(0.5L * (1.0L + erf));
}

/// Composite Simpson rule with 2m panels.
inline long double simpson(const std::function<long double(long double)>& f, long double a, long double b,
                           int m = 20000) {
    const long double h = (b - a) / (2 * m);
    long double s = f(a) + f(b);
    for (int i = 1; i < 2 * m; ++i) s += f(a + i * h) * ((i % 2) ? 4.0L : 2.0L);
    return s * h / 3.0L;
}

/// P(chi2_df <= u) by quadrature of the gamma integrand after t = s^2,
/// which removes the singularity at the origin for df = 1.
inline double chi2_cdf_quadrature(int df, double u) {
    const long double a = 0.5L * df;
    const long double upper = std::sqrt(0.5L * u);
    auto f = [a](long double s) {
        if (s == 0.0L) return a == 0.5L ? 2.0L : 0.0L;
        return 2.0L * std::pow(s, 2.0L * a - 1.0L) * std::exp(-s * s);
    };
    return static_cast<double>(simpson(f, 0.0L, upper) / std::tgamma(a));
}

/// Bisection for an increasing function on [lo, hi].
inline double bisect_increasing(const std::function<double(double)>& f, double target, double lo, double hi,
                                int iters = 200) {
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Adaptive Simpson on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 50) {
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (d <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, mid, flo, flm, fmid, left, d - 1) + rec(mid, hi, fmid, frm, fhi, right, d - 1);
        };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), depth);
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// max of sum w_i h_i over { w in simplex : -(1/3) sum log(3 w_i) <= eta } for n = 3.
// Scan w1 on a grid; for each w1 the feasible w2 form an interval found by
// bisection on the concave constraint; the best scan cell is refined by
// golden-section (the objective is concave in w1).
inline double simplex_max3(const std::array<double, 3>& h, double eta, int grid_points = 20000) {
    // objective = h2 + w1 (h0 - h2) + w2 (h1 - h2)
    auto g = [&](double w1, double w2) {
        const double w3 = 1.0 - w1 - w2;
        if (w1 <= 0 || w2 <= 0 || w3 <= 0) return -kInf;
        return std::log(3 * w1) + std::log(3 * w2) + std::log(3 * w3) + 3.0 * eta;
    };
    auto value_at = [&](double w1) {
        // w2 maximizing g for fixed w1 is (1 - w1)/2.
        const double mid = 0.5 * (1.0 - w1);
        if (g(w1, mid) < 0) return -kInf;
        const double c1 = h[1] - h[2];
        // Objective is linear in w2; we want the feasible endpoint with the best value.
        double lo = 0.0, hi = mid; // left end: smallest feasible w2
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (lo + hi);
            if (g(w1, m) >= 0) hi = m; else lo = m;
        }
        const double left = hi;
        lo = mid; hi = 1.0 - w1;
        for (int i = 0; i < 200; ++i) {
            const double m = 0.5 * (lo + hi);
            if (g(w1, m) >= 0) lo = m; else hi = m;
        }
        const double right = lo;
        const double w2 = c1 >= 0 ? right : left;
        return h[2] + w1 * (h[0] - h[2]) + w2 * c1;
    };
    double best = -kInf, best_w1 = 0.0;
    for (int j = 1; j < grid_points; ++j) {
        const double w1 = static_cast<double>(j) / grid_points;
        const double v = value_at(w1);
        if (v > best) { best = v; best_w1 = w1; }
    }
    double a = std::max(1e-15, best_w1 - 1.0 / grid_points), b = std::min(1.0 - 1e-15, best_w1 + 1.0 / grid_points);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < 200; ++i) {
        const double c = b - phi * (b - a), d = a + phi * (b - a);
        if (value_at(c) < value_at(d)) a = c; else b = d;
    }
    return std::max(best, value_at(0.5 * (a + b)));
}

} // namespace oracle
